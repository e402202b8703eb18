#ifndef RIFT_ENGINE_HPP
#define RIFT_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rift/adaptation.hpp"
#include "rift/fuzzy.hpp"
#include "rift/gate.hpp"
#include "rift/gmm.hpp"
#include "rift/rule.hpp"
#include "rift/rule_manager.hpp"

namespace rift {

// All tunables in one place. Defaults are the fixed values used throughout;
// see README for the config-file keys.
struct EngineConfig {
    double delta = 0.1;          // centroid interval half-width
    double epsilon = 0.5;        // completeness degree for new spreads
    double gate_step = 0.01;     // s, threshold adjustment factor
    double omega = 1e5;          // initial RLS covariance scale
    int n_history = 30;          // warm-up length / density fitting window
    double alpha_sig = 0.05;     // chi-square significance for remoteness
    double u_norm = 2.0;         // L_u norm order in significance scoring
    double tau = 1.0;            // Parzen smoothing width
    double delta3 = 1.1;         // learning-rate gain on improvement
    double delta4 = 0.9;         // learning-rate decay otherwise
    double theta_prune = 0.05;   // utility floor for pruning
    int64_t prune_window = 50;   // consecutive low-utility samples before pruning
    int rule_cap = 100;
    int archive_cap = 50;
    double utility_decay = 0.99;
    double weight_decay = 1e-7;  // gamma_d in the RLS step
    double eta_q = 0.01;
    double eta_lambda = 0.01;
    double delta1_init = 0.34657359027997264;  // ln(2)/2
    double q_init = 0.5;
    double lambda_init = 0.5;
    double init_spread = 0.2;    // first-rule isotropic spread (scaled units)
    uint64_t seed = 1;
    bool gate_enabled = true;
    bool growth_enabled = true;
    bool pruning_enabled = true;
    bool recall_enabled = true;
    bool parallel = false;       // OpenMP rule-level kernels

    void validate() const;  // throws ConfigError on out-of-range values
};

struct Counters {
    int64_t seen = 0;
    int64_t accepted = 0;
    int64_t grown = 0;      // rules created (bootstrap included)
    int64_t pruned = 0;
    int64_t recalled = 0;
    int64_t numeric_skips = 0;
};

// Online per-dimension min/max scaler onto [-1, 1]. Expanding bounds apply
// from the sample that expanded them onward; nothing is rescaled
// retroactively.
struct OnlineScaler {
    Vec lo;
    Vec hi;
    bool initialized = false;

    void observe(const Vec& x);
    Vec scale(const Vec& x) const;
};

// Everything process() decided and measured for one sample.
struct SampleTrace {
    int64_t index = 0;
    bool prediction_valid = false;
    Vec prediction;
    Vec error;               // prediction - target, per output
    bool warmup = false;
    bool accepted = false;
    double entropy = 0.0;
    double delta1 = 0.0;
    bool grown = false;
    int recalled_id = -1;
    std::vector<int> pruned_ids;
    int winner = -1;
    int rule_count = 0;
    Vec q;
    double fhat0 = 0.0;
    double runtime_us = 0.0;
    std::string note;
};

struct ModelState {
    EngineConfig config;
    int n_inputs = 0;
    int n_outputs = 0;
    std::vector<Rule> rules;
    RuleArchive archive;
    Vec q;                     // design factor per output
    GateState gate;
    ZedmState zedm;
    GmmDensity density;
    std::vector<Vec> warmup_buffer;  // scaled samples awaiting the density fit
    OnlineScaler scaler;
    Counters counters;

    int rule_count() const { return static_cast<int>(rules.size()); }
};

// One evolving model consuming one stream. Single logical thread; distinct
// engines are independent and may run concurrently.
class Engine {
public:
    explicit Engine(EngineConfig config = {});

    // Supply a pre-fitted input density (e.g. from pre-recorded samples).
    // The warm-up fit is skipped; the unconditional-learning prefix is not.
    void use_density(GmmDensity density);

    // Seed the scaler from raw pre-recorded samples, then fit and install
    // the input density over their scaled images.
    void use_recorded_samples(const std::vector<Vec>& raw_samples);

    // One pass of the per-sample loop: scale, predict, gate, structure
    // update, consequent and design-factor adaptation.
    SampleTrace process(const Vec& x, const Vec& target);

    // Pure prediction; no learning state is touched.
    Vec predict(const Vec& x) const;
    std::vector<Vec> predict_batch(const std::vector<Vec>& xs) const;

    std::vector<uint8_t> snapshot() const;
    static Engine restore(const std::vector<uint8_t>& bytes);

    const ModelState& state() const { return state_; }
    ModelState& state() { return state_; }

    // Remoteness threshold for the current input dimension.
    double delta2() const { return delta2_; }

    int64_t parameter_count() const;

private:
    void bootstrap(const Vec& x_scaled, const Vec& target, SampleTrace& trace);
    void learn(const Vec& x_scaled, const Vec& target, const fuzzy::SampleCache& cache,
               SampleTrace& trace);
    double crisp_q() const;

    ModelState state_;
    double delta2_ = 0.0;
};

// Serialization lives beside the engine; see docs/snapshot_format.md.
std::vector<uint8_t> serialize_model(const ModelState& state);
ModelState deserialize_model(const std::vector<uint8_t>& bytes);

}  // namespace rift

#endif

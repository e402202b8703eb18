#include "rift/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "rift/kernels.hpp"

namespace rift {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005;

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}
}  // namespace

void EngineConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (delta < 0.0) fail("delta must be >= 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must be in (0,1)");
    if (!(gate_step >= 0.0 && gate_step < 1.0)) fail("gate_step must be in [0,1)");
    if (!(omega > 0.0)) fail("omega must be > 0");
    if (n_history < 1) fail("n_history must be >= 1");
    if (!(alpha_sig > 0.0 && alpha_sig < 1.0)) fail("alpha_sig must be in (0,1)");
    if (!(u_norm >= 1.0)) fail("u_norm must be >= 1");
    if (!(tau > 0.0)) fail("tau must be > 0");
    if (!(delta3 > 1.0)) fail("delta3 must be > 1");
    if (!(delta4 > 0.0 && delta4 <= 1.0)) fail("delta4 must be in (0,1]");
    if (theta_prune < 0.0) fail("theta_prune must be >= 0");
    if (prune_window < 1) fail("prune_window must be >= 1");
    if (rule_cap < 1) fail("rule_cap must be >= 1");
    if (archive_cap < 0) fail("archive_cap must be >= 0");
    if (!(utility_decay > 0.0 && utility_decay < 1.0)) fail("utility_decay must be in (0,1)");
    if (weight_decay < 0.0) fail("weight_decay must be >= 0");
    if (eta_q < 0.0 || eta_lambda < 0.0) fail("learning rates must be >= 0");
    if (!(delta1_init > 0.0)) fail("delta1_init must be > 0");
    if (!(q_init >= 0.0 && q_init <= 1.0)) fail("q_init must be in [0,1]");
    if (!(lambda_init >= 0.0 && lambda_init <= 1.0)) fail("lambda_init must be in [0,1]");
    if (!(init_spread > 0.0)) fail("init_spread must be > 0");
}

void OnlineScaler::observe(const Vec& x) {
    if (!initialized) {
        lo = x;
        hi = x;
        initialized = true;
        return;
    }
    for (size_t j = 0; j < x.size(); ++j) {
        if (x[j] < lo[j]) lo[j] = x[j];
        if (x[j] > hi[j]) hi[j] = x[j];
    }
}

Vec OnlineScaler::scale(const Vec& x) const {
    Vec out(x.size(), 0.0);
    if (!initialized) return out;
    for (size_t j = 0; j < x.size(); ++j) {
        const double range = hi[j] - lo[j];
        out[j] = (range > 0.0) ? -1.0 + 2.0 * (x[j] - lo[j]) / range : 0.0;
    }
    return out;
}

Engine::Engine(EngineConfig config) {
    config.validate();
    state_.config = config;
    state_.gate.delta1 = config.delta1_init;
    state_.gate.step = config.gate_step;
    state_.archive.cap = config.archive_cap;
    state_.zedm.eta_q = config.eta_q;
    state_.zedm.eta_lambda = config.eta_lambda;
    state_.zedm.tau = config.tau;
    state_.zedm.delta3 = config.delta3;
    state_.zedm.delta4 = config.delta4;
}

void Engine::use_density(GmmDensity density) {
    state_.density = std::move(density);
    state_.warmup_buffer.clear();
}

void Engine::use_recorded_samples(const std::vector<Vec>& raw_samples) {
    if (raw_samples.empty()) throw DataError("use_recorded_samples: no samples");
    for (const Vec& x : raw_samples) {
        if (!all_finite(x) || x.size() != raw_samples[0].size())
            throw DataError("use_recorded_samples: bad sample");
        state_.scaler.observe(x);
    }
    std::vector<Vec> scaled;
    scaled.reserve(raw_samples.size());
    for (const Vec& x : raw_samples) scaled.push_back(state_.scaler.scale(x));
    GmmFitOptions opt;
    opt.seed = state_.config.seed;
    use_density(fit_gmm(scaled, opt));
}

double Engine::crisp_q() const {
    if (state_.q.empty()) return state_.config.q_init;
    double s = 0.0;
    for (double v : state_.q) s += v;
    return s / static_cast<double>(state_.q.size());
}

int64_t Engine::parameter_count() const {
    const int64_t p = state_.n_inputs;
    const int64_t m = state_.n_outputs;
    const int64_t per_rule = p * p + 3 * p + (2 * p + 1) * m + 2;
    // Global adaptive scalars: delta1, eta_q, eta_lambda, the density
    // accumulator and its previous estimate.
    return static_cast<int64_t>(state_.rules.size()) * per_rule + m + 5;
}

void Engine::bootstrap(const Vec& x_scaled, const Vec& target, SampleTrace& trace) {
    const EngineConfig& cfg = state_.config;
    Rule first = rule_manager::make_bootstrap(x_scaled, cfg.delta, cfg.epsilon, cfg.init_spread,
                                              state_.n_outputs, cfg.lambda_init, cfg.omega);
    state_.rules.push_back(std::move(first));
    state_.counters.grown += 1;
    state_.counters.accepted += 1;
    trace.accepted = true;
    trace.grown = true;
    trace.winner = 0;

    const Vec x_ext = fuzzy::chebyshev_expand(x_scaled);
    const Vec weight{1.0};
    kernels::rls_pass(state_.rules, x_ext, target, weight, cfg.weight_decay, false);

    Rule& r = state_.rules[0];
    const double phi = crisp_q() * r.prev_psi_lower + (1.0 - crisp_q()) * r.prev_psi_upper;
    r.util.observe(phi, target[0], cfg.utility_decay);
}

SampleTrace Engine::process(const Vec& x, const Vec& target) {
    const auto t_start = std::chrono::steady_clock::now();
    ModelState& st = state_;
    const EngineConfig& cfg = st.config;

    if (st.n_inputs == 0) {
        if (x.empty() || target.empty()) throw RejectedInput("process: empty sample");
        st.n_inputs = static_cast<int>(x.size());
        st.n_outputs = static_cast<int>(target.size());
        st.q.assign(static_cast<size_t>(st.n_outputs), cfg.q_init);
        delta2_ = rule_manager::remoteness_threshold(st.n_inputs, cfg.alpha_sig);
    }
    if (static_cast<int>(x.size()) != st.n_inputs || static_cast<int>(target.size()) != st.n_outputs)
        throw RejectedInput("process: dimension mismatch");
    if (!all_finite(x) || !all_finite(target)) throw RejectedInput("process: non-finite sample");

    SampleTrace trace;
    trace.index = st.counters.seen;
    st.counters.seen += 1;
    const bool warmup_prefix = st.counters.seen <= cfg.n_history;
    trace.warmup = warmup_prefix;

    st.scaler.observe(x);
    const Vec xs = st.scaler.scale(x);

    if (!st.density.fitted()) {
        st.warmup_buffer.push_back(xs);
        if (static_cast<int>(st.warmup_buffer.size()) >= cfg.n_history) {
            GmmFitOptions opt;
            opt.seed = cfg.seed;
            st.density = fit_gmm(st.warmup_buffer, opt);
            st.warmup_buffer.clear();
            st.warmup_buffer.shrink_to_fit();
        }
    }

    if (st.rules.empty()) {
        bootstrap(xs, target, trace);
    } else {
        const fuzzy::SampleCache cache = fuzzy::evaluate(st.rules, st.q, xs, cfg.parallel);
        trace.prediction = cache.y;
        trace.prediction_valid = true;
        trace.error.resize(static_cast<size_t>(st.n_outputs));
        for (int o = 0; o < st.n_outputs; ++o)
            trace.error[static_cast<size_t>(o)] = cache.y[static_cast<size_t>(o)] - target[static_cast<size_t>(o)];
        if (cache.underflow_fallback) trace.note += "[firing underflow, nearest-rule output]";

        st.gate.observe_rule_count(st.rule_count());
        trace.entropy = gate::esem_entropy(gate::neighborhood_probability(st.rules, xs));
        bool accepted = true;
        if (cfg.gate_enabled && !warmup_prefix) accepted = gate::gate_decide(st.gate, trace.entropy);
        trace.accepted = accepted;

        if (accepted) {
            st.counters.accepted += 1;
            learn(xs, target, cache, trace);
        }
    }

    trace.delta1 = st.gate.delta1;
    trace.rule_count = st.rule_count();
    trace.q = st.q;
    if (trace.fhat0 == 0.0 && st.zedm.n_seen > 0)
        trace.fhat0 = st.zedm.accum / (static_cast<double>(st.zedm.n_seen) * st.zedm.tau * kSqrt2Pi);

    const auto t_end = std::chrono::steady_clock::now();
    trace.runtime_us = std::chrono::duration<double, std::micro>(t_end - t_start).count();
    return trace;
}

void Engine::learn(const Vec& xs, const Vec& target, const fuzzy::SampleCache& cache,
                   SampleTrace& trace) {
    ModelState& st = state_;
    const EngineConfig& cfg = st.config;
    const double qc = crisp_q();
    const int r0 = cache.n_rules();

    // Accepted samples advance the recurrent memory; the pre-existing rules
    // take this sample's blended firing.
    fuzzy::commit_temporal(std::span<Rule>(st.rules.data(), static_cast<size_t>(r0)), cache);

    int winner = rule_manager::select_winner(st.rules, cache.firing, qc);
    trace.winner = winner;

    // Position of each current rule in the cache, for gradient remapping.
    std::vector<int> origin(static_cast<size_t>(r0));
    std::iota(origin.begin(), origin.end(), 0);

    bool grew = false;
    int appended = -1;

    auto grow_fresh = [&](Rule&& premise) {
        if (st.rule_count() >= cfg.rule_cap) {
            const int victim = rule_manager::lowest_utility_index(st.rules, winner);
            if (victim >= 0) {
                st.archive.push(std::move(st.rules[static_cast<size_t>(victim)]), st.counters.seen);
                st.rules.erase(st.rules.begin() + victim);
                origin.erase(origin.begin() + victim);
                if (victim < winner) winner -= 1;
                st.counters.pruned += 1;
                trace.pruned_ids.push_back(victim);
            }
        }
        Rule fresh = std::move(premise);
        rule_manager::init_consequent(fresh, st.rules[static_cast<size_t>(winner)], cfg.omega);
        fresh.lambda = cfg.lambda_init;
        const IntervalFiring f = fuzzy::spatial_firing(fresh, xs);
        fresh.prev_psi_upper = f.r_upper;
        fresh.prev_psi_lower = f.r_lower;
        st.rules.push_back(std::move(fresh));
        origin.push_back(-1);
        appended = st.rule_count() - 1;
        grew = true;
        st.counters.grown += 1;
        trace.grown = true;
    };

    const bool warmup_prefix = st.counters.seen <= cfg.n_history;
    if (cfg.growth_enabled) {
        try {
            if (st.density.fitted() && !warmup_prefix) {
                Rule hyp = rule_manager::make_hypothetical(st.rules, xs, cfg.delta, cfg.epsilon);
                Vec scores(static_cast<size_t>(r0), 0.0);
                kernels::significance_pass(std::span<const Rule>(st.rules.data(), static_cast<size_t>(r0)),
                                           cache.beta_norm, qc, st.density, cfg.u_norm, scores,
                                           cfg.parallel);
                const auto decision = rule_manager::should_grow(
                    st.rules, hyp, scores, cache.beta_norm[static_cast<size_t>(winner)], qc, st.density,
                    cfg.u_norm, delta2_, cache.firing);
                if (decision.grow) {
                    if (cfg.recall_enabled) {
                        const auto recalled = rule_manager::try_recall(
                            st.rules, st.archive, xs, cache.x_ext, decision.hypothetical_significance,
                            qc, st.density, cfg.u_norm, delta2_, target, cache.y);
                        if (recalled) {
                            appended = *recalled;
                            origin.push_back(-1);
                            st.counters.recalled += 1;
                            trace.recalled_id = appended;
                        }
                    }
                    if (appended < 0) grow_fresh(std::move(hyp));
                }
            } else {
                // Warm-up prefix (or no density yet): this is the structure
                // formation phase, so growth falls back to the remoteness
                // condition alone and the fresh rule keeps the conservative
                // bootstrap spread; the neighbour-reaching spread only makes
                // sense once significance scoring can veto it. Recall waits
                // for the density too.
                double max_fs = 0.0;
                for (const IntervalFiring& f : cache.firing)
                    max_fs = std::max(max_fs, rule_manager::crisp_firing(f, qc));
                if (max_fs <= delta2_)
                    grow_fresh(rule_manager::make_bootstrap(xs, cfg.delta, cfg.epsilon,
                                                            cfg.init_spread, st.n_outputs,
                                                            cfg.lambda_init, cfg.omega));
            }
        } catch (const DegenerateCovariance& e) {
            st.counters.numeric_skips += 1;
            trace.note += std::string("[growth skipped: ") + e.what() + "]";
        }
    }

    if (!grew && appended < 0) {
        if (!rule_manager::update_premise(st.rules[static_cast<size_t>(winner)], xs)) {
            st.counters.numeric_skips += 1;
            trace.note += "[covariance update skipped]";
        }
    }

    // Utility bookkeeping from the committed memory (every live rule now
    // holds this sample's temporal firing).
    for (size_t i = 0; i < st.rules.size(); ++i) {
        Rule& r = st.rules[i];
        const double phi = qc * r.prev_psi_lower + (1.0 - qc) * r.prev_psi_upper;
        r.util.observe(phi, target[0], cfg.utility_decay);
    }
    for (size_t i = 0; i < st.rules.size(); ++i) {
        Rule& r = st.rules[i];
        const bool protected_rule = static_cast<int>(i) == winner || static_cast<int>(i) == appended;
        if (protected_rule || r.util.utility() >= cfg.theta_prune)
            r.util.low_streak = 0;
        else
            r.util.low_streak += 1;
    }

    if (cfg.pruning_enabled && st.rule_count() >= 2) {
        const std::vector<int> pruned =
            rule_manager::prune_rules(st.rules, st.archive, cfg.prune_window, st.counters.seen);
        for (auto it = pruned.rbegin(); it != pruned.rend(); ++it) origin.erase(origin.begin() + *it);
        st.counters.pruned += static_cast<int64_t>(pruned.size());
        trace.pruned_ids.insert(trace.pruned_ids.end(), pruned.begin(), pruned.end());
    }

    // Consequent adaptation, weighted by each rule's share of the crisp
    // temporal firing.
    const int r_now = st.rule_count();
    Vec weights(static_cast<size_t>(r_now), 0.0);
    double total = 0.0;
    for (int i = 0; i < r_now; ++i) {
        const Rule& r = st.rules[static_cast<size_t>(i)];
        weights[static_cast<size_t>(i)] = qc * r.prev_psi_lower + (1.0 - qc) * r.prev_psi_upper;
        total += weights[static_cast<size_t>(i)];
    }
    if (total >= 1e-300) {
        for (double& w : weights) w /= total;
        const int skipped =
            kernels::rls_pass(st.rules, cache.x_ext, target, weights, cfg.weight_decay, cfg.parallel);
        if (skipped > 0) {
            st.counters.numeric_skips += skipped;
            trace.note += "[non-finite consequent update skipped]";
        }
    }

    // Design-factor adaptation from this sample's inference cache.
    double err_scalar;
    if (st.n_outputs == 1)
        err_scalar = trace.error[0];
    else
        err_scalar = std::sqrt(linalg::squared_norm(trace.error));
    const double f_now = adaptation::error_density_zero(st.zedm, err_scalar);
    trace.fhat0 = f_now;

    adaptation::DesignGradients grads = adaptation::design_gradients(cache, st.q, trace.error);
    Vec lambda_grads(static_cast<size_t>(st.rule_count()), 0.0);
    for (size_t k = 0; k < origin.size(); ++k)
        if (origin[k] >= 0) lambda_grads[k] = grads.d_lambda[static_cast<size_t>(origin[k])];
    grads.d_lambda = std::move(lambda_grads);
    adaptation::apply_design_step(st.q, st.rules, grads, st.zedm, f_now);
    adaptation::adapt_learning_rate(st.zedm, f_now);
}

Vec Engine::predict(const Vec& x) const {
    if (state_.rules.empty()) throw NoModel("predict: model has no rules");
    if (static_cast<int>(x.size()) != state_.n_inputs)
        throw RejectedInput("predict: dimension mismatch");
    const Vec xs = state_.scaler.scale(x);
    const fuzzy::SampleCache cache =
        fuzzy::evaluate(state_.rules, state_.q, xs, state_.config.parallel);
    return cache.y;
}

std::vector<Vec> Engine::predict_batch(const std::vector<Vec>& xs) const {
    if (state_.rules.empty()) throw NoModel("predict_batch: model has no rules");
    for (const Vec& x : xs)
        if (static_cast<int>(x.size()) != state_.n_inputs)
            throw RejectedInput("predict_batch: dimension mismatch");
    std::vector<Vec> out(xs.size());
    kernels::run_indexed(static_cast<int>(xs.size()), state_.config.parallel, [&](int i) {
        const Vec scaled = state_.scaler.scale(xs[static_cast<size_t>(i)]);
        out[static_cast<size_t>(i)] =
            fuzzy::evaluate(state_.rules, state_.q, scaled, false).y;
    });
    return out;
}

std::vector<uint8_t> Engine::snapshot() const { return serialize_model(state_); }

Engine Engine::restore(const std::vector<uint8_t>& bytes) {
    Engine e;
    e.state_ = deserialize_model(bytes);
    if (e.state_.n_inputs > 0)
        e.delta2_ = rule_manager::remoteness_threshold(e.state_.n_inputs, e.state_.config.alpha_sig);
    return e;
}

}  // namespace rift

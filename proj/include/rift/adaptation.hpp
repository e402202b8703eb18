#ifndef RIFT_ADAPTATION_HPP
#define RIFT_ADAPTATION_HPP

#include <cstdint>
#include <span>

#include "rift/fuzzy.hpp"
#include "rift/rule.hpp"

namespace rift {

// State of the zero-error-density parameter adaptation: Parzen accumulator,
// self-adjusting learning rates, and the running gradient bound.
struct ZedmState {
    double eta_q = 0.01;
    double eta_lambda = 0.01;
    double accum = 0.0;       // running sum of exp(-e^2 / (2 tau^2))
    double f_prev = 0.0;
    bool has_prev = false;
    int64_t n_seen = 0;
    double grad_max = 0.0;    // largest gradient magnitude observed
    double tau = 1.0;
    double delta3 = 1.1;
    double delta4 = 0.9;

    // Lyapunov stability ceiling for the learning rates.
    double rate_bound() const {
        constexpr double kSqrt2Pi = 2.5066282746310005;
        if (grad_max <= 0.0 || accum <= 0.0 || n_seen == 0) return 0.0;  // 0 = no bound yet
        return 2.0 * static_cast<double>(n_seen) * kSqrt2Pi / (grad_max * grad_max * accum);
    }
};

namespace adaptation {

// Advance the Parzen accumulator with one error and return the current
// kernel estimate of the error density at zero.
double error_density_zero(ZedmState& state, double err);

// Exact gradients of the squared error through the output blend and the
// recurrent firing, evaluated from one sample's cache.
//   d_q[o]      = e_o * (lower_mean_o - upper_mean_o)
//   d_lambda[i] = sum_o e_o * dy_o/dpsi_i * (r_i - psi_prev_i)
struct DesignGradients {
    Vec d_q;       // per output
    Vec d_lambda;  // per rule
};
DesignGradients design_gradients(const fuzzy::SampleCache& cache, const Vec& q, const Vec& err);

// Gradient step on q (per output) and lambda (per rule), scaled by the
// density estimate; both clamped to [0,1]. Updates the gradient bound.
void apply_design_step(Vec& q, std::span<Rule> rules, const DesignGradients& grads,
                       ZedmState& state, double f_now);

// Multiplicative learning-rate adjustment, then the stability clamp.
void adapt_learning_rate(ZedmState& state, double f_now);

// One fuzzily weighted RLS step with quadratic weight decay on a single
// rule. firing_weight is the rule's normalized crisp temporal firing.
// Returns false when the update was skipped as non-finite.
bool rls_update(Rule& rule, const Vec& x_ext, const Vec& target, double firing_weight,
                double weight_decay);

}  // namespace adaptation
}  // namespace rift

#endif

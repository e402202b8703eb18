#include "rift/adaptation.hpp"

#include <algorithm>
#include <cmath>

namespace rift {
namespace adaptation {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005;
constexpr double kSumFloor = 1e-300;

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }
}  // namespace

double error_density_zero(ZedmState& state, double err) {
    state.n_seen += 1;
    const double z = err / state.tau;
    state.accum += std::exp(-0.5 * z * z);
    return state.accum / (static_cast<double>(state.n_seen) * state.tau * kSqrt2Pi);
}

DesignGradients design_gradients(const fuzzy::SampleCache& cache, const Vec& q, const Vec& err) {
    const int m = static_cast<int>(q.size());
    const int n = cache.n_rules();
    DesignGradients g;
    g.d_q.assign(static_cast<size_t>(m), 0.0);
    g.d_lambda.assign(static_cast<size_t>(n), 0.0);
    if (cache.underflow_fallback) return g;  // output had no usable dependence on q or lambda

    for (int o = 0; o < m; ++o)
        g.d_q[static_cast<size_t>(o)] =
            err[static_cast<size_t>(o)] *
            (cache.lower_mean[static_cast<size_t>(o)] - cache.upper_mean[static_cast<size_t>(o)]);

    const bool upper_ok = cache.sum_psi_upper >= kSumFloor;
    const bool lower_ok = cache.sum_psi_lower >= kSumFloor;
    for (int i = 0; i < n; ++i) {
        const IntervalFiring& f = cache.firing[static_cast<size_t>(i)];
        const double dpsi_u = f.r_upper - cache.prev_psi_upper[static_cast<size_t>(i)];
        const double dpsi_l = f.r_lower - cache.prev_psi_lower[static_cast<size_t>(i)];
        double grad = 0.0;
        for (int o = 0; o < m; ++o) {
            const double qo = q[static_cast<size_t>(o)];
            double dy = 0.0;
            if (upper_ok)
                dy += (1.0 - qo) *
                      (cache.beta(i, o) - cache.upper_mean[static_cast<size_t>(o)]) /
                      cache.sum_psi_upper * dpsi_u;
            if (lower_ok)
                dy += qo *
                      (cache.beta(i, o) - cache.lower_mean[static_cast<size_t>(o)]) /
                      cache.sum_psi_lower * dpsi_l;
            grad += err[static_cast<size_t>(o)] * dy;
        }
        g.d_lambda[static_cast<size_t>(i)] = grad;
    }
    return g;
}

void apply_design_step(Vec& q, std::span<Rule> rules, const DesignGradients& grads,
                       ZedmState& state, double f_now) {
    for (size_t o = 0; o < q.size(); ++o) {
        state.grad_max = std::max(state.grad_max, std::fabs(grads.d_q[o]));
        q[o] = clamp01(q[o] - state.eta_q * f_now * grads.d_q[o]);
    }
    for (size_t i = 0; i < rules.size() && i < grads.d_lambda.size(); ++i) {
        state.grad_max = std::max(state.grad_max, std::fabs(grads.d_lambda[i]));
        rules[i].lambda = clamp01(rules[i].lambda - state.eta_lambda * f_now * grads.d_lambda[i]);
    }
}

void adapt_learning_rate(ZedmState& state, double f_now) {
    if (state.has_prev) {
        const double factor = (f_now >= state.f_prev) ? state.delta3 : state.delta4;
        state.eta_q *= factor;
        state.eta_lambda *= factor;
    }
    state.f_prev = f_now;
    state.has_prev = true;

    const double bound = state.rate_bound();
    if (bound > 0.0) {
        state.eta_q = std::min(state.eta_q, bound);
        state.eta_lambda = std::min(state.eta_lambda, bound);
    }
}

bool rls_update(Rule& rule, const Vec& x_ext, const Vec& target, double firing_weight,
                double weight_decay) {
    if (firing_weight < 1e-12) return true;  // silent rule, nothing to adapt
    const int ne = rule.rls_cov.rows;
    const int m = rule.n_out();

    const Vec px = linalg::matvec(rule.rls_cov, x_ext);
    const double denom = 1.0 / firing_weight + linalg::dot(x_ext, px);
    if (!(denom > 0.0) || !std::isfinite(denom)) return false;

    Vec gain(static_cast<size_t>(ne));
    for (int i = 0; i < ne; ++i) gain[static_cast<size_t>(i)] = px[static_cast<size_t>(i)] / denom;

    Mat cov_new = rule.rls_cov;
    for (int i = 0; i < ne; ++i)
        for (int j = 0; j < ne; ++j)
            cov_new(i, j) -= gain[static_cast<size_t>(i)] * px[static_cast<size_t>(j)];
    linalg::symmetrize(cov_new);

    Mat w_new = rule.weights;
    for (int o = 0; o < m; ++o) {
        double pred = 0.0;
        for (int i = 0; i < ne; ++i) pred += x_ext[static_cast<size_t>(i)] * rule.weights(i, o);
        const double innovation = target[static_cast<size_t>(o)] - pred;
        // Decay uses the updated covariance; with weight_decay = 0 this is
        // plain weighted RLS.
        for (int i = 0; i < ne; ++i) {
            double decay_term = 0.0;
            if (weight_decay != 0.0) {
                for (int k = 0; k < ne; ++k) decay_term += cov_new(i, k) * rule.weights(k, o);
                decay_term *= weight_decay;
            }
            w_new(i, o) += gain[static_cast<size_t>(i)] * innovation - decay_term;
        }
    }

    for (double v : cov_new.a)
        if (!std::isfinite(v)) return false;
    for (double v : w_new.a)
        if (!std::isfinite(v)) return false;

    rule.rls_cov = std::move(cov_new);
    rule.weights = std::move(w_new);
    return true;
}

}  // namespace adaptation
}  // namespace rift

#include "rift/kernels.hpp"

#include <cmath>

#include "rift/adaptation.hpp"
#include "rift/fuzzy.hpp"
#include "rift/rule_manager.hpp"

namespace rift {
namespace kernels {

void firing_pass_serial(std::span<const Rule> rules, const Vec& x,
                        std::span<IntervalFiring> out) {
    const int n = static_cast<int>(rules.size());
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = fuzzy::tentative_firing(rules[static_cast<size_t>(i)], x);
}

void firing_pass_parallel(std::span<const Rule> rules, const Vec& x,
                          std::span<IntervalFiring> out) {
    const int n = static_cast<int>(rules.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = fuzzy::tentative_firing(rules[static_cast<size_t>(i)], x);
}

void firing_pass(std::span<const Rule> rules, const Vec& x, std::span<IntervalFiring> out,
                 bool parallel) {
    if (parallel)
        firing_pass_parallel(rules, x, out);
    else
        firing_pass_serial(rules, x, out);
}

namespace {

inline void consequent_row(const Rule& rule, const Vec& x_ext, Mat& beta, Vec& beta_norm, int i) {
    const int m = rule.n_out();
    const int ne = rule.weights.rows;
    double norm_sq = 0.0;
    for (int o = 0; o < m; ++o) {
        double s = 0.0;
        for (int k = 0; k < ne; ++k) s += x_ext[static_cast<size_t>(k)] * rule.weights(k, o);
        beta(i, o) = s;
        norm_sq += s * s;
    }
    beta_norm[static_cast<size_t>(i)] = std::sqrt(norm_sq);
}

}  // namespace

void consequent_pass_serial(std::span<const Rule> rules, const Vec& x_ext, Mat& beta,
                            Vec& beta_norm) {
    const int n = static_cast<int>(rules.size());
    const int m = n ? rules[0].n_out() : 0;
    beta = Mat(n, m);
    beta_norm.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) consequent_row(rules[static_cast<size_t>(i)], x_ext, beta, beta_norm, i);
}

void consequent_pass_parallel(std::span<const Rule> rules, const Vec& x_ext, Mat& beta,
                              Vec& beta_norm) {
    const int n = static_cast<int>(rules.size());
    const int m = n ? rules[0].n_out() : 0;
    beta = Mat(n, m);
    beta_norm.assign(static_cast<size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) consequent_row(rules[static_cast<size_t>(i)], x_ext, beta, beta_norm, i);
}

void consequent_pass(std::span<const Rule> rules, const Vec& x_ext, Mat& beta, Vec& beta_norm,
                     bool parallel) {
    if (parallel)
        consequent_pass_parallel(rules, x_ext, beta, beta_norm);
    else
        consequent_pass_serial(rules, x_ext, beta, beta_norm);
}

void significance_pass_serial(std::span<const Rule> rules, std::span<const double> beta_norm,
                              double q, const GmmDensity& gmm, double u, std::span<double> out) {
    const int n = static_cast<int>(rules.size());
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] =
            rule_manager::rule_significance(rules[static_cast<size_t>(i)], beta_norm[static_cast<size_t>(i)], q, gmm, u);
}

void significance_pass_parallel(std::span<const Rule> rules, std::span<const double> beta_norm,
                                double q, const GmmDensity& gmm, double u, std::span<double> out) {
    const int n = static_cast<int>(rules.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] =
            rule_manager::rule_significance(rules[static_cast<size_t>(i)], beta_norm[static_cast<size_t>(i)], q, gmm, u);
}

void significance_pass(std::span<const Rule> rules, std::span<const double> beta_norm, double q,
                       const GmmDensity& gmm, double u, std::span<double> out, bool parallel) {
    if (parallel)
        significance_pass_parallel(rules, beta_norm, q, gmm, u, out);
    else
        significance_pass_serial(rules, beta_norm, q, gmm, u, out);
}

int rls_pass_serial(std::span<Rule> rules, const Vec& x_ext, const Vec& target,
                    std::span<const double> firing_weight, double weight_decay) {
    const int n = static_cast<int>(rules.size());
    int skipped = 0;
    for (int i = 0; i < n; ++i)
        if (!adaptation::rls_update(rules[static_cast<size_t>(i)], x_ext, target, firing_weight[static_cast<size_t>(i)],
                                    weight_decay))
            ++skipped;
    return skipped;
}

int rls_pass_parallel(std::span<Rule> rules, const Vec& x_ext, const Vec& target,
                      std::span<const double> firing_weight, double weight_decay) {
    const int n = static_cast<int>(rules.size());
    int skipped = 0;
#pragma omp parallel for schedule(static) reduction(+ : skipped)
    for (int i = 0; i < n; ++i)
        if (!adaptation::rls_update(rules[static_cast<size_t>(i)], x_ext, target, firing_weight[static_cast<size_t>(i)],
                                    weight_decay))
            ++skipped;
    return skipped;
}

int rls_pass(std::span<Rule> rules, const Vec& x_ext, const Vec& target,
             std::span<const double> firing_weight, double weight_decay, bool parallel) {
    return parallel ? rls_pass_parallel(rules, x_ext, target, firing_weight, weight_decay)
                    : rls_pass_serial(rules, x_ext, target, firing_weight, weight_decay);
}

void run_indexed(int n, bool parallel, const std::function<void(int)>& body) {
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) body(i);
    } else {
        for (int i = 0; i < n; ++i) body(i);
    }
}

}  // namespace kernels
}  // namespace rift

#include "rift/fuzzy.hpp"

#include <cmath>
#include <limits>

#include "rift/kernels.hpp"

namespace rift {
namespace fuzzy {

double gaussian_mf(double x, double c, double sigma) {
    const double z = (x - c) / sigma;
    return std::exp(-z * z);
}

double log_gaussian_mf(double x, double c, double sigma) {
    const double z = (x - c) / sigma;
    return -z * z;
}

MembershipInterval interval_membership(double x, double c_lower, double c_upper, double sigma) {
    MembershipInterval mu{};
    if (x < c_lower)
        mu.upper = gaussian_mf(x, c_lower, sigma);
    else if (x > c_upper)
        mu.upper = gaussian_mf(x, c_upper, sigma);
    else
        mu.upper = 1.0;

    const double mid = 0.5 * (c_lower + c_upper);
    mu.lower = (x <= mid) ? gaussian_mf(x, c_upper, sigma) : gaussian_mf(x, c_lower, sigma);
    return mu;
}

Vec extract_radii(const Mat& inv_cov) {
    const int p = inv_cov.rows;
    Vec sigma(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double d = inv_cov(j, j);
        if (!(d > 0.0) || !std::isfinite(d))
            throw DegenerateCovariance("extract_radii: non-positive inverse covariance diagonal");
        sigma[static_cast<size_t>(j)] = 1.0 / std::sqrt(d);
    }
    return sigma;
}

IntervalFiring spatial_firing(const Rule& rule, const Vec& x) {
    double log_upper = 0.0;
    double log_lower = 0.0;
    const int p = rule.dim();
    for (int j = 0; j < p; ++j) {
        const double xl = x[static_cast<size_t>(j)];
        const double cl = rule.c_lower[static_cast<size_t>(j)];
        const double cu = rule.c_upper[static_cast<size_t>(j)];
        const double s = rule.sigma[static_cast<size_t>(j)];
        if (xl < cl)
            log_upper += log_gaussian_mf(xl, cl, s);
        else if (xl > cu)
            log_upper += log_gaussian_mf(xl, cu, s);
        const double mid = 0.5 * (cl + cu);
        log_lower += (xl <= mid) ? log_gaussian_mf(xl, cu, s) : log_gaussian_mf(xl, cl, s);
    }
    IntervalFiring f{};
    f.r_upper = std::exp(log_upper);
    f.r_lower = std::exp(log_lower);
    return f;
}

IntervalFiring tentative_firing(const Rule& rule, const Vec& x) {
    IntervalFiring f = spatial_firing(rule, x);
    const double l = rule.lambda;
    f.psi_upper = l * f.r_upper + (1.0 - l) * rule.prev_psi_upper;
    f.psi_lower = l * f.r_lower + (1.0 - l) * rule.prev_psi_lower;
    return f;
}

void temporal_firing(Rule& rule, IntervalFiring& firing) {
    const double l = rule.lambda;
    firing.psi_upper = l * firing.r_upper + (1.0 - l) * rule.prev_psi_upper;
    firing.psi_lower = l * firing.r_lower + (1.0 - l) * rule.prev_psi_lower;
    rule.prev_psi_upper = firing.psi_upper;
    rule.prev_psi_lower = firing.psi_lower;
}

Vec chebyshev_expand(const Vec& x) {
    const int p = static_cast<int>(x.size());
    Vec ext(static_cast<size_t>(extended_dim(p)));
    ext[0] = 1.0;
    for (int j = 0; j < p; ++j) {
        const double v = x[static_cast<size_t>(j)];
        const double a0 = 1.0;
        const double a1 = v;
        const double a2 = 2.0 * v * a1 - a0;
        ext[static_cast<size_t>(2 * j + 1)] = a1;
        ext[static_cast<size_t>(2 * j + 2)] = a2;
    }
    return ext;
}

namespace {

constexpr double kFiringFloor = 1e-300;

// Mahalanobis-nearest rule from its midpoint centroid, for the underflow path.
int nearest_rule(std::span<const Rule> rules, const Vec& x) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rules.size(); ++i) {
        const Vec mid = rules[i].midpoint();
        Vec d(x.size());
        for (size_t j = 0; j < x.size(); ++j) d[j] = x[j] - mid[j];
        const double dist = linalg::quadratic_form(rules[i].inv_cov, d);
        if (dist < best_d) {
            best_d = dist;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

Vec blend_outputs(const SampleCache& cache, const Vec& q) {
    if (cache.underflow_fallback) return cache.y;
    const int m = static_cast<int>(q.size());
    Vec y(static_cast<size_t>(m));
    for (int o = 0; o < m; ++o) {
        const double qo = q[static_cast<size_t>(o)];
        y[static_cast<size_t>(o)] = (1.0 - qo) * cache.upper_mean[static_cast<size_t>(o)] +
                                    qo * cache.lower_mean[static_cast<size_t>(o)];
    }
    return y;
}

SampleCache evaluate(std::span<const Rule> rules, const Vec& q, const Vec& x, bool parallel) {
    SampleCache cache;
    cache.x = x;
    cache.x_ext = chebyshev_expand(x);
    const int n = static_cast<int>(rules.size());
    const int m = static_cast<int>(q.size());

    cache.firing.resize(static_cast<size_t>(n));
    kernels::firing_pass(rules, x, cache.firing, parallel);
    cache.prev_psi_upper.resize(static_cast<size_t>(n));
    cache.prev_psi_lower.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        cache.prev_psi_upper[static_cast<size_t>(i)] = rules[static_cast<size_t>(i)].prev_psi_upper;
        cache.prev_psi_lower[static_cast<size_t>(i)] = rules[static_cast<size_t>(i)].prev_psi_lower;
    }

    kernels::consequent_pass(rules, cache.x_ext, cache.beta, cache.beta_norm, parallel);

    // Reductions stay serial and in index order so results do not depend on
    // the thread count.
    Vec acc_upper(static_cast<size_t>(m), 0.0);
    Vec acc_lower(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < n; ++i) {
        const IntervalFiring& f = cache.firing[static_cast<size_t>(i)];
        cache.sum_psi_upper += f.psi_upper;
        cache.sum_psi_lower += f.psi_lower;
        for (int o = 0; o < m; ++o) {
            acc_upper[static_cast<size_t>(o)] += f.psi_upper * cache.beta(i, o);
            acc_lower[static_cast<size_t>(o)] += f.psi_lower * cache.beta(i, o);
        }
    }

    cache.upper_mean.assign(static_cast<size_t>(m), 0.0);
    cache.lower_mean.assign(static_cast<size_t>(m), 0.0);

    if (cache.sum_psi_upper < kFiringFloor && cache.sum_psi_lower < kFiringFloor) {
        // Every rule is effectively silent; fall back to the nearest rule's
        // consequent instead of dividing by zero.
        cache.underflow_fallback = true;
        cache.fallback_rule = nearest_rule(rules, x);
        cache.y.resize(static_cast<size_t>(m));
        for (int o = 0; o < m; ++o) {
            const double b = cache.beta(cache.fallback_rule, o);
            cache.y[static_cast<size_t>(o)] = b;
            cache.upper_mean[static_cast<size_t>(o)] = b;
            cache.lower_mean[static_cast<size_t>(o)] = b;
        }
        return cache;
    }

    for (int o = 0; o < m; ++o) {
        if (cache.sum_psi_upper >= kFiringFloor)
            cache.upper_mean[static_cast<size_t>(o)] =
                acc_upper[static_cast<size_t>(o)] / cache.sum_psi_upper;
        if (cache.sum_psi_lower >= kFiringFloor)
            cache.lower_mean[static_cast<size_t>(o)] =
                acc_lower[static_cast<size_t>(o)] / cache.sum_psi_lower;
    }
    // A one-sided underflow degrades to the bound that is still alive.
    if (cache.sum_psi_upper < kFiringFloor) cache.upper_mean = cache.lower_mean;
    if (cache.sum_psi_lower < kFiringFloor) cache.lower_mean = cache.upper_mean;

    cache.y = blend_outputs(cache, q);
    return cache;
}

void commit_temporal(std::span<Rule> rules, const SampleCache& cache) {
    for (size_t i = 0; i < rules.size(); ++i) {
        rules[i].prev_psi_upper = cache.firing[i].psi_upper;
        rules[i].prev_psi_lower = cache.firing[i].psi_lower;
    }
}

Vec infer(std::span<Rule> rules, const Vec& q, const Vec& x,
          std::vector<IntervalFiring>* firings_out) {
    SampleCache cache = evaluate(rules, q, x);
    commit_temporal(rules, cache);
    if (firings_out) *firings_out = cache.firing;
    return cache.y;
}

}  // namespace fuzzy
}  // namespace rift

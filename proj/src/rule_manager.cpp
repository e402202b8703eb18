#include "rift/rule_manager.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rift/fuzzy.hpp"
#include "rift/stats.hpp"

namespace rift {
namespace rule_manager {

double rule_significance(const Rule& rule, double beta_norm, double q, const GmmDensity& gmm,
                         double u) {
    if (beta_norm == 0.0) return 0.0;
    const int p = rule.dim();
    Mat lower;
    if (!linalg::cholesky(rule.inv_cov, lower))
        throw DegenerateCovariance("rule_significance: inverse covariance not positive definite");
    // det(cov)^(-1/2) = det(inv_cov)^(1/2)
    const double det_factor = std::exp(0.5 * linalg::log_det_from_cholesky(lower));
    constexpr double kTwoPi = 6.283185307179586477;
    const double prefactor = std::pow(kTwoPi / u, 0.5 * p) * det_factor;

    double upper_mass = 0.0;
    double lower_mass = 0.0;
    for (int c = 0; c < gmm.n_comp; ++c) {
        const double alpha = gmm.mixing[static_cast<size_t>(c)];
        upper_mass += alpha * component_convolution(rule.c_upper, rule.inv_cov, u, gmm, c);
        lower_mass += alpha * component_convolution(rule.c_lower, rule.inv_cov, u, gmm, c);
    }
    const double inv_u = 1.0 / u;
    const double upper_term = std::pow(prefactor * upper_mass, inv_u);
    const double lower_term = std::pow(prefactor * lower_mass, inv_u);
    return beta_norm * (1.0 - q) * upper_term + beta_norm * q * lower_term;
}

double remoteness_threshold(int p, double alpha) {
    return std::exp(-stats::chi2_quantile(1.0 - alpha, p));
}

double crisp_firing(const IntervalFiring& f, double q) {
    return q * f.r_lower + (1.0 - q) * f.r_upper;
}

namespace {

Rule premise_from_spread(const Vec& x, double delta, double spread, int n_out) {
    const int p = static_cast<int>(x.size());
    Rule r;
    r.c_lower.resize(static_cast<size_t>(p));
    r.c_upper.resize(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) {
        r.c_lower[static_cast<size_t>(j)] = x[static_cast<size_t>(j)] - delta;
        r.c_upper[static_cast<size_t>(j)] = x[static_cast<size_t>(j)] + delta;
    }
    r.inv_cov = Mat::identity(p, 1.0 / (spread * spread));
    r.sigma.assign(static_cast<size_t>(p), spread);
    r.weights = Mat(fuzzy::extended_dim(p), n_out, 0.0);
    r.rls_cov = Mat(fuzzy::extended_dim(p), fuzzy::extended_dim(p), 0.0);
    r.n_pop = 1;
    r.coord_sum = x;
    r.sq_sum = linalg::squared_norm(x);
    return r;
}

}  // namespace

Rule make_hypothetical(std::span<const Rule> rules, const Vec& x, double delta, double epsilon) {
    // Distance scale: the farther of the two nearest centroid midpoints
    // (just the nearest when only one rule exists).
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (const Rule& r : rules) {
        const double d = std::sqrt(linalg::squared_distance(x, r.midpoint()));
        if (d < d1) {
            d2 = d1;
            d1 = d;
        } else if (d < d2) {
            d2 = d;
        }
    }
    double scale = std::isfinite(d2) ? d2 : d1;
    if (scale < 1e-6) scale = 1e-6;
    const double spread = scale / std::sqrt(std::log(1.0 / epsilon));
    const int n_out = rules.empty() ? 1 : rules[0].n_out();
    return premise_from_spread(x, delta, spread, n_out);
}

Rule make_bootstrap(const Vec& x, double delta, double epsilon, double init_spread, int n_out,
                    double lambda_init, double omega) {
    const double spread = init_spread / std::sqrt(std::log(1.0 / epsilon));
    Rule r = premise_from_spread(x, delta, spread, n_out);
    r.lambda = lambda_init;
    r.rls_cov = Mat::identity(fuzzy::extended_dim(static_cast<int>(x.size())), omega);
    const IntervalFiring f = fuzzy::spatial_firing(r, x);
    r.prev_psi_upper = f.r_upper;
    r.prev_psi_lower = f.r_lower;
    return r;
}

void init_consequent(Rule& fresh, const Rule& winner, double omega) {
    fresh.weights = winner.weights;
    fresh.rls_cov = Mat::identity(winner.rls_cov.rows, omega);
}

GrowthDecision should_grow(std::span<const Rule> rules, const Rule& hypothetical,
                           std::span<const double> live_significance, double hypothetical_beta_norm,
                           double q, const GmmDensity& gmm, double u, double delta2,
                           std::span<const IntervalFiring> firings) {
    GrowthDecision d;
    d.hypothetical_significance = rule_significance(hypothetical, hypothetical_beta_norm, q, gmm, u);
    for (double e : live_significance) d.max_live_significance = std::max(d.max_live_significance, e);
    for (const IntervalFiring& f : firings)
        d.max_crisp_firing = std::max(d.max_crisp_firing, crisp_firing(f, q));
    d.grow = d.hypothetical_significance >= d.max_live_significance && d.max_crisp_firing <= delta2;
    (void)rules;
    return d;
}

int select_winner(std::span<const Rule> rules, std::span<const IntervalFiring> firings, double q) {
    double pop_total = 0.0;
    for (const Rule& r : rules) pop_total += static_cast<double>(r.n_pop);
    int best = 0;
    double best_score = -1.0;
    for (size_t i = 0; i < rules.size(); ++i) {
        const double prior = static_cast<double>(rules[i].n_pop) / pop_total;
        const double score = prior * crisp_firing(firings[i], q);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

bool update_premise(Rule& winner, const Vec& x) {
    const int p = winner.dim();
    const double n = static_cast<double>(winner.n_pop);
    const double a = 1.0 / (n + 1.0);

    // Deviation from the pre-update midpoint drives the covariance step.
    const Vec mid = winner.midpoint();
    Vec d(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) d[static_cast<size_t>(j)] = x[static_cast<size_t>(j)] - mid[static_cast<size_t>(j)];

    bool cov_updated = true;
    const Vec v = linalg::matvec(winner.inv_cov, d);
    const double denom = (1.0 - a) + a * linalg::dot(d, v);
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        cov_updated = false;
    } else {
        Mat fresh(p, p);
        const double s = a / (1.0 - a);
        bool finite = true;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                const double val =
                    winner.inv_cov(i, j) / (1.0 - a) - s * v[static_cast<size_t>(i)] * v[static_cast<size_t>(j)] / denom;
                if (!std::isfinite(val)) finite = false;
                fresh(i, j) = val;
            }
        if (finite) {
            linalg::symmetrize(fresh);
            bool diag_ok = true;
            for (int j = 0; j < p; ++j)
                if (!(fresh(j, j) > 0.0)) diag_ok = false;
            if (diag_ok) {
                winner.inv_cov = std::move(fresh);
                winner.sigma = fuzzy::extract_radii(winner.inv_cov);
            } else {
                cov_updated = false;
            }
        } else {
            cov_updated = false;
        }
    }

    // Running mean on each centroid bound; the interval narrows toward the
    // absorbed population mean.
    for (int j = 0; j < p; ++j) {
        winner.c_lower[static_cast<size_t>(j)] += (x[static_cast<size_t>(j)] - winner.c_lower[static_cast<size_t>(j)]) * a;
        winner.c_upper[static_cast<size_t>(j)] += (x[static_cast<size_t>(j)] - winner.c_upper[static_cast<size_t>(j)]) * a;
    }

    winner.n_pop += 1;
    for (int j = 0; j < p; ++j) winner.coord_sum[static_cast<size_t>(j)] += x[static_cast<size_t>(j)];
    winner.sq_sum += linalg::squared_norm(x);
    return cov_updated;
}

std::vector<int> prune_rules(std::vector<Rule>& rules, RuleArchive& archive, int64_t window,
                             int64_t now) {
    std::vector<int> victims;
    for (size_t i = 0; i < rules.size(); ++i)
        if (rules[i].util.low_streak >= window) victims.push_back(static_cast<int>(i));
    if (victims.empty()) return victims;

    if (victims.size() == rules.size()) {
        // Keep the most useful rule alive no matter what.
        size_t keep = 0;
        double best = -1.0;
        for (size_t k = 0; k < victims.size(); ++k) {
            const double util = rules[static_cast<size_t>(victims[k])].util.utility();
            if (util > best) {
                best = util;
                keep = k;
            }
        }
        victims.erase(victims.begin() + static_cast<long>(keep));
    }

    for (auto it = victims.rbegin(); it != victims.rend(); ++it) {
        archive.push(std::move(rules[static_cast<size_t>(*it)]), now);
        rules.erase(rules.begin() + *it);
    }
    return victims;
}

std::optional<int> try_recall(std::vector<Rule>& rules, RuleArchive& archive, const Vec& x,
                              const Vec& x_ext, double hypothetical_significance, double q,
                              const GmmDensity& gmm, double u, double delta2, const Vec& target,
                              const Vec& current_prediction) {
    double model_err = 0.0;
    for (size_t o = 0; o < target.size(); ++o) {
        const double e = current_prediction[o] - target[o];
        model_err += e * e;
    }

    int best = -1;
    double best_sig = -std::numeric_limits<double>::infinity();
    double best_fire = -1.0;
    for (size_t k = 0; k < archive.items.size(); ++k) {
        const Rule& r = archive.items[k].rule;
        const IntervalFiring f = fuzzy::spatial_firing(r, x);
        const double fire = crisp_firing(f, q);
        if (fire <= delta2) continue;
        double norm_sq = 0.0;
        double arch_err = 0.0;
        for (int o = 0; o < r.n_out(); ++o) {
            double b = 0.0;
            for (int i = 0; i < r.weights.rows; ++i) b += x_ext[static_cast<size_t>(i)] * r.weights(i, o);
            norm_sq += b * b;
            const double e = b - target[static_cast<size_t>(o)];
            arch_err += e * e;
        }
        if (arch_err > model_err) continue;  // stale consequent, growing is better
        const double sig = rule_significance(r, std::sqrt(norm_sq), q, gmm, u);
        if (sig < hypothetical_significance) continue;
        if (sig > best_sig || (sig == best_sig && fire > best_fire)) {
            best_sig = sig;
            best_fire = fire;
            best = static_cast<int>(k);
        }
    }
    if (best < 0) return std::nullopt;

    Rule r = std::move(archive.items[static_cast<size_t>(best)].rule);
    archive.items.erase(archive.items.begin() + best);
    const IntervalFiring f = fuzzy::spatial_firing(r, x);
    r.prev_psi_upper = f.r_upper;  // memory restarts where the rule re-enters
    r.prev_psi_lower = f.r_lower;
    r.util.low_streak = 0;
    rules.push_back(std::move(r));
    return static_cast<int>(rules.size()) - 1;
}

int lowest_utility_index(std::span<const Rule> rules, int protect) {
    int best = -1;
    double best_util = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rules.size(); ++i) {
        if (static_cast<int>(i) == protect) continue;
        const double util = rules[i].util.utility();
        if (util < best_util) {
            best_util = util;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace rule_manager
}  // namespace rift

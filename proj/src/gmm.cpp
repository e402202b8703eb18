#include "rift/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rift/rng.hpp"
#include "rift/stats.hpp"

namespace rift {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Log density of a diagonal Gaussian, variances passed directly.
double diag_log_pdf(const Vec& x, const Vec& mean, const Vec& var) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - mean[j];
        s += d * d / var[j] + std::log(var[j]);
    }
    return -0.5 * (s + static_cast<double>(x.size()) * kLog2Pi);
}

struct DiagFit {
    std::vector<Vec> means;
    std::vector<Vec> vars;
    Vec mixing;
    std::vector<double> ll_history;
    double final_ll = -std::numeric_limits<double>::infinity();
};

std::vector<Vec> kmeanspp_centers(const std::vector<Vec>& xs, int k, Rng& rng) {
    const size_t n = xs.size();
    std::vector<Vec> centers;
    centers.reserve(static_cast<size_t>(k));
    centers.push_back(xs[rng.index(n)]);
    Vec dist2(n, 0.0);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec& c : centers) best = std::min(best, linalg::squared_distance(xs[i], c));
            dist2[i] = best;
            total += best;
        }
        size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double run = 0.0;
            for (size_t i = 0; i < n; ++i) {
                run += dist2[i];
                if (run >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(n);  // all points identical
        }
        centers.push_back(xs[pick]);
    }
    // A few Lloyd sweeps to settle the seeds.
    const int p = static_cast<int>(xs[0].size());
    for (int sweep = 0; sweep < 10; ++sweep) {
        std::vector<Vec> sums(static_cast<size_t>(k), Vec(static_cast<size_t>(p), 0.0));
        std::vector<int> counts(static_cast<size_t>(k), 0);
        for (const Vec& x : xs) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = linalg::squared_distance(x, centers[static_cast<size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            for (int j = 0; j < p; ++j) sums[static_cast<size_t>(best)][static_cast<size_t>(j)] += x[static_cast<size_t>(j)];
            ++counts[static_cast<size_t>(best)];
        }
        bool moved = false;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<size_t>(c)] == 0) continue;
            for (int j = 0; j < p; ++j) {
                const double v = sums[static_cast<size_t>(c)][static_cast<size_t>(j)] / counts[static_cast<size_t>(c)];
                if (v != centers[static_cast<size_t>(c)][static_cast<size_t>(j)]) moved = true;
                centers[static_cast<size_t>(c)][static_cast<size_t>(j)] = v;
            }
        }
        if (!moved) break;
    }
    return centers;
}

Vec global_variance(const std::vector<Vec>& xs, double reg) {
    const size_t n = xs.size();
    const size_t p = xs[0].size();
    Vec mean(p, 0.0);
    for (const Vec& x : xs)
        for (size_t j = 0; j < p; ++j) mean[j] += x[j];
    for (double& v : mean) v /= static_cast<double>(n);
    Vec var(p, 0.0);
    for (const Vec& x : xs)
        for (size_t j = 0; j < p; ++j) {
            const double d = x[j] - mean[j];
            var[j] += d * d;
        }
    for (double& v : var) v = v / static_cast<double>(n) + reg;
    return var;
}

DiagFit em_fit(const std::vector<Vec>& xs, int k, const GmmFitOptions& opt, Rng& rng) {
    const int n = static_cast<int>(xs.size());
    const int p = static_cast<int>(xs[0].size());
    const Vec gvar = global_variance(xs, opt.diag_reg);

    DiagFit fit;
    fit.means = kmeanspp_centers(xs, k, rng);
    fit.vars.assign(static_cast<size_t>(k), gvar);
    fit.mixing.assign(static_cast<size_t>(k), 1.0 / k);

    Mat resp(n, k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        // E step with log-sum-exp.
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            Vec lp(static_cast<size_t>(k));
            for (int c = 0; c < k; ++c) {
                lp[static_cast<size_t>(c)] = std::log(fit.mixing[static_cast<size_t>(c)]) +
                                             diag_log_pdf(xs[static_cast<size_t>(i)], fit.means[static_cast<size_t>(c)],
                                                          fit.vars[static_cast<size_t>(c)]);
                mx = std::max(mx, lp[static_cast<size_t>(c)]);
            }
            double z = 0.0;
            for (int c = 0; c < k; ++c) z += std::exp(lp[static_cast<size_t>(c)] - mx);
            ll += mx + std::log(z);
            for (int c = 0; c < k; ++c) resp(i, c) = std::exp(lp[static_cast<size_t>(c)] - mx) / z;
        }
        fit.ll_history.push_back(ll);
        fit.final_ll = ll;
        if (iter > 0 && std::fabs(ll - prev_ll) <= opt.rel_tol * (std::fabs(prev_ll) + 1.0)) break;
        prev_ll = ll;

        // M step.
        for (int c = 0; c < k; ++c) {
            double rsum = 0.0;
            for (int i = 0; i < n; ++i) rsum += resp(i, c);
            if (rsum < 1e-8) {
                // Collapsed component: park it on the worst-explained point.
                int worst = 0;
                double worst_lp = std::numeric_limits<double>::infinity();
                for (int i = 0; i < n; ++i) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (int cc = 0; cc < k; ++cc)
                        best = std::max(best, diag_log_pdf(xs[static_cast<size_t>(i)], fit.means[static_cast<size_t>(cc)],
                                                           fit.vars[static_cast<size_t>(cc)]));
                    if (best < worst_lp) {
                        worst_lp = best;
                        worst = i;
                    }
                }
                fit.means[static_cast<size_t>(c)] = xs[static_cast<size_t>(worst)];
                fit.vars[static_cast<size_t>(c)] = gvar;
                fit.mixing[static_cast<size_t>(c)] = 1.0 / n;
                continue;
            }
            Vec mean(static_cast<size_t>(p), 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) mean[static_cast<size_t>(j)] += resp(i, c) * xs[static_cast<size_t>(i)][static_cast<size_t>(j)];
            for (double& v : mean) v /= rsum;
            Vec var(static_cast<size_t>(p), 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j) {
                    const double d = xs[static_cast<size_t>(i)][static_cast<size_t>(j)] - mean[static_cast<size_t>(j)];
                    var[static_cast<size_t>(j)] += resp(i, c) * d * d;
                }
            for (double& v : var) v = v / rsum + opt.diag_reg;
            fit.means[static_cast<size_t>(c)] = std::move(mean);
            fit.vars[static_cast<size_t>(c)] = std::move(var);
            fit.mixing[static_cast<size_t>(c)] = rsum / n;
        }
        // Keep mixing a proper distribution after collapse handling.
        double msum = 0.0;
        for (double v : fit.mixing) msum += v;
        for (double& v : fit.mixing) v /= msum;
    }
    return fit;
}

GmmDensity to_density(const DiagFit& fit, int p) {
    GmmDensity g;
    g.n_comp = static_cast<int>(fit.means.size());
    g.means = fit.means;
    g.mixing = fit.mixing;
    g.covariances.reserve(fit.vars.size());
    for (const Vec& var : fit.vars) {
        Mat cov(p, p, 0.0);
        for (int j = 0; j < p; ++j) cov(j, j) = var[static_cast<size_t>(j)];
        g.covariances.push_back(std::move(cov));
    }
    g.fit_log_likelihood = fit.ll_history;
    return g;
}

}  // namespace

double GmmDensity::pdf(const Vec& x) const {
    double s = 0.0;
    for (int c = 0; c < n_comp; ++c) {
        Vec d(x.size());
        for (size_t j = 0; j < x.size(); ++j) d[j] = x[j] - means[static_cast<size_t>(c)][j];
        s += mixing[static_cast<size_t>(c)] * stats::mvn_pdf(d, covariances[static_cast<size_t>(c)]);
    }
    return s;
}

GmmDensity fit_gmm(const std::vector<Vec>& samples, const GmmFitOptions& opt) {
    if (samples.empty()) throw Error("fit_gmm: no samples");
    const int n = static_cast<int>(samples.size());
    const int p = static_cast<int>(samples[0].size());

    if (n < p + 1) {
        // Too few rows for model selection; single diagonal component.
        DiagFit fit;
        Vec mean(static_cast<size_t>(p), 0.0);
        for (const Vec& x : samples)
            for (int j = 0; j < p; ++j) mean[static_cast<size_t>(j)] += x[static_cast<size_t>(j)];
        for (double& v : mean) v /= n;
        fit.means = {mean};
        fit.vars = {global_variance(samples, opt.diag_reg)};
        fit.mixing = {1.0};
        double ll = 0.0;
        for (const Vec& x : samples) ll += diag_log_pdf(x, fit.means[0], fit.vars[0]);
        fit.ll_history = {ll};
        return to_density(fit, p);
    }

    double best_bic = std::numeric_limits<double>::infinity();
    DiagFit best;
    for (int k = 1; k <= opt.max_components; ++k) {
        if (k > n) break;
        Rng rng(opt.seed + static_cast<uint64_t>(k) * 7919);
        DiagFit fit = em_fit(samples, k, opt, rng);
        const double n_params = static_cast<double>(2 * k * p + (k - 1));
        const double bic = -2.0 * fit.final_ll + n_params * std::log(static_cast<double>(n));
        if (bic < best_bic) {
            best_bic = bic;
            best = std::move(fit);
        }
    }
    return to_density(best, p);
}

double component_convolution(const Vec& c, const Mat& rule_inv_cov, double u,
                             const GmmDensity& gmm, int comp_index) {
    if (comp_index < 0 || comp_index >= gmm.n_comp)
        throw Error("component_convolution: component index out of range");
    const int p = rule_inv_cov.rows;
    Mat cov(p, p);
    const Mat& gc = gmm.covariances[static_cast<size_t>(comp_index)];
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) cov(i, j) = rule_inv_cov(i, j) / u + gc(i, j);
    Vec d(static_cast<size_t>(p));
    const Vec& v = gmm.means[static_cast<size_t>(comp_index)];
    for (int j = 0; j < p; ++j) d[static_cast<size_t>(j)] = c[static_cast<size_t>(j)] - v[static_cast<size_t>(j)];
    return stats::mvn_pdf(d, cov);
}

}  // namespace rift

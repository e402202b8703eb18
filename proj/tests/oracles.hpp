// Independent reference computations the tests check the library against.
// Everything here deliberately avoids the implementation paths it verifies.
#ifndef RIFT_TESTS_ORACLES_HPP
#define RIFT_TESTS_ORACLES_HPP

#include <cmath>
#include <deque>
#include <vector>

#include "rift/linalg.hpp"
#include "rift/rng.hpp"
#include "rift/rule.hpp"

namespace oracles {

using rift::Mat;
using rift::Rng;
using rift::Rule;
using rift::Vec;

// --- distances and densities ---------------------------------------------

inline double brute_force_mean_sq_distance(const std::vector<Vec>& points, const Vec& x) {
    double s = 0.0;
    for (const Vec& p : points) {
        double d = 0.0;
        for (size_t j = 0; j < x.size(); ++j) d += (x[j] - p[j]) * (x[j] - p[j]);
        s += d;
    }
    return s / static_cast<double>(points.size());
}

// Dense multivariate normal density for p = 2, explicit inverse and det.
inline double mvn_pdf_2d(const Vec& d, const Mat& cov) {
    const double a = cov(0, 0), b = cov(0, 1), c = cov(1, 1);
    const double det = a * c - b * b;
    const double quad = (c * d[0] * d[0] - 2.0 * b * d[0] * d[1] + a * d[1] * d[1]) / det;
    constexpr double kTwoPi = 6.283185307179586477;
    return std::exp(-0.5 * quad) / (kTwoPi * std::sqrt(det));
}

// --- Chebyshev closed form ------------------------------------------------

inline double chebyshev_closed_form(int n, double x) { return std::cos(n * std::acos(x)); }

// --- type-1 reference inference -------------------------------------------

// Memoryless type-1 TSK: y = sum r_i b_i / sum r_i with Gaussian firing
// exp(-sum((x_j - c_j)^2 / s_j^2)).
inline double reference_tsk(const std::vector<Vec>& centers, const std::vector<Vec>& sigmas,
                            const std::vector<Vec>& weights, const Vec& x, const Vec& x_ext) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < centers.size(); ++i) {
        double expo = 0.0;
        for (size_t j = 0; j < x.size(); ++j) {
            const double z = (x[j] - centers[i][j]) / sigmas[i][j];
            expo -= z * z;
        }
        const double r = std::exp(expo);
        double beta = 0.0;
        for (size_t k = 0; k < x_ext.size(); ++k) beta += x_ext[k] * weights[i][k];
        num += r * beta;
        den += r;
    }
    return num / den;
}

// --- least squares ---------------------------------------------------------

// Plain batch least squares via normal equations; rows are feature vectors.
inline Vec batch_least_squares(const std::vector<Vec>& rows, const Vec& targets) {
    const int k = static_cast<int>(rows[0].size());
    Mat xtx(k, k, 0.0);
    Vec xty(static_cast<size_t>(k), 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) xtx(a, b) += rows[i][static_cast<size_t>(a)] * rows[i][static_cast<size_t>(b)];
            xty[static_cast<size_t>(a)] += rows[i][static_cast<size_t>(a)] * targets[i];
        }
    }
    Mat lower;
    rift::linalg::cholesky(xtx, lower);
    return rift::linalg::cholesky_solve(lower, xty);
}

// Sliding-window linear model with intercept, predict-then-train.
class SlidingWindowLs {
public:
    explicit SlidingWindowLs(size_t window) : window_(window) {}

    bool ready() const { return rows_.size() >= 5; }

    double predict(const Vec& x) const {
        const int k = static_cast<int>(x.size()) + 1;
        Mat xtx(k, k, 0.0);
        Vec xty(static_cast<size_t>(k), 0.0);
        for (size_t i = 0; i < rows_.size(); ++i) {
            Vec f(static_cast<size_t>(k));
            f[0] = 1.0;
            for (size_t j = 0; j < x.size(); ++j) f[j + 1] = rows_[i][j];
            for (int a = 0; a < k; ++a) {
                for (int b = 0; b < k; ++b) xtx(a, b) += f[static_cast<size_t>(a)] * f[static_cast<size_t>(b)];
                xty[static_cast<size_t>(a)] += f[static_cast<size_t>(a)] * targets_[i];
            }
        }
        for (int a = 0; a < k; ++a) xtx(a, a) += 1e-9;
        Mat lower;
        rift::linalg::cholesky(xtx, lower);
        const Vec w = rift::linalg::cholesky_solve(lower, xty);
        double y = w[0];
        for (size_t j = 0; j < x.size(); ++j) y += w[j + 1] * x[j];
        return y;
    }

    void train(const Vec& x, double t) {
        rows_.push_back(x);
        targets_.push_back(t);
        if (rows_.size() > window_) {
            rows_.pop_front();
            targets_.pop_front();
        }
    }

private:
    size_t window_;
    std::deque<Vec> rows_;
    std::deque<double> targets_;
};

// --- random fixtures --------------------------------------------------------

inline Mat random_spd(Rng& rng, int p, double jitter = 0.2) {
    Mat a(p, p);
    for (double& v : a.a) v = rng.uniform(-1.0, 1.0);
    Mat spd(p, p, 0.0);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += a(k, i) * a(k, j);
            spd(i, j) = s;
        }
    for (int i = 0; i < p; ++i) spd(i, i) += jitter;
    return spd;
}

inline Rule random_rule(Rng& rng, int p, int m) {
    Rule r;
    r.c_lower.resize(static_cast<size_t>(p));
    r.c_upper.resize(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double c = rng.uniform(-0.8, 0.8);
        const double half = rng.uniform(0.0, 0.15);
        r.c_lower[static_cast<size_t>(j)] = c - half;
        r.c_upper[static_cast<size_t>(j)] = c + half;
    }
    r.inv_cov = random_spd(rng, p, 0.5);
    r.sigma.resize(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) r.sigma[static_cast<size_t>(j)] = 1.0 / std::sqrt(r.inv_cov(j, j));
    const int ne = 2 * p + 1;
    r.weights = Mat(ne, m);
    for (double& w : r.weights.a) w = rng.normal();
    r.rls_cov = Mat::identity(ne, 1e5);
    r.lambda = rng.uniform(0.05, 0.95);
    r.prev_psi_upper = rng.uniform(0.2, 1.0);
    r.prev_psi_lower = r.prev_psi_upper * rng.uniform(0.1, 1.0);
    r.n_pop = 1 + static_cast<int64_t>(rng.index(40));
    r.coord_sum.assign(static_cast<size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) r.coord_sum[static_cast<size_t>(j)] = rng.uniform(-1.0, 1.0) * static_cast<double>(r.n_pop);
    r.sq_sum = rng.uniform(0.0, 2.0) * static_cast<double>(r.n_pop);
    return r;
}

}  // namespace oracles

#endif

#ifndef RIFT_RULE_HPP
#define RIFT_RULE_HPP

#include <cmath>
#include <cstdint>

#include "rift/linalg.hpp"

namespace rift {

// Per-rule spatial and temporal firing strengths for one sample.
// Invariant: 0 <= r_lower <= r_upper <= 1 and likewise for psi.
struct IntervalFiring {
    double r_upper = 0.0;
    double r_lower = 0.0;
    double psi_upper = 0.0;
    double psi_lower = 0.0;
};

// Exponentially weighted firing/target co-moments driving the pruning
// decision, plus the consecutive-low-utility streak.
struct UtilityStats {
    double mean_firing = 0.0;
    double mean_target = 0.0;
    double var_firing = 0.0;
    double var_target = 0.0;
    double cov_ft = 0.0;
    int64_t low_streak = 0;

    void observe(double firing, double target, double decay) {
        const double w = 1.0 - decay;
        mean_firing = decay * mean_firing + w * firing;
        mean_target = decay * mean_target + w * target;
        const double df = firing - mean_firing;
        const double dt = target - mean_target;
        var_firing = decay * var_firing + w * df * df;
        var_target = decay * var_target + w * dt * dt;
        cov_ft = decay * cov_ft + w * df * dt;
    }

    // |corr| of firing vs target; 0 when either stream is flat.
    double utility() const {
        constexpr double kTiny = 1e-12;
        if (var_firing < kTiny || var_target < kTiny) return 0.0;
        double c = cov_ft / std::sqrt(var_firing * var_target);
        if (c < 0.0) c = -c;
        return c > 1.0 ? 1.0 : c;
    }

    void reset() { *this = UtilityStats{}; }
};

// One fuzzy rule: interval-valued centroid, shared inverse covariance,
// polynomial consequent and its RLS covariance, recurrent firing memory,
// and the population statistics that make the density recursions one-pass.
struct Rule {
    Vec c_lower;            // lower centroid bound, length p
    Vec c_upper;            // upper centroid bound, length p
    Mat inv_cov;            // p x p inverse covariance, SPD
    Vec sigma;              // per-dimension radii derived from inv_cov diagonal
    Mat weights;            // (2p+1) x m consequent
    Mat rls_cov;            // (2p+1) x (2p+1) RLS covariance, SPD
    double lambda = 0.5;    // recurrent blending weight in [0,1]
    double prev_psi_upper = 0.0;
    double prev_psi_lower = 0.0;
    int64_t n_pop = 1;      // population count
    Vec coord_sum;          // per-dimension sum of absorbed samples
    double sq_sum = 0.0;    // sum of squared norms of absorbed samples
    UtilityStats util;

    int dim() const { return static_cast<int>(c_lower.size()); }
    int n_out() const { return weights.cols; }

    Vec midpoint() const {
        Vec m(c_lower.size());
        for (size_t j = 0; j < m.size(); ++j) m[j] = 0.5 * (c_lower[j] + c_upper[j]);
        return m;
    }
};

}  // namespace rift

#endif

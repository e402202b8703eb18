#ifndef RIFT_FUZZY_HPP
#define RIFT_FUZZY_HPP

#include <span>
#include <vector>

#include "rift/rule.hpp"

namespace rift {
namespace fuzzy {

// Gaussian membership without the conventional 1/2 in the exponent:
// exp(-(x-c)^2 / sigma^2).
double gaussian_mf(double x, double c, double sigma);
double log_gaussian_mf(double x, double c, double sigma);

// Upper/lower membership of a scalar under an interval-valued centroid.
// Upper is 1 inside [c_lower, c_upper] and follows the nearer bound
// outside; lower follows the farther bound, switching at the midpoint.
struct MembershipInterval {
    double upper;
    double lower;
};
MembershipInterval interval_membership(double x, double c_lower, double c_upper, double sigma);

// Per-dimension radii from the inverse covariance diagonal:
// sigma_j = 1/sqrt(inv_cov[j][j]). Throws DegenerateCovariance when a
// diagonal entry is not strictly positive.
Vec extract_radii(const Mat& inv_cov);

// Product t-norm over dimensions, accumulated in log space so high input
// dimension degrades to zero instead of producing garbage.
IntervalFiring spatial_firing(const Rule& rule, const Vec& x);

// Recurrent blend psi = lambda * r + (1 - lambda) * psi_prev, then the
// rule's one-step memory advances to the new psi.
void temporal_firing(Rule& rule, IntervalFiring& firing);

// Spatial firing plus the recurrent blend, without touching the rule.
IntervalFiring tentative_firing(const Rule& rule, const Vec& x);

// [1, A1(x1), A2(x1), ..., A1(xp), A2(xp)] with A1(x) = x, A2(x) = 2x^2 - 1.
// Inputs are expected in [-1, 1]; the caller owns the scaling.
Vec chebyshev_expand(const Vec& x);
inline int extended_dim(int p) { return 2 * p + 1; }

// Everything one sample's inference produced, kept so learning steps can
// reuse it without touching the rules. psi values here are tentative; the
// rules' memories advance only through commit_temporal.
struct SampleCache {
    Vec x;                          // scaled input
    Vec x_ext;                      // Chebyshev expansion
    std::vector<IntervalFiring> firing;  // per rule
    Vec prev_psi_upper;             // memory before this sample, per rule
    Vec prev_psi_lower;
    Mat beta;                       // R x m consequent values
    Vec beta_norm;                  // per-rule L2 norm of beta row
    double sum_psi_upper = 0.0;
    double sum_psi_lower = 0.0;
    Vec upper_mean;                 // per output, psi_upper-weighted mean of beta
    Vec lower_mean;                 // per output
    Vec y;                          // blended output per q
    bool underflow_fallback = false;
    int fallback_rule = -1;

    int n_rules() const { return static_cast<int>(firing.size()); }
};

// Pure inference over the current rule base. Does not modify any rule.
SampleCache evaluate(std::span<const Rule> rules, const Vec& q, const Vec& x, bool parallel = false);

// Advance every rule's temporal memory to the cache's psi values.
void commit_temporal(std::span<Rule> rules, const SampleCache& cache);

// Inference with the temporal side effect: evaluate then commit.
Vec infer(std::span<Rule> rules, const Vec& q, const Vec& x,
          std::vector<IntervalFiring>* firings_out = nullptr);

// Recompute outputs from cached sums for a different q (used by the
// design-factor gradient checks; no rule data needed).
Vec blend_outputs(const SampleCache& cache, const Vec& q);

}  // namespace fuzzy
}  // namespace rift

#endif

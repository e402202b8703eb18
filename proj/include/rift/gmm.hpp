#ifndef RIFT_GMM_HPP
#define RIFT_GMM_HPP

#include <cstdint>
#include <vector>

#include "rift/linalg.hpp"

namespace rift {

// Frozen Gaussian mixture over the (scaled) input space. Immutable once
// fitted; shared freely between threads.
struct GmmDensity {
    int n_comp = 0;
    std::vector<Vec> means;
    std::vector<Mat> covariances;   // p x p, diagonal when produced by fit_gmm
    Vec mixing;                     // positive, sums to 1
    std::vector<double> fit_log_likelihood;  // per-iteration trace of the chosen fit

    bool fitted() const { return n_comp > 0; }
    int dim() const { return n_comp ? static_cast<int>(means[0].size()) : 0; }

    // Mixture density at a point.
    double pdf(const Vec& x) const;
};

struct GmmFitOptions {
    int max_components = 3;
    int max_iter = 100;
    double rel_tol = 1e-8;
    double diag_reg = 1e-6;
    uint64_t seed = 1;
};

// EM fit with k-means++ initialization and BIC selection over component
// counts 1..max_components. Falls back to a single diagonal-covariance
// component when there are fewer than p + 1 samples.
GmmDensity fit_gmm(const std::vector<Vec>& samples, const GmmFitOptions& opt = {});

// Density of (c - mean_m) under a zero-mean Gaussian with covariance
// rule_inv_cov / u + cov_m. Throws DegenerateCovariance when the combined
// covariance is not SPD.
double component_convolution(const Vec& c, const Mat& rule_inv_cov, double u,
                             const GmmDensity& gmm, int comp_index);

}  // namespace rift

#endif

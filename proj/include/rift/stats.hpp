#ifndef RIFT_STATS_HPP
#define RIFT_STATS_HPP

#include "rift/linalg.hpp"

namespace rift {
namespace stats {

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Chi-square CDF with k degrees of freedom.
double chi2_cdf(double x, int k);

// Inverse chi-square CDF (quantile), bisection on chi2_cdf.
double chi2_quantile(double prob, int k);

// Multivariate normal log density at displacement d with zero mean.
// Throws DegenerateCovariance when cov is not SPD.
double mvn_log_pdf(const Vec& d, const Mat& cov);
double mvn_pdf(const Vec& d, const Mat& cov);

}  // namespace stats
}  // namespace rift

#endif

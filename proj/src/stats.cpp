#include "rift/stats.hpp"

#include <cmath>

namespace rift {
namespace stats {

namespace {

constexpr int kMaxIter = 300;
constexpr double kEps = 1e-14;

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), valid for x >= a + 1.
double gamma_q_cont_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cont_fraction(a, x);
}

double chi2_cdf(double x, int k) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * k, 0.5 * x);
}

double chi2_quantile(double prob, int k) {
    if (prob <= 0.0) return 0.0;
    if (prob >= 1.0) throw Error("chi2_quantile: prob must be in (0,1)");
    double lo = 0.0;
    double hi = static_cast<double>(k);
    while (chi2_cdf(hi, k) < prob) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, k) < prob)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

double mvn_log_pdf(const Vec& d, const Mat& cov) {
    const int p = cov.rows;
    Mat lower;
    if (!linalg::cholesky(cov, lower))
        throw DegenerateCovariance("mvn_log_pdf: covariance not positive definite");
    const Vec solved = linalg::cholesky_solve(lower, d);
    const double maha = linalg::dot(d, solved);
    const double log_det = linalg::log_det_from_cholesky(lower);
    constexpr double kLog2Pi = 1.8378770664093454836;
    return -0.5 * (p * kLog2Pi + log_det + maha);
}

double mvn_pdf(const Vec& d, const Mat& cov) { return std::exp(mvn_log_pdf(d, cov)); }

}  // namespace stats
}  // namespace rift

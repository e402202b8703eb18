#include "rift/linalg.hpp"

#include <cmath>
#include <cstddef>

namespace rift {
namespace linalg {

double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double squared_norm(const Vec& x) { return dot(x, x); }

double squared_distance(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

Vec matvec(const Mat& m, const Vec& x) {
    Vec out(static_cast<size_t>(m.rows), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

double quadratic_form(const Mat& a, const Vec& d) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < a.cols; ++j) row += a(i, j) * d[j];
        s += d[i] * row;
    }
    return s;
}

void symmetrize(Mat& m) {
    for (int i = 0; i < m.rows; ++i)
        for (int j = i + 1; j < m.cols; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
}

bool cholesky(const Mat& a, Mat& lower) {
    const int n = a.rows;
    if (n != a.cols) return false;
    lower = Mat(n, n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (!(s > 0.0) || !std::isfinite(s)) return false;
                lower(i, i) = std::sqrt(s);
            } else {
                lower(i, j) = s / lower(j, j);
            }
        }
    }
    return true;
}

double log_det_from_cholesky(const Mat& lower) {
    double s = 0.0;
    for (int i = 0; i < lower.rows; ++i) s += std::log(lower(i, i));
    return 2.0 * s;
}

Vec cholesky_solve(const Mat& lower, const Vec& b) {
    const int n = lower.rows;
    Vec y(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= lower(i, k) * y[k];
        y[i] = s / lower(i, i);
    }
    Vec x(static_cast<size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= lower(k, i) * x[k];
        x[i] = s / lower(i, i);
    }
    return x;
}

Mat cholesky_inverse(const Mat& lower) {
    const int n = lower.rows;
    Mat inv(n, n, 0.0);
    Vec e(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vec col = cholesky_solve(lower, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    symmetrize(inv);
    return inv;
}

Mat invert_spd(const Mat& a, const char* what) {
    Mat lower;
    if (!cholesky(a, lower))
        throw DegenerateCovariance(std::string(what) + ": not positive definite");
    return cholesky_inverse(lower);
}

double spd_determinant(const Mat& a, const char* what) {
    Mat lower;
    if (!cholesky(a, lower))
        throw DegenerateCovariance(std::string(what) + ": not positive definite");
    return std::exp(log_det_from_cholesky(lower));
}

}  // namespace linalg
}  // namespace rift

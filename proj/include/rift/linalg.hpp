#ifndef RIFT_LINALG_HPP
#define RIFT_LINALG_HPP

#include <cstddef>
#include <vector>

#include "rift/errors.hpp"

namespace rift {

using Vec = std::vector<double>;

// Small dense row-major matrix. All matrices in this project are tiny
// (p x p premise covariances, (2p+1)^2 consequent covariances), so no
// attempt is made at blocking or expression templates.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n, double scale = 1.0) {
        Mat m(n, n, 0.0);
        for (int i = 0; i < n; ++i) m(i, i) = scale;
        return m;
    }

    double trace() const {
        double s = 0.0;
        for (int i = 0; i < rows && i < cols; ++i) s += (*this)(i, i);
        return s;
    }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

namespace linalg {

double dot(const Vec& x, const Vec& y);
double squared_norm(const Vec& x);
double squared_distance(const Vec& x, const Vec& y);

Vec matvec(const Mat& m, const Vec& x);
// x'Ay for symmetric use; quadratic_form(A, d) = d'Ad
double quadratic_form(const Mat& a, const Vec& d);

void symmetrize(Mat& m);

// In-place Cholesky factorization A = LL'. Returns false when A is not
// numerically positive definite; A is left clobbered in that case.
bool cholesky(const Mat& a, Mat& lower);

// log det(A) from its Cholesky factor.
double log_det_from_cholesky(const Mat& lower);

// Solve LL'x = b.
Vec cholesky_solve(const Mat& lower, const Vec& b);

// Full inverse from the factor.
Mat cholesky_inverse(const Mat& lower);

// Convenience: invert an SPD matrix, throwing DegenerateCovariance on failure.
Mat invert_spd(const Mat& a, const char* what = "matrix");

// det(A) for SPD A via Cholesky; throws DegenerateCovariance on failure.
double spd_determinant(const Mat& a, const char* what = "matrix");

}  // namespace linalg
}  // namespace rift

#endif

#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "rift/gmm.hpp"

using namespace rift;

TEST_CASE("single-component fit on standard normal draws") {
    Rng rng(61);
    std::vector<Vec> xs;
    for (int i = 0; i < 30; ++i) xs.push_back({rng.normal()});
    GmmFitOptions opt;
    opt.seed = 9;
    const GmmDensity g = fit_gmm(xs, opt);
    CHECK(g.n_comp == 1);
    CHECK(std::fabs(g.means[0][0]) < 0.5);
    CHECK(std::fabs(g.covariances[0](0, 0) - 1.0) < 0.5);
}

TEST_CASE("identical points collapse to one regularized component") {
    std::vector<Vec> xs(30, Vec{1.5, -2.0});
    const GmmDensity g = fit_gmm(xs);
    CHECK(g.n_comp == 1);
    CHECK(g.covariances[0](0, 0) == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(g.covariances[0](1, 1) == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(g.mixing[0] == doctest::Approx(1.0));
}

TEST_CASE("two well-separated blobs select two components") {
    Rng rng(67);
    std::vector<Vec> xs;
    for (int i = 0; i < 15; ++i) xs.push_back({10.0 + rng.normal()});
    for (int i = 0; i < 15; ++i) xs.push_back({-10.0 + rng.normal()});
    const GmmDensity g = fit_gmm(xs);
    REQUIRE(g.n_comp == 2);
    const double lo = std::min(g.means[0][0], g.means[1][0]);
    const double hi = std::max(g.means[0][0], g.means[1][0]);
    CHECK(std::fabs(lo + 10.0) < 1.0);
    CHECK(std::fabs(hi - 10.0) < 1.0);
}

TEST_CASE("mixing coefficients sum to one and the likelihood never drops") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec> xs;
        for (int i = 0; i < 40; ++i)
            xs.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3)});
        GmmFitOptions opt;
        opt.seed = 100 + static_cast<uint64_t>(trial);
        const GmmDensity g = fit_gmm(xs, opt);
        double total = 0.0;
        for (double a : g.mixing) {
            CHECK(a > 0.0);
            total += a;
        }
        CHECK(std::fabs(total - 1.0) < 1e-12);
        for (size_t it = 1; it < g.fit_log_likelihood.size(); ++it)
            CHECK(g.fit_log_likelihood[it] - g.fit_log_likelihood[it - 1] >= -1e-9);
    }
}

TEST_CASE("too few rows fall back to one diagonal component") {
    std::vector<Vec> xs{{1.0, 2.0, 3.0, 4.0}, {2.0, 3.0, 4.0, 5.0}, {0.0, 1.0, 2.0, 3.0}};
    const GmmDensity g = fit_gmm(xs);  // 3 rows < p + 1 = 5
    CHECK(g.n_comp == 1);
    CHECK(g.mixing == Vec{1.0});
}

TEST_CASE("component convolution against direct density evaluation") {
    // combined covariance of exactly 1: inv/u + cov_m = 2*0.25/... pick inv=1, u=2, cov_m=0.5
    GmmDensity g;
    g.n_comp = 1;
    g.means = {Vec{0.3}};
    g.covariances = {Mat(1, 1, 0.5)};
    g.mixing = {1.0};
    const Mat inv = Mat::identity(1, 1.0);
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    CHECK(component_convolution({0.3}, inv, 2.0, g, 0) ==
          doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));

    // Gaussian tail vanishes far away
    CHECK(component_convolution({40.0}, inv, 2.0, g, 0) < 1e-30);

    // 2-D random instances vs the explicit-formula oracle
    Rng rng(73);
    for (int trial = 0; trial < 50; ++trial) {
        GmmDensity g2;
        g2.n_comp = 1;
        g2.means = {Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)}};
        g2.covariances = {oracles::random_spd(rng, 2)};
        g2.mixing = {1.0};
        const Mat rule_inv = oracles::random_spd(rng, 2);
        const double u = 2.0;
        const Vec c{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Mat combined(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) combined(i, j) = rule_inv(i, j) / u + g2.covariances[0](i, j);
        const Vec d{c[0] - g2.means[0][0], c[1] - g2.means[0][1]};
        CHECK(component_convolution(c, rule_inv, u, g2, 0) ==
              doctest::Approx(oracles::mvn_pdf_2d(d, combined)).epsilon(1e-10));
    }

    CHECK_THROWS_AS(component_convolution({0.0}, inv, 2.0, g, 5), Error);

    // a non-SPD combined covariance propagates the degeneracy
    GmmDensity bad;
    bad.n_comp = 1;
    bad.means = {Vec{0.0}};
    bad.covariances = {Mat(1, 1, -3.0)};
    bad.mixing = {1.0};
    CHECK_THROWS_AS(component_convolution({0.0}, Mat::identity(1), 2.0, bad, 0),
                    DegenerateCovariance);
}

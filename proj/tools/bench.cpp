// Benchmark of the per-rule kernels: serial reference vs OpenMP, plus an
// end-to-end engine pass. Build with -fopenmp to see parallel numbers.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rift/engine.hpp"
#include "rift/kernels.hpp"
#include "rift/rng.hpp"
#include "rift/stream.hpp"

using namespace rift;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Rule random_rule(Rng& rng, int p, int m) {
    Rule r;
    r.c_lower.resize(static_cast<size_t>(p));
    r.c_upper.resize(static_cast<size_t>(p));
    for (int j = 0; j < p; ++j) {
        const double c = rng.uniform(-1.0, 1.0);
        r.c_lower[static_cast<size_t>(j)] = c - 0.1;
        r.c_upper[static_cast<size_t>(j)] = c + 0.1;
    }
    r.inv_cov = Mat::identity(p, rng.uniform(0.5, 4.0));
    r.sigma = fuzzy::extract_radii(r.inv_cov);
    const int ne = fuzzy::extended_dim(p);
    r.weights = Mat(ne, m);
    for (double& w : r.weights.a) w = rng.normal();
    r.rls_cov = Mat::identity(ne, 1e5);
    r.lambda = rng.uniform(0.2, 1.0);
    r.prev_psi_upper = rng.uniform(0.5, 1.0);
    r.prev_psi_lower = r.prev_psi_upper * rng.uniform(0.0, 1.0);
    r.n_pop = 10;
    r.coord_sum.assign(static_cast<size_t>(p), 0.0);
    r.sq_sum = 0.0;
    return r;
}

GmmDensity random_density(Rng& rng, int p, int comps) {
    GmmDensity g;
    g.n_comp = comps;
    for (int c = 0; c < comps; ++c) {
        Vec mean(static_cast<size_t>(p));
        for (double& v : mean) v = rng.uniform(-1.0, 1.0);
        g.means.push_back(std::move(mean));
        g.covariances.push_back(Mat::identity(p, rng.uniform(0.05, 0.5)));
        g.mixing.push_back(1.0);
    }
    for (double& a : g.mixing) a /= comps;
    return g;
}

template <typename F>
double time_loop(int reps, F&& fn) {
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    return seconds_since(t0);
}

void bench_kernels(int n_rules, int p, int reps) {
    Rng rng(42);
    const int m = 1;
    std::vector<Rule> rules;
    for (int i = 0; i < n_rules; ++i) rules.push_back(random_rule(rng, p, m));
    Vec x(static_cast<size_t>(p));
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const Vec x_ext = fuzzy::chebyshev_expand(x);
    const GmmDensity gmm = random_density(rng, p, 3);

    std::vector<IntervalFiring> firing(rules.size());
    Mat beta;
    Vec beta_norm;
    Vec scores(rules.size(), 0.0);
    Vec target{0.5};
    Vec weights(rules.size(), 1.0 / n_rules);

    std::printf("R=%d p=%d reps=%d\n", n_rules, p, reps);

    const double t_fire_s = time_loop(reps, [&] { kernels::firing_pass_serial(rules, x, firing); });
    const double t_fire_p =
        time_loop(reps, [&] { kernels::firing_pass_parallel(rules, x, firing); });
    std::printf("  firing        serial %8.3f ms  parallel %8.3f ms  x%.2f\n", 1e3 * t_fire_s,
                1e3 * t_fire_p, t_fire_s / t_fire_p);

    const double t_beta_s =
        time_loop(reps, [&] { kernels::consequent_pass_serial(rules, x_ext, beta, beta_norm); });
    const double t_beta_p =
        time_loop(reps, [&] { kernels::consequent_pass_parallel(rules, x_ext, beta, beta_norm); });
    std::printf("  consequent    serial %8.3f ms  parallel %8.3f ms  x%.2f\n", 1e3 * t_beta_s,
                1e3 * t_beta_p, t_beta_s / t_beta_p);

    const double t_sig_s = time_loop(
        reps, [&] { kernels::significance_pass_serial(rules, beta_norm, 0.5, gmm, 2.0, scores); });
    const double t_sig_p = time_loop(
        reps, [&] { kernels::significance_pass_parallel(rules, beta_norm, 0.5, gmm, 2.0, scores); });
    std::printf("  significance  serial %8.3f ms  parallel %8.3f ms  x%.2f\n", 1e3 * t_sig_s,
                1e3 * t_sig_p, t_sig_s / t_sig_p);

    const double t_rls_s = time_loop(
        reps, [&] { kernels::rls_pass_serial(rules, x_ext, target, weights, 1e-7); });
    const double t_rls_p = time_loop(
        reps, [&] { kernels::rls_pass_parallel(rules, x_ext, target, weights, 1e-7); });
    std::printf("  rls           serial %8.3f ms  parallel %8.3f ms  x%.2f\n", 1e3 * t_rls_s,
                1e3 * t_rls_p, t_rls_s / t_rls_p);
}

void bench_batch_predict(int64_t n_queries) {
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kClusters;
    gopt.n = 600;
    gopt.seed = 7;
    gopt.dims = 2;
    const stream::GeneratedStream s = stream::gen_stream(gopt);

    EngineConfig cfg;
    Engine engine(cfg);
    Vec x(2), t(1);
    for (const Vec& row : s.rows) {
        x[0] = row[0];
        x[1] = row[1];
        t[0] = row[2];
        engine.process(x, t);
    }

    Rng rng(5);
    std::vector<Vec> queries;
    queries.reserve(static_cast<size_t>(n_queries));
    for (int64_t i = 0; i < n_queries; ++i)
        queries.push_back({rng.uniform(-8, 8), rng.uniform(-8, 8)});

    engine.state().config.parallel = false;
    auto t0 = Clock::now();
    auto serial = engine.predict_batch(queries);
    const double t_serial = seconds_since(t0);

    engine.state().config.parallel = true;
    t0 = Clock::now();
    auto parallel = engine.predict_batch(queries);
    const double t_parallel = seconds_since(t0);

    bool identical = serial.size() == parallel.size();
    for (size_t i = 0; identical && i < serial.size(); ++i) identical = serial[i] == parallel[i];

    std::printf(
        "batch predict %lld queries (R=%d): serial %8.3f ms  parallel %8.3f ms  x%.2f  %s\n",
        static_cast<long long>(n_queries), engine.state().rule_count(), 1e3 * t_serial,
        1e3 * t_parallel, t_serial / t_parallel, identical ? "outputs identical" : "OUTPUTS DIFFER");
}

void bench_engine(int64_t n, bool parallel) {
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kClusters;
    gopt.n = n;
    gopt.seed = 9;
    gopt.dims = 6;
    const stream::GeneratedStream s = stream::gen_stream(gopt);

    EngineConfig cfg;
    cfg.parallel = parallel;
    Engine engine(cfg);
    Vec x(static_cast<size_t>(gopt.dims)), t(1);
    const auto t0 = Clock::now();
    for (const Vec& row : s.rows) {
        for (int j = 0; j < gopt.dims; ++j) x[static_cast<size_t>(j)] = row[static_cast<size_t>(j)];
        t[0] = row.back();
        engine.process(x, t);
    }
    const double el = seconds_since(t0);
    std::printf("engine %s: %lld samples in %.3f s (%.1f us/sample), final rules %d\n",
                parallel ? "parallel" : "serial  ", static_cast<long long>(n), el,
                1e6 * el / static_cast<double>(n), engine.state().rule_count());
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; parallel paths run serially\n");
#endif
    bench_kernels(8, 4, 20000);
    bench_kernels(64, 8, 5000);
    bench_kernels(100, 16, 2000);
    bench_batch_predict(200000);
    bench_engine(5000, false);
    bench_engine(5000, true);
    return 0;
}

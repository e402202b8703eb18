// Acceptance suite: one case per release criterion, each printing a
// [PASS]/[FAIL] line. Tolerances are pinned here, not configurable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rift/adaptation.hpp"
#include "rift/engine.hpp"
#include "rift/fuzzy.hpp"
#include "rift/gate.hpp"
#include "rift/stream.hpp"

using namespace rift;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool ok;
    std::string detail;
};

void report(int criterion, const char* name, const Verdict& v) {
    std::printf("[%s] criterion %2d: %s (%s)\n", v.ok ? "PASS" : "FAIL", criterion, name,
                v.detail.c_str());
    std::fflush(stdout);
}

std::vector<SampleTrace> drive(Engine& engine, const stream::GeneratedStream& s) {
    std::vector<SampleTrace> traces;
    const size_t p = s.columns.size() - 1;
    Vec x(p), t(1);
    for (const Vec& row : s.rows) {
        for (size_t j = 0; j < p; ++j) x[j] = row[j];
        t[0] = row.back();
        traces.push_back(engine.process(x, t));
    }
    return traces;
}

double scored_rmse(const std::vector<SampleTrace>& traces, size_t from = 0) {
    double sse = 0.0;
    int64_t n = 0;
    for (size_t i = from; i < traces.size(); ++i) {
        const SampleTrace& t = traces[i];
        if (t.prediction_valid && !t.warmup) {
            sse += t.error[0] * t.error[0];
            ++n;
        }
    }
    return n ? std::sqrt(sse / static_cast<double>(n)) : 0.0;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

TEST_CASE("criterion 1: interval ordering over random rules and samples") {
    const auto t0 = Clock::now();
    Rng rng(1001);
    int64_t violations = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        const int p = 1 + static_cast<int>(rng.index(5));
        Rule r = oracles::random_rule(rng, p, 1);
        Vec x(static_cast<size_t>(p));
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        for (int j = 0; j < p; ++j) {
            const auto mu =
                fuzzy::interval_membership(x[static_cast<size_t>(j)], r.c_lower[static_cast<size_t>(j)],
                                           r.c_upper[static_cast<size_t>(j)], r.sigma[static_cast<size_t>(j)]);
            if (!(mu.lower <= mu.upper)) ++violations;
        }
        const IntervalFiring f = fuzzy::spatial_firing(r, x);
        if (!(f.r_lower <= f.r_upper)) ++violations;
    }
    const double elapsed = seconds_since(t0);
    const Verdict v{violations == 0 && elapsed < 5.0,
                    "violations=" + std::to_string(violations) + ", " + fmt(elapsed) + " s"};
    report(1, "interval ordering, 1e5 pairs", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 2: recursive accumulators match brute force on every prefix") {
    Rng rng(1002);
    double worst_density = 0.0;
    double worst_parzen = 0.0;

    // density recursion
    std::vector<Vec> seen;
    Rule rule;
    rule.c_lower = {0.0, 0.0};
    rule.c_upper = {0.0, 0.0};
    rule.inv_cov = Mat::identity(2);
    rule.sigma = {1.0, 1.0};
    rule.weights = Mat(5, 1, 0.0);
    rule.rls_cov = Mat::identity(5, 1e5);
    rule.n_pop = 0;
    rule.coord_sum = {0.0, 0.0};
    rule.sq_sum = 0.0;

    ZedmState zedm;
    std::vector<double> errors;

    for (int n = 0; n < 1000; ++n) {
        const Vec x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        rule.n_pop += 1;
        rule.coord_sum[0] += x[0];
        rule.coord_sum[1] += x[1];
        rule.sq_sum += linalg::squared_norm(x);
        seen.push_back(x);
        const Vec query{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        worst_density = std::max(worst_density,
                                 std::fabs(gate::local_density(rule, query) -
                                           oracles::brute_force_mean_sq_distance(seen, query)));

        const double e = rng.normal() * 1.5;
        errors.push_back(e);
        adaptation::error_density_zero(zedm, e);
        double brute = 0.0;
        for (double ev : errors) brute += std::exp(-0.5 * ev * ev);
        worst_parzen = std::max(worst_parzen, std::fabs(zedm.accum - brute));
    }
    const Verdict v{worst_density < 1e-9 && worst_parzen < 1e-9,
                    "density err=" + fmt(worst_density) + ", parzen err=" + fmt(worst_parzen)};
    report(2, "one-pass recursions vs brute force", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 3: inverse-covariance recursion vs explicit re-inversion") {
    Rng rng(1003);
    double worst = 0.0;
    for (int p : {2, 5}) {
        Rule r = oracles::random_rule(rng, p, 1);
        r.n_pop = 2;
        Mat cov = linalg::invert_spd(r.inv_cov);
        for (int step = 0; step < 100; ++step) {
            Vec x(static_cast<size_t>(p));
            for (double& v : x) v = rng.uniform(-1.0, 1.0);
            const Vec mid = r.midpoint();
            const double alpha = 1.0 / (static_cast<double>(r.n_pop) + 1.0);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j)
                    cov(i, j) = (1.0 - alpha) * cov(i, j) +
                                alpha * (x[static_cast<size_t>(i)] - mid[static_cast<size_t>(i)]) *
                                    (x[static_cast<size_t>(j)] - mid[static_cast<size_t>(j)]);
            rule_manager::update_premise(r, x);
            const Mat direct = linalg::invert_spd(cov);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    const double scale = std::max(1.0, std::fabs(direct(i, j)));
                    worst = std::max(worst, std::fabs(r.inv_cov(i, j) - direct(i, j)) / scale);
                }
        }
    }
    const Verdict v{worst < 1e-6, "max relative deviation=" + fmt(worst)};
    report(3, "rank-one inverse update consistency (p=2,5)", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 4: analytic design gradients vs central differences") {
    Rng rng(1004);
    const double h = 1e-6;
    double worst = 0.0;
    int models = 0;
    while (models < 100) {
        const int p = 1 + static_cast<int>(rng.index(3));
        const int n_rules = 1 + static_cast<int>(rng.index(5));
        std::vector<Rule> rules;
        for (int i = 0; i < n_rules; ++i) rules.push_back(oracles::random_rule(rng, p, 1));
        Vec x(static_cast<size_t>(p));
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        Vec q{rng.uniform(0.05, 0.95)};
        const Vec target{rng.normal()};

        const fuzzy::SampleCache cache = fuzzy::evaluate(rules, q, x);
        if (cache.underflow_fallback) continue;
        ++models;
        const Vec err{cache.y[0] - target[0]};
        const adaptation::DesignGradients g = adaptation::design_gradients(cache, q, err);

        auto e_of_q = [&](double qv) {
            const Vec y = fuzzy::blend_outputs(cache, {qv});
            return 0.5 * (y[0] - target[0]) * (y[0] - target[0]);
        };
        const double fd_q = (e_of_q(q[0] + h) - e_of_q(q[0] - h)) / (2.0 * h);
        if (std::fabs(fd_q) > 1e-8)
            worst = std::max(worst, std::fabs(g.d_q[0] - fd_q) / std::fabs(fd_q));

        for (size_t i = 0; i < rules.size(); ++i) {
            auto e_of_l = [&](double lv) {
                std::vector<Rule> copy = rules;
                copy[i].lambda = lv;
                const fuzzy::SampleCache c = fuzzy::evaluate(copy, q, x);
                return 0.5 * (c.y[0] - target[0]) * (c.y[0] - target[0]);
            };
            const double l = rules[i].lambda;
            const double fd_l = (e_of_l(l + h) - e_of_l(l - h)) / (2.0 * h);
            if (std::fabs(fd_l) > 1e-8)
                worst = std::max(worst, std::fabs(g.d_lambda[i] - fd_l) / std::fabs(fd_l));
        }
    }
    const Verdict v{worst < 1e-4, "max relative error=" + fmt(worst)};
    report(4, "gradient checks on 100 random models", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 5: type-1 degeneracy") {
    // an engine run with zero interval width and frozen lambda = 1
    EngineConfig cfg;
    cfg.delta = 0.0;
    cfg.lambda_init = 1.0;
    cfg.eta_lambda = 0.0;
    cfg.gate_enabled = false;
    Engine engine(cfg);
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kClusters;
    gopt.n = 300;
    gopt.seed = 7;
    drive(engine, stream::gen_stream(gopt));

    double worst_q_gap = 0.0;
    double worst_ref_gap = 0.0;
    Rng rng(1005);
    ModelState& st = engine.state();
    std::vector<Vec> centers, sigmas, weights;
    for (const Rule& r : st.rules) {
        centers.push_back(r.midpoint());
        sigmas.push_back(r.sigma);
        Vec w(static_cast<size_t>(r.weights.rows));
        for (int k = 0; k < r.weights.rows; ++k) w[static_cast<size_t>(k)] = r.weights(k, 0);
        weights.push_back(w);
    }
    for (int trial = 0; trial < 200; ++trial) {
        const Vec x{rng.uniform(-7, 7), rng.uniform(-7, 7)};
        const Vec xs = st.scaler.scale(x);
        st.q = {0.0};
        const double y0 = engine.predict(x)[0];
        st.q = {1.0};
        const double y1 = engine.predict(x)[0];
        worst_q_gap = std::max(worst_q_gap, std::fabs(y0 - y1));
        const double ref =
            oracles::reference_tsk(centers, sigmas, weights, xs, fuzzy::chebyshev_expand(xs));
        worst_ref_gap = std::max(worst_ref_gap, std::fabs(y0 - ref));
    }
    const Verdict v{worst_q_gap < 1e-12 && worst_ref_gap < 1e-9,
                    "q gap=" + fmt(worst_q_gap) + ", reference gap=" + fmt(worst_ref_gap)};
    report(5, "zero footprint + lambda 1 collapses to type-1", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 6: rule discovery and accuracy on the three-cluster fixture") {
    const auto t0 = Clock::now();
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kClusters;
    gopt.n = 600;
    gopt.seed = 7;
    gopt.dims = 2;
    gopt.noise = 0.05;
    const stream::GeneratedStream s = stream::gen_stream(gopt);

    Engine engine;
    const auto traces = drive(engine, s);
    const double engine_rmse = scored_rmse(traces);
    const int final_rules = engine.state().rule_count();

    // sliding-window least-squares baseline, same predict-then-train order
    oracles::SlidingWindowLs baseline(50);
    double sse = 0.0;
    int64_t n = 0;
    for (size_t i = 0; i < s.rows.size(); ++i) {
        const Vec x{s.rows[i][0], s.rows[i][1]};
        const double t = s.rows[i][2];
        if (i >= 30 && baseline.ready()) {
            const double e = baseline.predict(x) - t;
            sse += e * e;
            ++n;
        }
        baseline.train(x, t);
    }
    const double baseline_rmse = std::sqrt(sse / static_cast<double>(n));
    const double elapsed = seconds_since(t0);

    const bool ok = final_rules >= 3 && final_rules <= 8 && engine_rmse < 1.5 * baseline_rmse &&
                    elapsed < 10.0;
    const Verdict v{ok, "rules=" + std::to_string(final_rules) + ", rmse=" + fmt(engine_rmse) +
                            " vs baseline " + fmt(baseline_rmse) + ", " + fmt(elapsed) + " s"};
    report(6, "three-cluster discovery beats a sliding linear fit", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 7: the gate skips redundant samples without losing accuracy") {
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kRedundantDuplicates;
    gopt.n = 2000;
    gopt.seed = 11;
    gopt.dims = 2;
    gopt.noise = 0.5;
    const stream::GeneratedStream s = stream::gen_stream(gopt);

    EngineConfig gated;
    Engine with_gate(gated);
    const auto traces_gated = drive(with_gate, s);
    const double rmse_gated = scored_rmse(traces_gated);
    const double fraction = static_cast<double>(with_gate.state().counters.accepted) /
                            static_cast<double>(with_gate.state().counters.seen);

    EngineConfig open = gated;
    open.gate_enabled = false;
    Engine learn_all(open);
    const double rmse_all = scored_rmse(drive(learn_all, s));

    const bool ok = fraction < 0.6 && rmse_gated <= 1.10 * rmse_all;
    const Verdict v{ok, "used=" + fmt(100.0 * fraction) + "%, rmse=" + fmt(rmse_gated) +
                            " vs learn-everything " + fmt(rmse_all)};
    report(7, "active learning on redundant duplicates", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 8: recall never inflates the rule base on cyclic drift") {
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kCyclicAba;
    gopt.n = 1800;
    gopt.seed = 33;
    gopt.dims = 2;
    gopt.noise = 0.1;
    const stream::GeneratedStream s = stream::gen_stream(gopt);

    auto run = [&](bool recall) {
        EngineConfig cfg;
        cfg.recall_enabled = recall;
        cfg.n_history = 1300;  // density forms once the cycle has shown both regimes
        Engine engine(cfg);
        const auto traces = drive(engine, s);
        double sse = 0.0;
        int64_t n = 0;
        for (size_t i = 1200; i < traces.size(); ++i)
            if (traces[i].prediction_valid) {
                sse += traces[i].error[0] * traces[i].error[0];
                ++n;
            }
        return std::pair<int64_t, double>(engine.state().counters.grown,
                                          std::sqrt(sse / static_cast<double>(n)));
    };

    const auto [created_with, rmse_with] = run(true);
    const auto [created_without, rmse_without] = run(false);
    const bool ok = created_with <= created_without && rmse_with <= rmse_without;
    const Verdict v{ok, "created " + std::to_string(created_with) + " vs " +
                            std::to_string(created_without) + ", final-third rmse " +
                            fmt(rmse_with) + " vs " + fmt(rmse_without)};
    report(8, "cyclic recall pair", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 9: decay-free consequent learning recovers the line") {
    EngineConfig cfg;
    cfg.gate_enabled = false;
    cfg.growth_enabled = false;
    cfg.pruning_enabled = false;
    cfg.weight_decay = 0.0;
    Engine engine(cfg);

    Rng rng(1009);
    std::vector<Vec> rows;
    Vec targets;
    // the oracle fits exactly the stream the engine consumed, i.e. the
    // samples after the online scaling
    OnlineScaler mirror;
    std::vector<double> xs{-1.0, 1.0};
    for (int i = 0; i < 198; ++i) xs.push_back(rng.uniform(-1.0, 1.0));
    for (double x : xs) {
        const double y = 2.0 * x;
        engine.process({x}, {y});
        mirror.observe({x});
        rows.push_back(fuzzy::chebyshev_expand(mirror.scale({x})));
        targets.push_back(y);
    }
    REQUIRE(engine.state().rule_count() == 1);
    const double engine_slope = engine.state().rules[0].weights(1, 0);
    const Vec ls = oracles::batch_least_squares(rows, targets);
    const bool ok = std::fabs(engine_slope - ls[1]) < 1e-5 && std::fabs(engine_slope - 2.0) < 0.01;
    const Verdict v{ok, "slope=" + fmt(engine_slope) + ", batch LS=" + fmt(ls[1])};
    report(9, "single-rule RLS matches batch least squares", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 10: live state is bounded by structure, not stream length") {
    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kClusters;
    gopt.n = 10000;
    gopt.seed = 17;
    gopt.dims = 2;
    const stream::GeneratedStream s = stream::gen_stream(gopt);

    EngineConfig cfg;
    cfg.rule_cap = 10;
    Engine engine(cfg);
    Vec x(2), t(1);
    size_t size_1k = 0;
    int rules_1k = 0, archived_1k = 0;
    for (size_t i = 0; i < s.rows.size(); ++i) {
        x[0] = s.rows[i][0];
        x[1] = s.rows[i][1];
        t[0] = s.rows[i][2];
        engine.process(x, t);
        if (i + 1 == 1000) {
            size_1k = engine.snapshot().size();
            rules_1k = engine.state().rule_count();
            archived_1k = engine.state().archive.size();
        }
    }
    const size_t size_10k = engine.snapshot().size();
    const int rules_10k = engine.state().rule_count();
    const int archived_10k = engine.state().archive.size();

    // Fit the exact per-structure byte costs from tiny reference states,
    // then predict both sizes. Counters are fixed width, so stream length
    // must not appear at all.
    Engine probe;
    probe.process({0.0, 0.0}, {0.0});
    const size_t base = probe.snapshot().size();
    Rule extra = probe.state().rules[0];
    probe.state().rules.push_back(extra);
    const size_t rule_bytes = probe.snapshot().size() - base;
    probe.state().archive.push(extra, 1);
    const size_t arch_bytes = probe.snapshot().size() - base - rule_bytes;

    // density adds a fixed block once fitted; difference it out via the 1k state
    const long long predicted_delta =
        static_cast<long long>(rules_10k - rules_1k) * static_cast<long long>(rule_bytes) +
        static_cast<long long>(archived_10k - archived_1k) * static_cast<long long>(arch_bytes);
    const long long actual_delta = static_cast<long long>(size_10k) - static_cast<long long>(size_1k);

    const bool ok = actual_delta == predicted_delta;
    const Verdict v{ok, "size@1k=" + std::to_string(size_1k) + ", size@10k=" +
                            std::to_string(size_10k) + ", delta=" + std::to_string(actual_delta) +
                            ", structural=" + std::to_string(predicted_delta)};
    report(10, "bounded memory across 10x stream growth", v);
    CHECK(v.ok);
}

TEST_CASE("criterion 11: runs are reproducible byte for byte") {
    const std::string dir =
        (std::filesystem::temp_directory_path() / "rift_acceptance_det").string();
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    stream::GenOptions gopt;
    gopt.kind = stream::StreamKind::kAbruptDrift;
    gopt.n = 800;
    gopt.seed = 29;
    stream::write_stream_csv(stream::gen_stream(gopt), dir + "/stream.csv");

    auto run_once = [&](const std::string& out) {
        stream::RunOptions opt;
        opt.target_columns = {"y"};
        opt.engine.seed = 5;
        opt.engine.parallel = true;  // kernels must not break determinism
        const stream::RunReport report = stream::run_stream_file(dir + "/stream.csv", opt);
        stream::emit_metrics(report, out);
        return report.final_snapshot;
    };

    const auto snap_a = run_once(dir + "/a");
    const auto snap_b = run_once(dir + "/b");

    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    const bool snapshots_equal = snap_a == snap_b;
    const bool metrics_equal = slurp(dir + "/a/metrics.jsonl") == slurp(dir + "/b/metrics.jsonl");
    const bool summary_equal = slurp(dir + "/a/summary.json") == slurp(dir + "/b/summary.json");

    const bool ok = snapshots_equal && metrics_equal && summary_equal;
    const Verdict v{ok, std::string("snapshot ") + (snapshots_equal ? "identical" : "differs") +
                            ", metrics " + (metrics_equal ? "identical" : "differ") + ", summary " +
                            (summary_equal ? "identical" : "differs")};
    report(11, "determinism of snapshots and metrics", v);
    CHECK(v.ok);
}

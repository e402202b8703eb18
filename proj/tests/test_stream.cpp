#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rift/engine.hpp"
#include "rift/fuzzy.hpp"
#include "rift/stream.hpp"

using namespace rift;
using namespace rift::stream;

namespace {

std::string temp_dir() {
    static int counter = 0;
    const std::string dir =
        (std::filesystem::temp_directory_path() / ("rift_test_" + std::to_string(counter++))).string();
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out);
    out << content;
}

}  // namespace

TEST_CASE("generated streams are reproducible byte for byte") {
    const std::string dir = temp_dir();
    GenOptions opt;
    opt.kind = StreamKind::kGradualDrift;
    opt.n = 200;
    opt.seed = 42;
    write_stream_csv(gen_stream(opt), dir + "/a.csv");
    write_stream_csv(gen_stream(opt), dir + "/b.csv");
    CHECK(slurp(dir + "/a.csv") == slurp(dir + "/b.csv"));
    CHECK(slurp(dir + "/a.csv.regimes.csv") == slurp(dir + "/b.csv.regimes.csv"));
}

TEST_CASE("cyclic stream visits its regimes in equal thirds") {
    GenOptions opt;
    opt.kind = StreamKind::kCyclicAba;
    opt.n = 300;
    opt.seed = 5;
    const GeneratedStream s = gen_stream(opt);
    REQUIRE(s.regimes.size() == 300);
    for (int i = 0; i < 100; ++i) CHECK(s.regimes[static_cast<size_t>(i)] == "A");
    for (int i = 100; i < 200; ++i) CHECK(s.regimes[static_cast<size_t>(i)] == "B");
    for (int i = 200; i < 300; ++i) CHECK(s.regimes[static_cast<size_t>(i)] == "A");
}

TEST_CASE("redundant stream repeats its unique fifth exactly") {
    GenOptions opt;
    opt.kind = StreamKind::kRedundantDuplicates;
    opt.n = 500;
    opt.seed = 11;
    const GeneratedStream s = gen_stream(opt);
    const int64_t uniques = 100;
    for (int64_t i = uniques; i < opt.n; ++i) {
        CHECK(s.rows[static_cast<size_t>(i)] == s.rows[static_cast<size_t>((i - uniques) % uniques)]);
        CHECK(s.regimes[static_cast<size_t>(i)] == "dup");
    }
}

TEST_CASE("csv reading: skips, counts and fatal errors") {
    const std::string dir = temp_dir();
    const std::string path = dir + "/data.csv";
    spit(path,
         "x1,x2,y\n"
         "1.0,2.0,3.0\n"
         "bad,2.0,3.0\n"      // non-numeric feature: skip
         "1.0,,3.0\n"         // missing value: skip
         "1.0,2.0\n"          // field count mismatch: skip
         "4.0,5.0,6.0\n");
    const CsvData d = read_csv(path, {"y"});
    CHECK(d.rows.size() == 2);
    CHECK(d.skipped_rows == 3);
    CHECK(d.columns == std::vector<std::string>{"x1", "x2", "y"});

    spit(dir + "/badtarget.csv", "x,y\n1.0,oops\n");
    CHECK_THROWS_AS(read_csv(dir + "/badtarget.csv", {"y"}), ConfigError);

    CHECK_THROWS_AS(read_csv(path, {"nope"}), ConfigError);
    CHECK_THROWS_AS(read_csv(dir + "/missing.csv", {"y"}), DataError);
}

TEST_CASE("config files parse, override and reject unknown keys") {
    const std::string dir = temp_dir();
    const std::string path = dir + "/engine.conf";
    spit(path,
         "# defaults overridden\n"
         "delta = 0.2\n"
         "s = 0.02\n"
         "rule_cap = 12\n"
         "gate_enabled = false\n");
    EngineConfig cfg = config_from_map(read_config_file(path));
    CHECK(cfg.delta == 0.2);
    CHECK(cfg.gate_step == 0.02);
    CHECK(cfg.rule_cap == 12);
    CHECK_FALSE(cfg.gate_enabled);

    CHECK_THROWS_AS(config_from_map({{"mystery", "1"}}), ConfigError);
    CHECK_THROWS_AS(config_from_map({{"epsilon", "2.0"}}), ConfigError);  // out of range
    CHECK_THROWS_AS(config_from_map({{"delta", "abc"}}), ConfigError);
}

TEST_CASE("a constant target is learned to numerical silence") {
    const std::string dir = temp_dir();
    GeneratedStream s;
    s.columns = {"x1", "y"};
    Rng rng(7);
    for (int i = 0; i < 400; ++i) s.rows.push_back({rng.uniform(-1, 1), 5.0});
    s.regimes.assign(400, "const");
    write_stream_csv(s, dir + "/const.csv");

    RunOptions opt;
    opt.target_columns = {"y"};
    const RunReport report = run_stream_file(dir + "/const.csv", opt);
    CHECK(report.rmse < 1e-3);
    CHECK(report.samples_used <= report.samples_seen);
    CHECK(report.used_fraction <= 1.0);
}

TEST_CASE("test-then-train never leaks the current sample") {
    GenOptions gopt;
    gopt.kind = StreamKind::kClusters;
    gopt.n = 150;
    gopt.seed = 23;
    const GeneratedStream s = gen_stream(gopt);

    Engine engine;
    Vec x(2), t(1);
    for (const Vec& row : s.rows) {
        x[0] = row[0];
        x[1] = row[1];
        t[0] = row[2];
        Vec expected;
        if (engine.state().rule_count() > 0) {
            // scaling moves with the new sample, so mirror it before predicting
            ModelState probe = deserialize_model(engine.snapshot());
            probe.scaler.observe(x);
            const Vec xs = probe.scaler.scale(x);
            expected = fuzzy::evaluate(probe.rules, probe.q, xs).y;
        }
        const SampleTrace trace = engine.process(x, t);
        if (trace.prediction_valid) REQUIRE(trace.prediction == expected);
    }
}

TEST_CASE("cross-validation folds cover the data exactly once") {
    const std::string dir = temp_dir();
    GenOptions gopt;
    gopt.kind = StreamKind::kClusters;
    gopt.n = 173;
    gopt.seed = 3;
    write_stream_csv(gen_stream(gopt), dir + "/cv.csv");

    RunOptions opt;
    opt.target_columns = {"y"};
    opt.protocol = Protocol::kCrossValidation;
    opt.cv_folds = 10;
    opt.parallel_folds = true;
    const RunReport report = run_stream_file(dir + "/cv.csv", opt);
    REQUIRE(report.folds.size() == 10);
    REQUIRE(static_cast<int64_t>(report.records.size()) == 173);
    for (size_t i = 0; i < report.records.size(); ++i) {
        CHECK(report.records[i].index == static_cast<int64_t>(i));
        CHECK(report.records[i].phase == "test");
    }
    int64_t total_test = 0;
    for (const FoldSummary& f : report.folds) total_test += f.test_samples;
    CHECK(total_test == 173);
}

TEST_CASE("periodic hold-out alternates train and test windows") {
    const std::string dir = temp_dir();
    GenOptions gopt;
    gopt.kind = StreamKind::kPiecewiseLinear;
    gopt.n = 260;
    gopt.seed = 9;
    gopt.dims = 1;
    write_stream_csv(gen_stream(gopt), dir + "/ho.csv");

    RunOptions opt;
    opt.target_columns = {"y"};
    opt.protocol = Protocol::kPeriodicHoldout;
    opt.holdout_train = 100;
    opt.holdout_test = 30;
    const RunReport report = run_stream_file(dir + "/ho.csv", opt);
    // 100 train, 30 test, 100 train, 30 test -> 60 scored samples
    CHECK(report.scored_samples == 60);
    CHECK(report.samples_seen == 200);  // only training samples enter the engine
    int64_t test_records = 0;
    for (const MetricsRecord& r : report.records)
        if (r.phase == "test") ++test_records;
    CHECK(test_records == 60);
}

TEST_CASE("metrics emission is deterministic and self-consistent") {
    const std::string dir = temp_dir();
    GenOptions gopt;
    gopt.kind = StreamKind::kClusters;
    gopt.n = 200;
    gopt.seed = 31;
    write_stream_csv(gen_stream(gopt), dir + "/m.csv");

    RunOptions opt;
    opt.target_columns = {"y"};
    const RunReport report = run_stream_file(dir + "/m.csv", opt);

    const std::string out1 = dir + "/out1";
    const std::string out2 = dir + "/out2";
    emit_metrics(report, out1);
    emit_metrics(report, out2);
    for (const char* f : {"/metrics.jsonl", "/summary.json", "/error_curve.svg",
                          "/rules_curve.svg", "/acceptance_curve.svg"})
        CHECK(slurp(out1 + f) == slurp(out2 + f));

    // record count: one header line plus one line per record
    const std::string metrics = slurp(out1 + "/metrics.jsonl");
    const size_t lines = static_cast<size_t>(std::count(metrics.begin(), metrics.end(), '\n'));
    CHECK(lines == report.records.size() + 1);

    // summary MSE equals the mean of the scored squared errors
    double sse = 0.0;
    int64_t n = 0;
    for (const MetricsRecord& r : report.records)
        if (r.has_error && !r.warmup) {
            sse += r.error * r.error;
            ++n;
        }
    CHECK(report.mse == doctest::Approx(sse / static_cast<double>(n)).epsilon(1e-12));

    // plots regenerate bit-identically from the metrics file alone
    const std::string replot = dir + "/replot";
    render_plots_from_metrics(out1 + "/metrics.jsonl", replot);
    for (const char* f : {"/error_curve.svg", "/rules_curve.svg", "/acceptance_curve.svg"})
        CHECK(slurp(out1 + f) == slurp(replot + f));
}

TEST_CASE("unknown protocol and stream names are usage errors") {
    CHECK_THROWS_AS(protocol_from_name("zigzag"), ConfigError);
    CHECK_THROWS_AS(stream_kind_from_name("mystery"), ConfigError);
    CHECK(protocol_from_name("ttt") == Protocol::kTestThenTrain);
    CHECK(stream_kind_from_name("cyclic-ABA") == StreamKind::kCyclicAba);
}

TEST_CASE("an unwritable output directory is fatal") {
    const std::string dir = temp_dir();
    spit(dir + "/occupied", "not a directory");
    RunReport empty;
    CHECK_THROWS_AS(emit_metrics(empty, dir + "/occupied/out"), DataError);
}

TEST_CASE("protocol parameter validation") {
    const std::string dir = temp_dir();
    GenOptions gopt;
    gopt.n = 50;
    write_stream_csv(gen_stream(gopt), dir + "/v.csv");

    RunOptions opt;
    opt.target_columns = {"y"};
    opt.protocol = Protocol::kPeriodicHoldout;
    opt.holdout_train = 0;
    CHECK_THROWS_AS(run_stream_file(dir + "/v.csv", opt), ConfigError);

    opt = RunOptions{};
    opt.target_columns = {"y"};
    opt.protocol = Protocol::kCrossValidation;
    opt.cv_folds = 1;
    CHECK_THROWS_AS(run_stream_file(dir + "/v.csv", opt), ConfigError);
}

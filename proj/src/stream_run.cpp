#include <algorithm>
#include <chrono>
#include <cmath>

#include "rift/kernels.hpp"
#include "rift/stream.hpp"

namespace rift {
namespace stream {

namespace {

struct ColumnSplit {
    std::vector<size_t> features;
    std::vector<size_t> targets;
};

ColumnSplit split_columns(const CsvData& data, const std::vector<std::string>& target_columns) {
    ColumnSplit cs;
    for (const std::string& t : target_columns) {
        auto it = std::find(data.columns.begin(), data.columns.end(), t);
        if (it == data.columns.end()) throw ConfigError("target column '" + t + "' not found");
        cs.targets.push_back(static_cast<size_t>(it - data.columns.begin()));
    }
    for (size_t j = 0; j < data.columns.size(); ++j)
        if (std::find(cs.targets.begin(), cs.targets.end(), j) == cs.targets.end())
            cs.features.push_back(j);
    if (cs.targets.empty()) throw ConfigError("no target column declared");
    if (cs.features.empty()) throw ConfigError("no feature columns left");
    return cs;
}

void split_row(const Vec& row, const ColumnSplit& cs, Vec& x, Vec& t) {
    x.resize(cs.features.size());
    t.resize(cs.targets.size());
    for (size_t j = 0; j < cs.features.size(); ++j) x[j] = row[cs.features[j]];
    for (size_t j = 0; j < cs.targets.size(); ++j) t[j] = row[cs.targets[j]];
}

MetricsRecord record_from_trace(const SampleTrace& trace) {
    MetricsRecord r;
    r.index = trace.index;
    r.phase = "train";
    r.warmup = trace.warmup;
    r.has_error = trace.prediction_valid;
    r.error = trace.prediction_valid ? trace.error[0] : 0.0;
    r.rule_count = trace.rule_count;
    r.delta1 = trace.delta1;
    r.accepted = trace.accepted;
    r.q = trace.q;
    r.fhat0 = trace.fhat0;
    r.grown = trace.grown;
    r.recalled_id = trace.recalled_id;
    r.pruned_ids = trace.pruned_ids;
    return r;
}

double mean_squared(const Vec& err) {
    double s = 0.0;
    for (double e : err) s += e * e;
    return s / static_cast<double>(err.size());
}

std::vector<Vec> load_density_samples(const std::string& path, size_t n_features) {
    CsvData d = read_csv(path, {});
    if (d.rows.empty()) throw DataError(path + ": no usable density samples");
    if (d.columns.size() != n_features)
        throw ConfigError(path + ": density file must have exactly the feature columns");
    return d.rows;
}

}  // namespace

RunReport run_stream(const CsvData& data, const RunOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    if (data.rows.empty()) throw DataError("stream has no usable rows");
    const ColumnSplit cs = split_columns(data, options.target_columns);
    const int64_t n = static_cast<int64_t>(data.rows.size());

    std::vector<Vec> density_samples;
    if (!options.density_csv.empty())
        density_samples = load_density_samples(options.density_csv, cs.features.size());

    RunReport report;
    report.protocol = options.protocol;
    report.skipped_rows = data.skipped_rows;
    report.warnings = data.warnings;

    double sse = 0.0;
    int64_t scored = 0;

    auto score = [&](const Vec& err) {
        sse += mean_squared(err);
        ++scored;
    };

    if (options.protocol == Protocol::kTestThenTrain) {
        Engine engine(options.engine);
        if (!density_samples.empty()) engine.use_recorded_samples(density_samples);
        Vec x, t;
        for (int64_t i = 0; i < n; ++i) {
            split_row(data.rows[static_cast<size_t>(i)], cs, x, t);
            const SampleTrace trace = engine.process(x, t);
            report.records.push_back(record_from_trace(trace));
            report.max_rules = std::max(report.max_rules, trace.rule_count);
            if (trace.prediction_valid && !trace.warmup) score(trace.error);
        }
        report.final_rules = engine.state().rule_count();
        report.samples_seen = engine.state().counters.seen;
        report.samples_used = engine.state().counters.accepted;
        report.rules_created = engine.state().counters.grown;
        report.rules_pruned = engine.state().counters.pruned;
        report.rules_recalled = engine.state().counters.recalled;
        report.parameter_count = engine.parameter_count();
        report.final_snapshot = engine.snapshot();
    } else if (options.protocol == Protocol::kPeriodicHoldout) {
        if (options.holdout_train < 1 || options.holdout_test < 1)
            throw ConfigError("holdout window sizes must be >= 1");
        Engine engine(options.engine);
        if (!density_samples.empty()) engine.use_recorded_samples(density_samples);
        Vec x, t;
        int64_t pos = 0;
        while (pos < n) {
            const int64_t train_end = std::min<int64_t>(pos + options.holdout_train, n);
            for (int64_t i = pos; i < train_end; ++i) {
                split_row(data.rows[static_cast<size_t>(i)], cs, x, t);
                const SampleTrace trace = engine.process(x, t);
                report.records.push_back(record_from_trace(trace));
                report.max_rules = std::max(report.max_rules, trace.rule_count);
            }
            const int64_t test_end = std::min<int64_t>(train_end + options.holdout_test, n);
            for (int64_t i = train_end; i < test_end; ++i) {
                split_row(data.rows[static_cast<size_t>(i)], cs, x, t);
                const Vec y = engine.predict(x);
                Vec err(t.size());
                for (size_t o = 0; o < t.size(); ++o) err[o] = y[o] - t[o];
                score(err);
                MetricsRecord r;
                r.index = i;
                r.phase = "test";
                r.has_error = true;
                r.error = err[0];
                r.rule_count = engine.state().rule_count();
                r.delta1 = engine.state().gate.delta1;
                r.q = engine.state().q;
                report.records.push_back(std::move(r));
            }
            pos = test_end;
        }
        report.final_rules = engine.state().rule_count();
        report.samples_seen = engine.state().counters.seen;
        report.samples_used = engine.state().counters.accepted;
        report.rules_created = engine.state().counters.grown;
        report.rules_pruned = engine.state().counters.pruned;
        report.rules_recalled = engine.state().counters.recalled;
        report.parameter_count = engine.parameter_count();
        report.final_snapshot = engine.snapshot();
    } else {  // cross-validation
        const int k = std::min<int>(options.cv_folds, static_cast<int>(n));
        if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
        report.folds.resize(static_cast<size_t>(k));
        std::vector<std::vector<MetricsRecord>> fold_records(static_cast<size_t>(k));
        std::vector<Counters> fold_counters(static_cast<size_t>(k));
        std::vector<int64_t> fold_params(static_cast<size_t>(k), 0);
        std::vector<int> fold_max_rules(static_cast<size_t>(k), 0);

        kernels::run_indexed(k, options.parallel_folds, [&](int f) {
            const int64_t lo = n * f / k;
            const int64_t hi = n * (f + 1) / k;
            EngineConfig cfg = options.engine;
            cfg.seed = options.engine.seed + static_cast<uint64_t>(f);
            Engine engine(cfg);
            if (!density_samples.empty()) engine.use_recorded_samples(density_samples);
            Vec x, t;
            for (int64_t i = 0; i < n; ++i) {
                if (i >= lo && i < hi) continue;
                split_row(data.rows[static_cast<size_t>(i)], cs, x, t);
                const SampleTrace trace = engine.process(x, t);
                fold_max_rules[static_cast<size_t>(f)] =
                    std::max(fold_max_rules[static_cast<size_t>(f)], trace.rule_count);
            }
            FoldSummary& fs = report.folds[static_cast<size_t>(f)];
            double fold_sse = 0.0;
            for (int64_t i = lo; i < hi; ++i) {
                split_row(data.rows[static_cast<size_t>(i)], cs, x, t);
                const Vec y = engine.predict(x);
                Vec err(t.size());
                for (size_t o = 0; o < t.size(); ++o) err[o] = y[o] - t[o];
                fold_sse += mean_squared(err);
                MetricsRecord r;
                r.index = i;
                r.phase = "test";
                r.has_error = true;
                r.error = err[0];
                r.rule_count = engine.state().rule_count();
                r.delta1 = engine.state().gate.delta1;
                r.q = engine.state().q;
                fold_records[static_cast<size_t>(f)].push_back(std::move(r));
            }
            fs.test_samples = hi - lo;
            fs.mse = fs.test_samples ? fold_sse / static_cast<double>(fs.test_samples) : 0.0;
            fs.rmse = std::sqrt(fs.mse);
            fs.final_rules = engine.state().rule_count();
            fold_counters[static_cast<size_t>(f)] = engine.state().counters;
            fold_params[static_cast<size_t>(f)] = engine.parameter_count();
        });

        double rules_sum = 0.0;
        double params_sum = 0.0;
        for (int f = 0; f < k; ++f) {
            const FoldSummary& fs = report.folds[static_cast<size_t>(f)];
            sse += fs.mse * static_cast<double>(fs.test_samples);
            scored += fs.test_samples;
            for (auto& rec : fold_records[static_cast<size_t>(f)])
                report.records.push_back(std::move(rec));
            report.samples_seen += fold_counters[static_cast<size_t>(f)].seen;
            report.samples_used += fold_counters[static_cast<size_t>(f)].accepted;
            report.rules_created += fold_counters[static_cast<size_t>(f)].grown;
            report.rules_pruned += fold_counters[static_cast<size_t>(f)].pruned;
            report.rules_recalled += fold_counters[static_cast<size_t>(f)].recalled;
            report.max_rules = std::max(report.max_rules, fold_max_rules[static_cast<size_t>(f)]);
            rules_sum += fs.final_rules;
            params_sum += static_cast<double>(fold_params[static_cast<size_t>(f)]);
        }
        report.final_rules = static_cast<int>(std::lround(rules_sum / k));
        report.parameter_count = static_cast<int64_t>(std::lround(params_sum / k));
    }

    report.scored_samples = scored;
    report.mse = scored ? sse / static_cast<double>(scored) : 0.0;
    report.rmse = std::sqrt(report.mse);
    report.used_fraction =
        report.samples_seen ? static_cast<double>(report.samples_used) /
                                  static_cast<double>(report.samples_seen)
                            : 0.0;
    const auto t_end = std::chrono::steady_clock::now();
    report.runtime_seconds = std::chrono::duration<double>(t_end - t_start).count();
    return report;
}

RunReport run_stream_file(const std::string& csv_path, const RunOptions& options) {
    const CsvData data = read_csv(csv_path, options.target_columns);
    return run_stream(data, options);
}

}  // namespace stream
}  // namespace rift

#ifndef RIFT_STREAM_HPP
#define RIFT_STREAM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rift/engine.hpp"

namespace rift {
namespace stream {

// One parsed stream: header plus numeric rows. Rows that failed to parse or
// had missing fields are counted, not kept.
struct CsvData {
    std::vector<std::string> columns;
    std::vector<Vec> rows;
    int64_t skipped_rows = 0;
    std::vector<std::string> warnings;
};

CsvData read_csv(const std::string& path, const std::vector<std::string>& target_columns);

// Flat key = value configuration file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);
EngineConfig config_from_map(const std::map<std::string, std::string>& kv,
                             EngineConfig base = {});

enum class Protocol { kTestThenTrain, kPeriodicHoldout, kCrossValidation };
Protocol protocol_from_name(const std::string& name);

struct RunOptions {
    EngineConfig engine;
    Protocol protocol = Protocol::kTestThenTrain;
    std::vector<std::string> target_columns;
    int holdout_train = 200;  // periodic hold-out window sizes
    int holdout_test = 50;
    int cv_folds = 10;
    bool parallel_folds = false;
    std::string density_csv;  // optional pre-recorded samples for the input density
};

// Per-sample record kept for metrics emission. Wall time is tracked
// separately from this record so metrics files stay reproducible.
struct MetricsRecord {
    int64_t index = 0;
    std::string phase;  // "train" or "test"
    bool warmup = false;
    bool has_error = false;
    double error = 0.0;       // first output
    int rule_count = 0;
    double delta1 = 0.0;
    bool accepted = false;
    Vec q;
    double fhat0 = 0.0;
    bool grown = false;
    int recalled_id = -1;
    std::vector<int> pruned_ids;
};

struct FoldSummary {
    double mse = 0.0;
    double rmse = 0.0;
    int64_t test_samples = 0;
    int final_rules = 0;
};

struct RunReport {
    Protocol protocol = Protocol::kTestThenTrain;
    double mse = 0.0;
    double rmse = 0.0;
    int64_t scored_samples = 0;
    int final_rules = 0;
    int max_rules = 0;
    int64_t samples_seen = 0;
    int64_t samples_used = 0;
    double used_fraction = 0.0;
    int64_t parameter_count = 0;
    int64_t skipped_rows = 0;
    double runtime_seconds = 0.0;
    int64_t rules_created = 0;
    int64_t rules_pruned = 0;
    int64_t rules_recalled = 0;
    std::vector<FoldSummary> folds;
    std::vector<MetricsRecord> records;
    std::vector<uint8_t> final_snapshot;  // empty for cross-validation
    std::vector<std::string> warnings;
};

RunReport run_stream(const CsvData& data, const RunOptions& options);
RunReport run_stream_file(const std::string& csv_path, const RunOptions& options);

// --- synthetic stream generation ---------------------------------------

enum class StreamKind {
    kClusters,
    kPiecewiseLinear,
    kGradualDrift,
    kAbruptDrift,
    kCyclicAba,
    kRedundantDuplicates,
};
StreamKind stream_kind_from_name(const std::string& name);

struct GenOptions {
    StreamKind kind = StreamKind::kClusters;
    int64_t n = 600;
    uint64_t seed = 7;
    int dims = 2;
    double noise = 0.05;
};

struct GeneratedStream {
    std::vector<std::string> columns;  // x1..xp, y
    std::vector<Vec> rows;
    std::vector<std::string> regimes;  // ground-truth regime label per row
};

GeneratedStream gen_stream(const GenOptions& options);
// Writes <path> and <path>.regimes.csv; byte-identical for equal options.
void write_stream_csv(const GeneratedStream& s, const std::string& path);

// --- metrics and plots ---------------------------------------------------

// metrics.jsonl (one record per line, schema header first), summary.json,
// and three SVG curves, all pure functions of their inputs.
void emit_metrics(const RunReport& report, const std::string& out_dir);

// Re-renders the SVG plots from an existing metrics.jsonl.
void render_plots_from_metrics(const std::string& metrics_path, const std::string& out_dir);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace stream
}  // namespace rift

#endif

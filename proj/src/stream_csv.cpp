#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rift/stream.hpp"

namespace rift {
namespace stream {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

CsvData read_csv(const std::string& path, const std::vector<std::string>& target_columns) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    CsvData data;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    data.columns = split_line(line);
    if (data.columns.empty()) throw DataError(path + ": empty header");

    std::vector<size_t> target_idx;
    for (const std::string& t : target_columns) {
        auto it = std::find(data.columns.begin(), data.columns.end(), t);
        if (it == data.columns.end())
            throw ConfigError("target column '" + t + "' not found in " + path);
        target_idx.push_back(static_cast<size_t>(it - data.columns.begin()));
    }

    int64_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != data.columns.size()) {
            ++data.skipped_rows;
            if (data.warnings.size() < 20)
                data.warnings.push_back("line " + std::to_string(line_no) + ": field count mismatch");
            continue;
        }
        Vec row(fields.size());
        bool ok = true;
        for (size_t j = 0; j < fields.size(); ++j) {
            if (fields[j].empty()) {  // missing value: skip the row, never impute
                ok = false;
                break;
            }
            if (!parse_double(fields[j], row[j])) {
                const bool is_target =
                    std::find(target_idx.begin(), target_idx.end(), j) != target_idx.end();
                if (is_target)
                    throw ConfigError(path + " line " + std::to_string(line_no) +
                                      ": non-numeric target value '" + fields[j] + "'");
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++data.skipped_rows;
            if (data.warnings.size() < 20)
                data.warnings.push_back("line " + std::to_string(line_no) + ": skipped");
            continue;
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + " line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + " line " + std::to_string(line_no) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
    double v;
    if (!parse_double(value, v)) throw ConfigError("config key " + key + ": bad number '" + value + "'");
    return v;
}

int64_t to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    return static_cast<int64_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError("config key " + key + ": bad boolean '" + value + "'");
}

}  // namespace

EngineConfig config_from_map(const std::map<std::string, std::string>& kv, EngineConfig base) {
    for (const auto& [key, value] : kv) {
        if (key == "delta") base.delta = to_double(key, value);
        else if (key == "epsilon") base.epsilon = to_double(key, value);
        else if (key == "s" || key == "gate_step") base.gate_step = to_double(key, value);
        else if (key == "omega") base.omega = to_double(key, value);
        else if (key == "n_history") base.n_history = static_cast<int>(to_int(key, value));
        else if (key == "alpha_sig") base.alpha_sig = to_double(key, value);
        else if (key == "u") base.u_norm = to_double(key, value);
        else if (key == "tau") base.tau = to_double(key, value);
        else if (key == "delta3") base.delta3 = to_double(key, value);
        else if (key == "delta4") base.delta4 = to_double(key, value);
        else if (key == "theta_prune") base.theta_prune = to_double(key, value);
        else if (key == "prune_window") base.prune_window = to_int(key, value);
        else if (key == "rule_cap") base.rule_cap = static_cast<int>(to_int(key, value));
        else if (key == "archive_cap") base.archive_cap = static_cast<int>(to_int(key, value));
        else if (key == "utility_decay") base.utility_decay = to_double(key, value);
        else if (key == "gamma_d" || key == "weight_decay") base.weight_decay = to_double(key, value);
        else if (key == "eta_q") base.eta_q = to_double(key, value);
        else if (key == "eta_lambda") base.eta_lambda = to_double(key, value);
        else if (key == "delta1_init") base.delta1_init = to_double(key, value);
        else if (key == "q_init") base.q_init = to_double(key, value);
        else if (key == "lambda_init") base.lambda_init = to_double(key, value);
        else if (key == "init_spread") base.init_spread = to_double(key, value);
        else if (key == "seed") base.seed = static_cast<uint64_t>(to_int(key, value));
        else if (key == "gate_enabled") base.gate_enabled = to_bool(key, value);
        else if (key == "growth_enabled") base.growth_enabled = to_bool(key, value);
        else if (key == "pruning_enabled") base.pruning_enabled = to_bool(key, value);
        else if (key == "recall_enabled") base.recall_enabled = to_bool(key, value);
        else if (key == "parallel") base.parallel = to_bool(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    base.validate();
    return base;
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "test-then-train" || name == "ttt") return Protocol::kTestThenTrain;
    if (name == "holdout" || name == "periodic-holdout") return Protocol::kPeriodicHoldout;
    if (name == "cv" || name == "cross-validation") return Protocol::kCrossValidation;
    throw ConfigError("unknown protocol '" + name + "'");
}

StreamKind stream_kind_from_name(const std::string& name) {
    if (name == "clusters") return StreamKind::kClusters;
    if (name == "piecewise-linear") return StreamKind::kPiecewiseLinear;
    if (name == "gradual-drift") return StreamKind::kGradualDrift;
    if (name == "abrupt-drift") return StreamKind::kAbruptDrift;
    if (name == "cyclic-ABA" || name == "cyclic-aba") return StreamKind::kCyclicAba;
    if (name == "redundant-duplicates") return StreamKind::kRedundantDuplicates;
    throw ConfigError("unknown stream kind '" + name + "'");
}

}  // namespace stream
}  // namespace rift

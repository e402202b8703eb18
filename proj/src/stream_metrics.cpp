#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rift/stream.hpp"

namespace rift {
namespace stream {

namespace {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::kTestThenTrain: return "test-then-train";
        case Protocol::kPeriodicHoldout: return "periodic-holdout";
        case Protocol::kCrossValidation: return "cross-validation";
    }
    return "?";
}

std::string json_vec(const Vec& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s + "]";
}

std::string json_int_vec(const std::vector<int>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s + "]";
}

std::string record_line(const MetricsRecord& r) {
    std::string s = "{\"i\":" + std::to_string(r.index);
    s += ",\"phase\":\"" + r.phase + "\"";
    s += ",\"warmup\":";
    s += r.warmup ? "true" : "false";
    if (r.has_error) s += ",\"error\":" + format_double(r.error);
    s += ",\"rules\":" + std::to_string(r.rule_count);
    s += ",\"delta1\":" + format_double(r.delta1);
    s += ",\"accepted\":";
    s += r.accepted ? "true" : "false";
    s += ",\"q\":" + json_vec(r.q);
    s += ",\"fhat0\":" + format_double(r.fhat0);
    s += ",\"grown\":";
    s += r.grown ? "true" : "false";
    s += ",\"recalled\":" + std::to_string(r.recalled_id);
    s += ",\"pruned\":" + json_int_vec(r.pruned_ids);
    return s + "}";
}

// --- tiny SVG polyline plots --------------------------------------------

constexpr int kPlotW = 800;
constexpr int kPlotH = 400;
constexpr int kMargin = 50;

struct Series {
    std::vector<double> xs;
    std::vector<double> ys;
};

std::string svg_plot(const Series& s, const std::string& title, const std::string& color) {
    std::ostringstream out;
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    if (!s.xs.empty()) {
        xmin = xmax = s.xs[0];
        ymin = ymax = s.ys[0];
        for (size_t i = 0; i < s.xs.size(); ++i) {
            xmin = std::min(xmin, s.xs[i]);
            xmax = std::max(xmax, s.xs[i]);
            ymin = std::min(ymin, s.ys[i]);
            ymax = std::max(ymax, s.ys[i]);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;
    auto px = [&](double x) {
        return kMargin + (x - xmin) / (xmax - xmin) * (kPlotW - 2 * kMargin);
    };
    auto py = [&](double y) {
        return kPlotH - kMargin - (y - ymin) / (ymax - ymin) * (kPlotH - 2 * kMargin);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotW << "\" height=\""
        << kPlotH << "\" viewBox=\"0 0 " << kPlotW << " " << kPlotH << "\">\n";
    out << "<rect width=\"" << kPlotW << "\" height=\"" << kPlotH << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kPlotW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kPlotH - kMargin << "\" x2=\""
        << kPlotW - kMargin << "\" y2=\"" << kPlotH - kMargin
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
        << kPlotH - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kMargin << "\" y=\"" << kPlotH - kMargin + 16
        << "\" font-size=\"10\">" << format_double(xmin) << "</text>\n";
    out << "<text x=\"" << kPlotW - kMargin << "\" y=\"" << kPlotH - kMargin + 16
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(xmax) << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kPlotH - kMargin
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(ymin) << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(ymax) << "</text>\n";
    if (!s.xs.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
        for (size_t i = 0; i < s.xs.size(); ++i) {
            if (i) out << ' ';
            out << format_double(px(s.xs[i])) << ',' << format_double(py(s.ys[i]));
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

struct PlotInputs {
    Series error;       // |error| vs index
    Series rules;       // rule count vs index
    Series acceptance;  // rolling acceptance rate vs index
};

void write_plots(const PlotInputs& in, const std::string& out_dir) {
    write_file(out_dir + "/error_curve.svg", svg_plot(in.error, "absolute error", "#c0392b"));
    write_file(out_dir + "/rules_curve.svg", svg_plot(in.rules, "rule count", "#2980b9"));
    write_file(out_dir + "/acceptance_curve.svg",
               svg_plot(in.acceptance, "acceptance rate (window 50)", "#27ae60"));
}

PlotInputs plot_inputs_from_records(const std::vector<MetricsRecord>& records) {
    PlotInputs in;
    constexpr int kWindow = 50;
    std::vector<int> window;
    int accepted_in_window = 0;
    for (const MetricsRecord& r : records) {
        const double idx = static_cast<double>(r.index);
        if (r.has_error) {
            in.error.xs.push_back(idx);
            in.error.ys.push_back(std::fabs(r.error));
        }
        in.rules.xs.push_back(idx);
        in.rules.ys.push_back(static_cast<double>(r.rule_count));
        if (r.phase == "train") {
            window.push_back(r.accepted ? 1 : 0);
            accepted_in_window += r.accepted ? 1 : 0;
            if (static_cast<int>(window.size()) > kWindow) {
                accepted_in_window -= window.front();
                window.erase(window.begin());
            }
            in.acceptance.xs.push_back(idx);
            in.acceptance.ys.push_back(static_cast<double>(accepted_in_window) /
                                       static_cast<double>(window.size()));
        }
    }
    return in;
}

}  // namespace

void emit_metrics(const RunReport& report, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir);

    {
        std::ostringstream out;
        out << "{\"schema\":\"rift-metrics\",\"version\":1,\"protocol\":\""
            << protocol_name(report.protocol) << "\",\"records\":" << report.records.size()
            << "}\n";
        for (const MetricsRecord& r : report.records) out << record_line(r) << '\n';
        write_file(out_dir + "/metrics.jsonl", out.str());
    }
    {
        std::ostringstream out;
        out << "{\n";
        out << "  \"schema_version\": 1,\n";
        out << "  \"protocol\": \"" << protocol_name(report.protocol) << "\",\n";
        out << "  \"mse\": " << format_double(report.mse) << ",\n";
        out << "  \"rmse\": " << format_double(report.rmse) << ",\n";
        out << "  \"scored_samples\": " << report.scored_samples << ",\n";
        out << "  \"final_rules\": " << report.final_rules << ",\n";
        out << "  \"max_rules\": " << report.max_rules << ",\n";
        out << "  \"samples_seen\": " << report.samples_seen << ",\n";
        out << "  \"samples_used\": " << report.samples_used << ",\n";
        out << "  \"used_fraction\": " << format_double(report.used_fraction) << ",\n";
        out << "  \"parameter_count\": " << report.parameter_count << ",\n";
        out << "  \"skipped_rows\": " << report.skipped_rows << ",\n";
        out << "  \"rules_created\": " << report.rules_created << ",\n";
        out << "  \"rules_pruned\": " << report.rules_pruned << ",\n";
        out << "  \"rules_recalled\": " << report.rules_recalled << ",\n";
        out << "  \"folds\": [";
        for (size_t f = 0; f < report.folds.size(); ++f) {
            if (f) out << ", ";
            const FoldSummary& fs = report.folds[f];
            out << "{\"mse\": " << format_double(fs.mse) << ", \"rmse\": " << format_double(fs.rmse)
                << ", \"test_samples\": " << fs.test_samples
                << ", \"final_rules\": " << fs.final_rules << "}";
        }
        out << "]\n}\n";
        write_file(out_dir + "/summary.json", out.str());
    }
    {
        // Wall time lives apart from the reproducible files.
        std::ostringstream out;
        out << "{\"runtime_seconds\": " << format_double(report.runtime_seconds) << "}\n";
        write_file(out_dir + "/timing.json", out.str());
    }
    write_plots(plot_inputs_from_records(report.records), out_dir);
}

namespace {

// Minimal field scanners for the metrics lines this module writes itself.
bool scan_number(const std::string& line, const std::string& key, double& out) {
    const std::string pat = "\"" + key + "\":";
    const size_t at = line.find(pat);
    if (at == std::string::npos) return false;
    out = std::strtod(line.c_str() + at + pat.size(), nullptr);
    return true;
}

bool scan_bool(const std::string& line, const std::string& key, bool& out) {
    const std::string pat = "\"" + key + "\":";
    const size_t at = line.find(pat);
    if (at == std::string::npos) return false;
    out = line.compare(at + pat.size(), 4, "true") == 0;
    return true;
}

bool scan_string(const std::string& line, const std::string& key, std::string& out) {
    const std::string pat = "\"" + key + "\":\"";
    const size_t at = line.find(pat);
    if (at == std::string::npos) return false;
    const size_t start = at + pat.size();
    const size_t end = line.find('"', start);
    if (end == std::string::npos) return false;
    out = line.substr(start, end - start);
    return true;
}

}  // namespace

void render_plots_from_metrics(const std::string& metrics_path, const std::string& out_dir) {
    std::ifstream in(metrics_path);
    if (!in) throw DataError("cannot open " + metrics_path);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir);

    std::vector<MetricsRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {  // schema header
            first = false;
            continue;
        }
        if (line.empty()) continue;
        MetricsRecord r;
        double v = 0.0;
        if (scan_number(line, "i", v)) r.index = static_cast<int64_t>(v);
        scan_string(line, "phase", r.phase);
        scan_bool(line, "warmup", r.warmup);
        r.has_error = scan_number(line, "error", r.error);
        if (scan_number(line, "rules", v)) r.rule_count = static_cast<int>(v);
        scan_number(line, "delta1", r.delta1);
        scan_bool(line, "accepted", r.accepted);
        scan_number(line, "fhat0", r.fhat0);
        records.push_back(std::move(r));
    }
    write_plots(plot_inputs_from_records(records), out_dir);
}

}  // namespace stream
}  // namespace rift

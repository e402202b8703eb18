// rift: evolving interval type-2 fuzzy regression over data streams.
//
// Subcommands:
//   run      stream a CSV through the engine under an evaluation protocol
//   gen      produce a synthetic benchmark stream
//   inspect  print a snapshot's rule base in readable form

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "rift/stream.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

void print_report(const rift::stream::RunReport& r) {
    std::cout << "mse              " << r.mse << "\n";
    std::cout << "rmse             " << r.rmse << "\n";
    std::cout << "scored samples   " << r.scored_samples << "\n";
    std::cout << "final rules      " << r.final_rules << "\n";
    std::cout << "max rules        " << r.max_rules << "\n";
    std::cout << "samples seen     " << r.samples_seen << "\n";
    std::cout << "samples used     " << r.samples_used << " ("
              << 100.0 * r.used_fraction << "%)\n";
    std::cout << "rules created    " << r.rules_created << "\n";
    std::cout << "rules pruned     " << r.rules_pruned << "\n";
    std::cout << "rules recalled   " << r.rules_recalled << "\n";
    std::cout << "parameters       " << r.parameter_count << "\n";
    std::cout << "skipped rows     " << r.skipped_rows << "\n";
    std::cout << "runtime          " << r.runtime_seconds << " s\n";
    for (size_t f = 0; f < r.folds.size(); ++f)
        std::cout << "fold " << f << "          rmse " << r.folds[f].rmse << ", rules "
                  << r.folds[f].final_rules << "\n";
    for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const std::string& csv, const std::string& config_path,
            const std::vector<std::string>& targets, const std::string& protocol,
            const std::string& out_dir, const std::string& snapshot_path,
            const std::string& density_csv, const std::vector<std::string>& overrides,
            int holdout_train, int holdout_test, int folds, bool parallel_folds) {
    rift::EngineConfig cfg;
    if (!config_path.empty())
        cfg = rift::stream::config_from_map(rift::stream::read_config_file(config_path));
    if (!overrides.empty()) {
        std::map<std::string, std::string> kv;
        for (const std::string& ov : overrides) {
            const size_t eq = ov.find('=');
            if (eq == std::string::npos)
                throw rift::ConfigError("--set expects key=value, got '" + ov + "'");
            kv[ov.substr(0, eq)] = ov.substr(eq + 1);
        }
        cfg = rift::stream::config_from_map(kv, cfg);
    }

    rift::stream::RunOptions opt;
    opt.engine = cfg;
    opt.protocol = rift::stream::protocol_from_name(protocol);
    opt.target_columns = targets;
    opt.holdout_train = holdout_train;
    opt.holdout_test = holdout_test;
    opt.cv_folds = folds;
    opt.parallel_folds = parallel_folds;
    opt.density_csv = density_csv;

    const rift::stream::RunReport report = rift::stream::run_stream_file(csv, opt);
    print_report(report);

    if (!out_dir.empty()) rift::stream::emit_metrics(report, out_dir);
    if (!snapshot_path.empty()) {
        if (report.final_snapshot.empty())
            std::cerr << "warning: no final snapshot for this protocol\n";
        else {
            std::ofstream out(snapshot_path, std::ios::binary);
            if (!out) throw rift::DataError("cannot write " + snapshot_path);
            out.write(reinterpret_cast<const char*>(report.final_snapshot.data()),
                      static_cast<std::streamsize>(report.final_snapshot.size()));
        }
    }
    return 0;
}

int cmd_gen(const std::string& kind, int64_t n, uint64_t seed, int dims, double noise,
            const std::string& out_path) {
    rift::stream::GenOptions opt;
    opt.kind = rift::stream::stream_kind_from_name(kind);
    opt.n = n;
    opt.seed = seed;
    opt.dims = dims;
    opt.noise = noise;
    const rift::stream::GeneratedStream s = rift::stream::gen_stream(opt);
    rift::stream::write_stream_csv(s, out_path);
    std::cout << "wrote " << s.rows.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_inspect(const std::string& snapshot_path) {
    std::ifstream in(snapshot_path, std::ios::binary);
    if (!in) throw rift::DataError("cannot open " + snapshot_path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    const rift::Engine engine = rift::Engine::restore(bytes);
    const rift::ModelState& st = engine.state();

    std::cout << "inputs " << st.n_inputs << ", outputs " << st.n_outputs << ", rules "
              << st.rules.size() << ", archived " << st.archive.size() << "\n";
    std::cout << "samples seen " << st.counters.seen << ", accepted " << st.counters.accepted
              << ", grown " << st.counters.grown << ", pruned " << st.counters.pruned
              << ", recalled " << st.counters.recalled << "\n";
    std::cout << "q = [";
    for (size_t o = 0; o < st.q.size(); ++o) std::cout << (o ? ", " : "") << st.q[o];
    std::cout << "], delta1 = " << st.gate.delta1 << ", eta_q = " << st.zedm.eta_q
              << ", eta_lambda = " << st.zedm.eta_lambda << "\n";
    if (st.density.fitted()) {
        std::cout << "density: " << st.density.n_comp << " component(s), mixing [";
        for (int c = 0; c < st.density.n_comp; ++c)
            std::cout << (c ? ", " : "") << st.density.mixing[static_cast<size_t>(c)];
        std::cout << "]\n";
    } else {
        std::cout << "density: not fitted (" << st.warmup_buffer.size() << " buffered)\n";
    }
    for (size_t i = 0; i < st.rules.size(); ++i) {
        const rift::Rule& r = st.rules[i];
        std::cout << "rule " << i << ": pop " << r.n_pop << ", lambda " << r.lambda
                  << ", utility " << r.util.utility() << "\n";
        std::cout << "  centroid lo [";
        for (size_t j = 0; j < r.c_lower.size(); ++j) std::cout << (j ? ", " : "") << r.c_lower[j];
        std::cout << "]\n  centroid hi [";
        for (size_t j = 0; j < r.c_upper.size(); ++j) std::cout << (j ? ", " : "") << r.c_upper[j];
        std::cout << "]\n  sigma       [";
        for (size_t j = 0; j < r.sigma.size(); ++j) std::cout << (j ? ", " : "") << r.sigma[j];
        std::cout << "]\n  weights     [";
        for (int k = 0; k < r.weights.rows; ++k) {
            if (k) std::cout << "; ";
            for (int o = 0; o < r.weights.cols; ++o)
                std::cout << (o ? ", " : "") << r.weights(k, o);
        }
        std::cout << "]\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rift: online evolving interval type-2 fuzzy regression"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "stream a CSV through the engine");
    std::string csv, config_path, protocol = "test-then-train", out_dir, snapshot_path, density_csv;
    std::vector<std::string> targets{"y"};
    std::vector<std::string> overrides;
    int holdout_train = 200, holdout_test = 50, folds = 10;
    bool parallel_folds = false;
    run->add_option("--csv", csv, "input CSV with a header row")->required();
    run->add_option("--target", targets, "target column name(s)");
    run->add_option("--protocol", protocol, "test-then-train | holdout | cv");
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--set", overrides, "override config keys, key=value");
    run->add_option("--out", out_dir, "directory for metrics, summary and plots");
    run->add_option("--save-snapshot", snapshot_path, "write the final model snapshot");
    run->add_option("--density-csv", density_csv, "pre-recorded feature samples for the input density");
    run->add_option("--holdout-train", holdout_train, "hold-out training window");
    run->add_option("--holdout-test", holdout_test, "hold-out test window");
    run->add_option("--folds", folds, "cross-validation folds");
    run->add_flag("--parallel-folds", parallel_folds, "run CV folds in parallel");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic stream");
    std::string kind = "clusters", gen_out = "stream.csv";
    int64_t n = 600;
    uint64_t seed = 7;
    int dims = 2;
    double noise = 0.05;
    gen->add_option("--kind", kind,
                    "clusters | piecewise-linear | gradual-drift | abrupt-drift | cyclic-ABA | "
                    "redundant-duplicates");
    gen->add_option("--n", n, "number of rows");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--dims", dims, "input dimensions");
    gen->add_option("--noise", noise, "target noise level");
    gen->add_option("--out", gen_out, "output CSV path");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "dump a snapshot's rule base");
    std::string inspect_path;
    inspect->add_option("--snapshot", inspect_path, "snapshot file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(csv, config_path, targets, protocol, out_dir, snapshot_path, density_csv,
                           overrides, holdout_train, holdout_test, folds, parallel_folds);
        if (gen->parsed()) return cmd_gen(kind, n, seed, dims, noise, gen_out);
        if (inspect->parsed()) return cmd_inspect(inspect_path);
    } catch (const rift::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const rift::SnapshotError& e) {
        std::cerr << "snapshot error: " << e.what() << "\n";
        return kExitData;
    } catch (const rift::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitIo;
    } catch (const rift::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

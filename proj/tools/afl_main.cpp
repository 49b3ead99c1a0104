// Command-line surface: gen-data, train, reproduce, verify, plot-data.
// Exit codes: 0 success, 1 criterion failure or runtime fault, 2 usage or
// configuration error. Diagnostics go to stderr, data to files/stdout.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "afl/harness.hpp"
#include "afl/io_util.hpp"

namespace {

using namespace afl;

void apply_seed_base(ExperimentConfig& cfg, std::uint64_t base) {
    cfg.data.seed = base;
    cfg.model.seed = base + 1;
    cfg.shuffle_seed = base + 2;
}

int cmd_gen_data(const std::string& config_path, const std::string& out,
                 std::uint64_t seed, bool seed_set) {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (seed_set) cfg.data.seed = seed;
    Rng rng(cfg.data.seed, kDataStream);
    const Dataset ds = sample_dataset(cfg.data, rng);
    if (out.empty()) {
        write_dataset(std::cout, ds);
    } else {
        write_dataset(out, ds);
        std::cerr << "wrote " << ds.size() << " points to " << out << "\n";
    }
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out, std::uint64_t seed,
              bool seed_set, int test_size, int metric_period) {
    ExperimentConfig cfg = parse_config_file(config_path);
    if (seed_set) apply_seed_base(cfg, seed);
    if (test_size > 0) cfg.test_size = test_size;
    if (metric_period > 0) cfg.metric_period = metric_period;
    if (!out.empty()) cfg.output_path = out;
    const RunResult res = train(cfg);
    std::cerr << "train done: epochs=" << cfg.epochs << " train_err=" << res.final_train_err
              << " test_err=" << res.final_test_err << " wall=" << res.wall_time_sec << "s\n";
    if (cfg.output_path.empty()) {
        write_metrics_csv(std::cout, res);
    }
    return 0;
}

int max_threads_from_env() {
    const char* env = std::getenv("AFL_THREADS");
    if (env != nullptr) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

int cmd_reproduce(const std::string& preset, bool all, const std::string& out,
                  std::uint64_t seed, bool seed_set, int test_size, int metric_period) {
    std::vector<std::string> names;
    if (all) {
        names = preset_names();
    } else if (!preset.empty()) {
        names.push_back(preset);
    } else {
        std::cerr << "reproduce needs --preset NAME or --all\n";
        return 2;
    }
    const std::uint64_t base = seed_set ? seed : 0;

    std::vector<PresetReport> reports(names.size());
    std::vector<std::string> errors(names.size());
    std::atomic<std::size_t> next{0};
    const int nthreads = std::min<int>(max_threads_from_env(), static_cast<int>(names.size()));
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= names.size()) return;
            try {
                reports[i] = reproduce(names[i], out, base, test_size, metric_period);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    bool all_ok = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << names[i] << ": ERROR " << errors[i] << "\n";
            all_ok = false;
            continue;
        }
        const auto& rep = reports[i];
        std::cerr << rep.name << ": train_err=" << fmt17(rep.run.final_train_err)
                  << " test_err=" << fmt17(rep.run.final_test_err)
                  << " wall=" << rep.run.wall_time_sec << "s";
        for (const auto& [crit, ok] : rep.pass) {
            std::cerr << " [" << crit << ": " << (ok ? "pass" : "FAIL") << "]";
        }
        std::cerr << "\n";
        all_ok &= rep.all_pass;
    }
    return all_ok ? 0 : 1;
}

int cmd_plot_data(const std::string& csv, const std::string& which, const std::string& out_dir) {
    const auto records = read_metrics_csv(csv);
    if (records.empty()) throw IoError("no data rows in: " + csv);
    struct Curve {
        const char* file;
        double MetricsRecord::* field;
    };
    std::vector<Curve> curves;
    if (which == "dynamics") {
        curves = {{"feat_pos.dat", &MetricsRecord::feat_pos},
                  {"feat_neg.dat", &MetricsRecord::feat_neg},
                  {"noise_min_pos.dat", &MetricsRecord::noise_min_pos},
                  {"noise_min_neg.dat", &MetricsRecord::noise_min_neg},
                  {"noise_max_pos.dat", &MetricsRecord::noise_max_pos},
                  {"noise_max_neg.dat", &MetricsRecord::noise_max_neg}};
    } else if (which == "errors") {
        curves = {{"train_err.dat", &MetricsRecord::train_err},
                  {"test_err.dat", &MetricsRecord::test_err}};
    } else {
        throw ConfigError("plot-data --which must be 'dynamics' or 'errors'");
    }
    std::filesystem::create_directories(out_dir);
    for (const auto& c : curves) {
        const std::string path = out_dir + "/" + c.file;
        std::ofstream f(path);
        if (!f) throw IoError("cannot open for writing: " + path);
        for (const auto& r : records) {
            f << r.epoch << ' ' << fmt17(r.*(c.field)) << '\n';
        }
    }
    std::cerr << "wrote " << curves.size() << " curve files to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature-learning experiments with Adam/AdamW/SignSGD/SignSGDW"};
    app.require_subcommand(1);

    std::string config_path, preset, out, csv, which = "dynamics";
    std::uint64_t seed = 0;
    int test_size = 0, metric_period = 0;
    bool all = false;

    auto* gen = app.add_subcommand("gen-data", "sample a dataset and write the text format");
    gen->add_option("--config", config_path, "experiment config file")->required();
    auto* gen_seed = gen->add_option("--seed", seed, "override data seed");
    gen->add_option("--out", out, "output file (stdout when omitted)");

    auto* tr = app.add_subcommand("train", "run one training experiment from a config file");
    tr->add_option("--config", config_path, "experiment config file")->required();
    auto* tr_seed = tr->add_option("--seed", seed, "seed base override (data/model/shuffle)");
    tr->add_option("--out", out, "output directory");
    tr->add_option("--test-size", test_size, "override test set size");
    tr->add_option("--metric-period", metric_period, "override metric logging period");

    auto* rep = app.add_subcommand("reproduce", "run a reproduction preset and check its targets");
    rep->add_option("--preset", preset, "preset name");
    rep->add_flag("--all", all, "run every preset");
    auto* rep_seed = rep->add_option("--seed", seed, "seed base override");
    rep->add_option("--out", out, "output directory");
    rep->add_option("--test-size", test_size, "override test set size");
    rep->add_option("--metric-period", metric_period, "override metric logging period");

    auto* ver = app.add_subcommand("verify", "run the module property suites");

    auto* plot = app.add_subcommand("plot-data", "emit per-curve files from a metrics CSV");
    plot->add_option("csv", csv, "metrics CSV produced by train/reproduce")->required();
    plot->add_option("--which", which, "dynamics | errors");
    plot->add_option("--out", out, "output directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(config_path, out, seed, gen_seed->count() > 0);
        if (tr->parsed()) {
            return cmd_train(config_path, out, seed, tr_seed->count() > 0, test_size, metric_period);
        }
        if (rep->parsed()) {
            return cmd_reproduce(preset, all, out, seed, rep_seed->count() > 0, test_size,
                                 metric_period);
        }
        if (ver->parsed()) return afl::verify(std::cerr) ? 0 : 1;
        if (plot->parsed()) return cmd_plot_data(csv, which, out.empty() ? "." : out);
    } catch (const afl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const afl::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad value: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fault: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

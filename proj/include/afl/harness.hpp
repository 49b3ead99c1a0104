// Config-driven experiment runner: seeded epoch/batch scheduling, training
// loops over any optimizer, per-period metric logging, reproduction presets
// for the synthetic tables and figures, and the property-suite verifier.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "afl/data.hpp"
#include "afl/metrics.hpp"
#include "afl/network.hpp"
#include "afl/optim.hpp"

namespace afl {

struct ExperimentConfig {
    DataConfig data;
    ModelConfig model;
    OptimizerConfig optimizer;
    int batch_size = 100;
    long epochs = 10000;
    int test_size = 10000;
    int metric_period = 10;
    std::uint64_t shuffle_seed = 0;
    std::string output_path;  // directory for CSV/checkpoints; empty = no files

    void validate() const;
};

struct RunResult {
    std::vector<MetricsRecord> records;
    double final_train_err = 1.0;
    double final_test_err = 1.0;
    double init_feat_pos = 0.0;   // feature learning at initialization
    double init_feat_neg = 0.0;
    long first_zero_train_epoch = -1;  // first logged epoch with train_err == 0
    double max_moment_ratio = 0.0;     // max over logged records (adaptive kinds)
    double wall_time_sec = 0.0;
    ExperimentConfig config_echo;
};

// Seeded permutation of [0, n) split into consecutive blocks of size B (the
// last block may be short). Deterministic per (shuffle_seed, epoch_index):
// Fisher-Yates with Rng(shuffle_seed, kShuffleStreamBase + epoch_index).
std::vector<BatchSpec> epoch_batches(int n, int B, long epoch_index, std::uint64_t shuffle_seed);

// Runs cfg.epochs epochs of ceil(n/B) steps each. Metrics are logged every
// metric_period epochs and at the final epoch; checkpoints every 10% of the
// run when output_path is set. Throws NanFault when weights go non-finite.
RunResult train(const ExperimentConfig& cfg);

// Named reproduction configs (Appendix-style synthetic experiments).
std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

struct PresetReport {
    std::string name;
    RunResult run;
    std::map<std::string, bool> pass;  // criterion label -> outcome
    bool all_pass = true;
};

// Runs a preset and evaluates its pass/fail targets. seed_base shifts the
// data/model/shuffle seeds together (default matches preset_config).
PresetReport reproduce(const std::string& preset_name, const std::string& out_dir = "",
                       std::uint64_t seed_base = 0, int test_size_override = 0,
                       int metric_period_override = 0);

// Module property suites (gradient oracle, moment bound, sign identities,
// overlap statistics, init scales, determinism). Logs one line per check;
// returns false if any fails.
bool verify(std::ostream& log);

// --- file surfaces ---

void write_metrics_csv(std::ostream& out, const RunResult& result);
void write_metrics_csv(const std::string& path, const RunResult& result);
void write_summary_json(const std::string& path, const PresetReport& report);

// Flat "key = value" config files with dotted keys; unknown keys throw.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Reads a metrics CSV back (used by plot-data and tests).
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

}  // namespace afl

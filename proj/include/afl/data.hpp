// Synthetic two-patch data: one patch carries the label feature y*e1, the
// other an s-sparse Gaussian noise vector with feature noise -alpha*y
// planted at coordinate 0.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "afl/errors.hpp"
#include "afl/rng.hpp"

namespace afl {

struct DataConfig {
    int d = 1000;           // dimension per patch
    int n = 200;            // dataset size
    int s = 100;            // noise sparsity (support size, excludes coord 0)
    double sigma_p = 0.1;   // noise standard deviation
    double alpha = 0.2;     // feature-noise strength, in (0,1)
    std::uint64_t seed = 0;
    bool balanced = true;   // exactly n/2 labels per class

    void validate() const;
};

// A single sample. Patches are stored sparsely: the signal patch is
// label * e1; the noise patch has `feature_noise` at coordinate 0 and
// `noise` on `support` (sorted, all in [1, d)). signal_index says which of
// the two conceptual patches (1 or 2) holds the signal.
struct DataPoint {
    int label = 1;          // +1 or -1
    int signal_index = 1;   // 1 or 2
    double feature_noise = 0.0;        // == -alpha * label
    std::vector<int> support;          // sorted, coordinate 0 never included
    std::vector<double> noise;         // values on support

    double dot_signal(const double* w) const { return label * w[0]; }

    double dot_noise(const double* w) const {
        double acc = feature_noise * w[0];
        for (std::size_t i = 0; i < support.size(); ++i) {
            acc += noise[i] * w[support[i]];
        }
        return acc;
    }

    double dot_patch(const double* w, int which) const {
        return which == signal_index ? dot_signal(w) : dot_noise(w);
    }

    // Dense d-vector of patch 1 or 2 (for oracles and file output).
    std::vector<double> dense_patch(int which, int d) const;
};

struct Dataset {
    std::vector<DataPoint> points;
    DataConfig config;

    int size() const { return static_cast<int>(points.size()); }
};

// One draw from the distribution. Consumption order of `rng` (documented so
// tests can replay it): label (skipped when forced), support via partial
// Fisher-Yates over [1, d), noise values in ascending support order, then
// the signal-placement coin.
DataPoint sample_point(const DataConfig& cfg, Rng& rng);

// As sample_point but with the label imposed (used for balanced datasets).
DataPoint sample_point_with_label(const DataConfig& cfg, Rng& rng, int label);

// n points; balanced mode shuffles an exact half/half label vector first.
Dataset sample_dataset(const DataConfig& cfg, Rng& rng);

// Convenience: seeds a fresh stream from cfg.seed.
Dataset sample_dataset(const DataConfig& cfg);

struct OverlapReport {
    bool all_disjoint = true;
    std::vector<std::pair<int, int>> collisions;  // index pairs with shared support coords
};

OverlapReport check_non_overlap(const Dataset& ds);

// Line-oriented text format; see README for the exact layout. Coordinates
// are written 1-based (supports lie in [2, d]) to match the header's math
// convention; floats use 17 significant digits so round-trips are exact.
void write_dataset(std::ostream& out, const Dataset& ds);
void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

}  // namespace afl

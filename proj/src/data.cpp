#include "afl/data.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "afl/io_util.hpp"

namespace afl {

void DataConfig::validate() const {
    if (d < 2) throw ConfigError("data.d must be >= 2");
    if (n < 1) throw ConfigError("data.n must be >= 1");
    if (s < 1 || s > d - 1) throw ConfigError("data.s must satisfy 1 <= s <= d-1");
    if (!(sigma_p > 0.0)) throw ConfigError("data.sigma_p must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("data.alpha must lie in (0,1)");
    if (balanced && n % 2 != 0) throw ConfigError("balanced datasets need even n");
}

std::vector<double> DataPoint::dense_patch(int which, int d) const {
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    if (which == signal_index) {
        out[0] = label;
    } else {
        out[0] = feature_noise;
        for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = noise[i];
    }
    return out;
}

std::vector<int> Rng::sample_without_replacement(int lo, int hi, int k) {
    std::vector<int> pool(static_cast<std::size_t>(hi - lo));
    for (int i = lo; i < hi; ++i) pool[static_cast<std::size_t>(i - lo)] = i;
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(uniform_below(static_cast<std::uint64_t>(hi - lo - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

DataPoint sample_point_with_label(const DataConfig& cfg, Rng& rng, int label) {
    DataPoint p;
    p.label = label;
    p.support = rng.sample_without_replacement(1, cfg.d, cfg.s);
    p.noise.resize(p.support.size());
    for (auto& v : p.noise) v = rng.normal(0.0, cfg.sigma_p);
    p.feature_noise = -cfg.alpha * label;
    p.signal_index = rng.uniform_double() < 0.5 ? 1 : 2;
    return p;
}

DataPoint sample_point(const DataConfig& cfg, Rng& rng) {
    cfg.validate();
    return sample_point_with_label(cfg, rng, rng.rademacher());
}

Dataset sample_dataset(const DataConfig& cfg, Rng& rng) {
    cfg.validate();
    Dataset ds;
    ds.config = cfg;
    ds.points.reserve(static_cast<std::size_t>(cfg.n));
    if (cfg.balanced) {
        std::vector<int> labels(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i) labels[static_cast<std::size_t>(i)] = i < cfg.n / 2 ? 1 : -1;
        rng.shuffle(std::span<int>(labels));
        for (int i = 0; i < cfg.n; ++i) {
            ds.points.push_back(sample_point_with_label(cfg, rng, labels[static_cast<std::size_t>(i)]));
        }
    } else {
        for (int i = 0; i < cfg.n; ++i) ds.points.push_back(sample_point(cfg, rng));
    }
    return ds;
}

Dataset sample_dataset(const DataConfig& cfg) {
    Rng rng(cfg.seed, kDataStream);
    return sample_dataset(cfg, rng);
}

OverlapReport check_non_overlap(const Dataset& ds) {
    OverlapReport report;
    // coordinate -> first point using it; supports are small vs d, so a
    // single map pass beats all-pairs set intersection.
    std::unordered_map<int, int> owner;
    std::vector<std::pair<int, int>> seen;
    for (int i = 0; i < ds.size(); ++i) {
        for (int k : ds.points[static_cast<std::size_t>(i)].support) {
            auto [it, inserted] = owner.emplace(k, i);
            if (!inserted && it->second != i) {
                seen.emplace_back(it->second, i);
            }
        }
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    report.collisions = std::move(seen);
    report.all_disjoint = report.collisions.empty();
    return report;
}

void write_dataset(std::ostream& out, const Dataset& ds) {
    const auto& c = ds.config;
    out << "#d=" << c.d << " n=" << c.n << " s=" << c.s << " sigma_p=" << fmt17(c.sigma_p)
        << " alpha=" << fmt17(c.alpha) << " seed=" << c.seed << "\n";
    for (const auto& p : ds.points) {
        out << p.label << ' ' << p.signal_index << ' ';
        for (std::size_t i = 0; i < p.support.size(); ++i) {
            if (i) out << ',';
            out << p.support[i] + 1;  // 1-based on disk
        }
        out << ' ';
        for (std::size_t i = 0; i < p.noise.size(); ++i) {
            if (i) out << ',';
            out << fmt17(p.noise[i]);
        }
        out << '\n';
    }
    if (!out) throw IoError("dataset write failed");
}

void write_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_dataset(out, ds);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header)) throw IoError("empty dataset file: " + path);
    Dataset ds;
    auto& c = ds.config;
    unsigned long long seed_tmp = 0;
    if (std::sscanf(header.c_str(), "#d=%d n=%d s=%d sigma_p=%lf alpha=%lf seed=%llu", &c.d, &c.n,
                    &c.s, &c.sigma_p, &c.alpha, &seed_tmp) != 6) {
        throw IoError("bad dataset header: " + header);
    }
    c.seed = seed_tmp;
    c.balanced = false;  // not recorded; label counts speak for themselves
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        DataPoint p;
        std::string supp_csv, noise_csv;
        if (!(ls >> p.label >> p.signal_index >> supp_csv >> noise_csv)) {
            throw IoError("bad dataset record: " + line);
        }
        for (const auto& tok : split_csv(supp_csv)) {
            p.support.push_back(std::stoi(tok) - 1);
        }
        for (const auto& tok : split_csv(noise_csv)) {
            p.noise.push_back(std::strtod(tok.c_str(), nullptr));
        }
        if (p.support.size() != p.noise.size() || static_cast<int>(p.support.size()) != c.s) {
            throw IoError("support/noise length mismatch in: " + line);
        }
        for (int k : p.support) {
            if (k < 1 || k >= c.d) throw IoError("support coordinate out of range in: " + line);
        }
        p.feature_noise = -c.alpha * p.label;
        ds.points.push_back(std::move(p));
    }
    if (ds.size() != c.n) throw IoError("dataset record count does not match header n");
    return ds;
}

}  // namespace afl

#include "afl/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "afl/io_util.hpp"

namespace afl {

void ModelConfig::validate() const {
    if (m < 1) throw ConfigError("model.m must be >= 1");
    if (q < 3) throw ConfigError("model.q must be >= 3");
    if (!(sigma_0 >= 0.0)) throw ConfigError("model.sigma_0 must be >= 0");
    if (d < 2) throw ConfigError("model.d must be >= 2");
}

bool Weights::all_finite() const {
    for (double x : w) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Weights init_weights(const ModelConfig& cfg, Rng& rng) {
    cfg.validate();
    Weights W(cfg.m, cfg.d, cfg.q);
    for (auto& x : W.w) x = rng.normal(0.0, cfg.sigma_0);
    return W;
}

Weights init_weights(const ModelConfig& cfg) {
    Rng rng(cfg.seed, kInitStream);
    return init_weights(cfg, rng);
}

double forward_logit(const Weights& W, const DataPoint& x, int j) {
    for (int k : x.support) {
        if (k >= W.d) throw ShapeError("data dimension exceeds weight dimension");
    }
    const int slot = Weights::slot(j);
    double acc = 0.0;
    for (int r = 0; r < W.m; ++r) {
        const double* wr = W.row(slot, r);
        acc += activation(x.dot_patch(wr, 1), W.q) + activation(x.dot_patch(wr, 2), W.q);
    }
    return acc;
}

double forward_margin(const Weights& W, const DataPoint& x, int y) {
    return forward_logit(W, x, y) - forward_logit(W, x, -y);
}

bool is_correct(const Weights& W, const DataPoint& x, int y) {
    return forward_margin(W, x, y) > 0.0;
}

void write_weights(const std::string& path, const Weights& W) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "#j=2 m=" << W.m << " d=" << W.d << " q=" << W.q << "\n";
    for (int slot = 0; slot < 2; ++slot) {
        for (int r = 0; r < W.m; ++r) {
            const double* row = W.row(slot, r);
            for (int k = 0; k < W.d; ++k) {
                if (k) out << ' ';
                out << fmt17(row[k]);
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

Weights read_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header)) throw IoError("empty weights file: " + path);
    int two = 0, m = 0, d = 0, q = 0;
    if (std::sscanf(header.c_str(), "#j=%d m=%d d=%d q=%d", &two, &m, &d, &q) != 4 || two != 2) {
        throw IoError("bad weights header: " + header);
    }
    Weights W(m, d, q);
    for (int slot = 0; slot < 2; ++slot) {
        for (int r = 0; r < m; ++r) {
            double* row = W.row(slot, r);
            for (int k = 0; k < d; ++k) {
                if (!(in >> row[k])) throw IoError("truncated weights file: " + path);
            }
        }
    }
    return W;
}

}  // namespace afl

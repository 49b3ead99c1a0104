#include "afl/optim.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "afl/io_util.hpp"

namespace afl {

const char* opt_kind_name(OptKind k) {
    switch (k) {
        case OptKind::adam: return "adam";
        case OptKind::adamw: return "adamw";
        case OptKind::signsgd: return "signsgd";
        case OptKind::signsgdw: return "signsgdw";
    }
    return "?";
}

OptKind opt_kind_from_name(const std::string& name) {
    if (name == "adam") return OptKind::adam;
    if (name == "adamw") return OptKind::adamw;
    if (name == "signsgd") return OptKind::signsgd;
    if (name == "signsgdw") return OptKind::signsgdw;
    throw ConfigError("unknown optimizer kind: " + name);
}

void OptimizerConfig::validate() const {
    if (!(eta > 0.0)) throw ConfigError("optimizer.eta must be > 0");
    if (!(lambda >= 0.0)) throw ConfigError("optimizer.lambda must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optimizer.beta1 must lie in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optimizer.beta2 must lie in [0,1)");
    if (is_adaptive(kind)) {
        if (!(epsilon > 0.0)) throw ConfigError("optimizer.epsilon must be > 0");
        if (!(beta2 > beta1 * beta1)) {
            throw ConfigError("adaptive kinds require beta2 > beta1^2");
        }
    }
}

StepScale step_scale(const OptimizerConfig& cfg, long t) {
    StepScale sc;
    if (cfg.bias_correction && t > 0) {
        sc.c1 = 1.0 / (1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
        sc.c2 = 1.0 / std::sqrt(1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
    }
    return sc;
}

void update_moments_inplace(MomentState& st, const Gradient& g, const OptimizerConfig& cfg) {
    if (st.m.size() != g.size()) throw ShapeError("moment/gradient shape mismatch");
    const double b1 = cfg.beta1, b2 = cfg.beta2;
    const std::size_t nw = g.size();
    double* m = st.m.w.data();
    double* v = st.v.w.data();
    const double* gv = g.w.data();
    for (std::size_t k = 0; k < nw; ++k) {
        m[k] = b1 * m[k] + (1.0 - b1) * gv[k];
        v[k] = b2 * v[k] + (1.0 - b2) * gv[k] * gv[k];
    }
    st.t += 1;
}

MomentState update_moments(const MomentState& st, const Gradient& g, const OptimizerConfig& cfg) {
    MomentState next = st;
    update_moments_inplace(next, g, cfg);
    return next;
}

namespace {

void apply_adaptive(Weights& W, const MomentState& st, const OptimizerConfig& cfg, double shrink) {
    if (W.size() != st.m.size()) throw ShapeError("weight/moment shape mismatch");
    const auto sc = step_scale(cfg, st.t);
    const double eta = cfg.eta, eps = cfg.epsilon;
    const std::size_t nw = W.size();
    double* w = W.w.data();
    const double* m = st.m.w.data();
    const double* v = st.v.w.data();
    long bad = -1;
    for (std::size_t k = 0; k < nw; ++k) {
        const double step = eta * (m[k] * sc.c1) / (std::sqrt(v[k]) * sc.c2 + eps);
        const double next = shrink * w[k] - step;
        if (!std::isfinite(next) && bad < 0) bad = static_cast<long>(k);
        w[k] = next;
    }
    if (bad >= 0) {
        throw NanFault("non-finite weight produced at moment step " + std::to_string(st.t), st.t);
    }
}

}  // namespace

void apply_adam_inplace(Weights& W, const MomentState& st, const OptimizerConfig& cfg) {
    apply_adaptive(W, st, cfg, 1.0);
}

void apply_adamw_inplace(Weights& W, const MomentState& st, const OptimizerConfig& cfg) {
    apply_adaptive(W, st, cfg, 1.0 - cfg.eta * cfg.lambda);
}

void apply_signsgd_inplace(Weights& W, const Gradient& g, const OptimizerConfig& cfg) {
    if (W.size() != g.size()) throw ShapeError("weight/gradient shape mismatch");
    const double eta = cfg.eta;
    const std::size_t nw = W.size();
    for (std::size_t k = 0; k < nw; ++k) W.w[k] -= eta * sgn(g.w[k]);
}

void apply_signsgdw_inplace(Weights& W, const Gradient& g, const OptimizerConfig& cfg) {
    if (W.size() != g.size()) throw ShapeError("weight/gradient shape mismatch");
    const double eta = cfg.eta;
    const double shrink = 1.0 - cfg.lambda * cfg.eta;
    const std::size_t nw = W.size();
    for (std::size_t k = 0; k < nw; ++k) W.w[k] = shrink * W.w[k] - eta * sgn(g.w[k]);
}

Weights step_adam(const Weights& W, const MomentState& st, const Gradient& g,
                  const OptimizerConfig& cfg) {
    (void)g;  // already ingested into st per the precondition
    Weights next = W;
    apply_adam_inplace(next, st, cfg);
    return next;
}

Weights step_adamw(const Weights& W, const MomentState& st, const Gradient& g,
                   const OptimizerConfig& cfg) {
    (void)g;
    Weights next = W;
    apply_adamw_inplace(next, st, cfg);
    return next;
}

Weights step_signsgd(const Weights& W, const Gradient& g, const OptimizerConfig& cfg) {
    Weights next = W;
    apply_signsgd_inplace(next, g, cfg);
    return next;
}

Weights step_signsgdw(const Weights& W, const Gradient& g, const OptimizerConfig& cfg) {
    Weights next = W;
    apply_signsgdw_inplace(next, g, cfg);
    return next;
}

double moment_ratio_max(const MomentState& st, const OptimizerConfig& cfg) {
    const double eps = cfg.epsilon;
    double best = 0.0;
    const std::size_t nw = st.m.size();
    for (std::size_t k = 0; k < nw; ++k) {
        const double r = std::fabs(st.m.w[k]) / (std::sqrt(st.v.w[k]) + eps);
        if (r > best) best = r;
    }
    return best;
}

double ratio_bound(double beta1, double beta2) {
    return std::sqrt((1.0 - beta1) * (1.0 - beta1) /
                     ((1.0 - beta2) * (1.0 - beta1 * beta1 / beta2)));
}

SignAgreement sign_agreement(const MomentState& st, const Gradient& g, const OptimizerConfig& cfg,
                             double threshold) {
    SignAgreement out;
    long agree = 0;
    const std::size_t nw = g.size();
    for (std::size_t k = 0; k < nw; ++k) {
        if (std::fabs(g.w[k]) < threshold) continue;
        out.qualifying += 1;
        const double step_dir = sgn(-st.m.w[k] / (std::sqrt(st.v.w[k]) + cfg.epsilon));
        if (step_dir == -sgn(g.w[k])) agree += 1;
    }
    out.fraction = out.qualifying == 0 ? 1.0 : static_cast<double>(agree) / out.qualifying;
    return out;
}

namespace {

void write_block(std::ofstream& out, const Weights& W) {
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
}

Weights read_block(std::ifstream& in, const std::string& path) {
    std::string header;
    if (!std::getline(in, header)) throw IoError("truncated state file: " + path);
    int two = 0, m = 0, d = 0, q = 0;
    if (std::sscanf(header.c_str(), "#j=%d m=%d d=%d q=%d", &two, &m, &d, &q) != 4 || two != 2) {
        throw IoError("bad state block header: " + header);
    }
    Weights W(m, d, q);
    for (int slot = 0; slot < 2; ++slot) {
        for (int r = 0; r < m; ++r) {
            double* row = W.row(slot, r);
            for (int k = 0; k < d; ++k) {
                if (!(in >> row[k])) throw IoError("truncated state file: " + path);
            }
        }
    }
    in.ignore(1);  // trailing newline before the next header
    return W;
}

}  // namespace

void write_moment_state(const std::string& path, const Weights& W, const MomentState& st) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "#t=" << st.t << "\n";
    write_block(out, W);
    write_block(out, st.m);
    write_block(out, st.v);
    if (!out) throw IoError("write failed: " + path);
}

void read_moment_state(const std::string& path, Weights& W, MomentState& st) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string tline;
    if (!std::getline(in, tline) || std::sscanf(tline.c_str(), "#t=%ld", &st.t) != 1) {
        throw IoError("bad state file header: " + path);
    }
    W = read_block(in, path);
    st.m = read_block(in, path);
    st.v = read_block(in, path);
}

}  // namespace afl

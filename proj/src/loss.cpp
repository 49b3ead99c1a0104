#include "afl/loss.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace afl {

void BatchSpec::validate(int dataset_size) const {
    if (indices.empty()) throw ConfigError("empty batch");
    std::unordered_set<int> seen;
    for (int i : indices) {
        if (i < 0 || i >= dataset_size) throw ConfigError("batch index out of bounds");
        if (!seen.insert(i).second) throw ConfigError("duplicate batch index");
    }
}

namespace {

constexpr double kMarginClamp = 700.0;

double clamp_margin(double margin) {
    return std::min(std::max(margin, -kMarginClamp), kMarginClamp);
}

// ell for the true class: 1 - softmax_y = 1/(1+exp(margin)). Strictly inside
// (0,1) thanks to the clamp.
double ell_true(double margin) {
    return 1.0 / (1.0 + std::exp(clamp_margin(margin)));
}

}  // namespace

double logit_weight(const Weights& W, const DataPoint& x, int y, int j) {
    const double fp = forward_logit(W, x, 1);
    const double fm = forward_logit(W, x, -1);
    const double mx = std::max(fp, fm);
    const double ep = std::exp(fp - mx);
    const double em = std::exp(fm - mx);
    const double pj = (j > 0 ? ep : em) / (ep + em);
    return (y == j ? 1.0 : 0.0) - pj;
}

double per_sample_loss(const Weights& W, const DataPoint& x, int y) {
    const double margin = clamp_margin(forward_margin(W, x, y));
    return std::log1p(std::exp(-margin));
}

namespace {

// Scatter c * patch into row g (only the patch's nonzero coordinates).
inline void scatter_patch(double* g, const DataPoint& x, int which, double c) {
    if (which == x.signal_index) {
        g[0] += c * x.label;
    } else {
        g[0] += c * x.feature_noise;
        const std::size_t s = x.support.size();
        for (std::size_t i = 0; i < s; ++i) g[x.support[i]] += c * x.noise[i];
    }
}

// Adds -ell_j sigma'(z) * patch terms for one sample into G.
void add_sample_grad(Gradient& G, const Weights& W, const DataPoint& x, int y) {
    const double margin = forward_margin(W, x, y);
    const double ly = ell_true(margin);  // ell_{y}; ell_{-y} = -ell_{y}
    for (int slot = 0; slot < 2; ++slot) {
        const int j = slot == 0 ? 1 : -1;
        const double ell = (j == y) ? ly : -ly;
        for (int r = 0; r < W.m; ++r) {
            const double* wr = W.row(slot, r);
            double* gr = G.row(slot, r);
            const double z1 = x.dot_patch(wr, 1);
            const double z2 = x.dot_patch(wr, 2);
            if (z1 > 0.0) scatter_patch(gr, x, 1, -ell * activation_prime(z1, W.q));
            if (z2 > 0.0) scatter_patch(gr, x, 2, -ell * activation_prime(z2, W.q));
        }
    }
}

}  // namespace

Gradient grad_per_sample(const Weights& W, const DataPoint& x, int y) {
    Gradient G = W.zeros_like();
    add_sample_grad(G, W, x, y);
    return G;
}

void accumulate_loss_grad_sum(Gradient& G, const Weights& W, const Dataset& ds,
                              const std::vector<int>& indices) {
    for (int i : indices) {
        const DataPoint& x = ds.points[static_cast<std::size_t>(i)];
        add_sample_grad(G, W, x, x.label);
    }
}

Gradient batch_gradient(const Weights& W, const Dataset& ds, const BatchSpec& batch,
                        DecayMode mode, double lambda) {
    batch.validate(ds.size());
    Gradient G = W.zeros_like();
    accumulate_loss_grad_sum(G, W, ds, batch.indices);
    const double invB = 1.0 / batch.size();
    const double lam = mode == DecayMode::coupled ? lambda : 0.0;
    const std::size_t nw = G.size();
    for (std::size_t k = 0; k < nw; ++k) {
        G.w[k] = G.w[k] * invB + lam * W.w[k];
    }
    return G;
}

double batch_loss(const Weights& W, const Dataset& ds, const BatchSpec& batch, DecayMode mode,
                  double lambda) {
    batch.validate(ds.size());
    double acc = 0.0;
    for (int i : batch.indices) {
        const DataPoint& x = ds.points[static_cast<std::size_t>(i)];
        acc += per_sample_loss(W, x, x.label);
    }
    acc /= batch.size();
    if (mode == DecayMode::coupled) {
        double fro2 = 0.0;
        for (double w : W.w) fro2 += w * w;
        acc += 0.5 * lambda * fro2;
    }
    return acc;
}

Gradient finite_diff_gradient(const Weights& W, const Dataset& ds, const BatchSpec& batch,
                              DecayMode mode, double lambda, double h) {
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be > 0");
    Gradient G = W.zeros_like();
    Weights probe = W;
    const std::size_t nw = W.size();
    for (std::size_t k = 0; k < nw; ++k) {
        const double orig = probe.w[k];
        probe.w[k] = orig + h;
        const double up = batch_loss(probe, ds, batch, mode, lambda);
        probe.w[k] = orig - h;
        const double down = batch_loss(probe, ds, batch, mode, lambda);
        probe.w[k] = orig;
        G.w[k] = (up - down) / (2.0 * h);
    }
    return G;
}

}  // namespace afl

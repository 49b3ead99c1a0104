// Two-layer CNN: F_j(W, x) = sum_r sigma(<w_jr, x1>) + sigma(<w_jr, x2>)
// with sigma(z) = max(z,0)^q, outputs indexed by j in {+1,-1}.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "afl/data.hpp"
#include "afl/errors.hpp"
#include "afl/rng.hpp"

namespace afl {

struct ModelConfig {
    int m = 20;            // neurons per output
    int q = 3;             // activation exponent, >= 3
    double sigma_0 = 0.01; // init standard deviation
    int d = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

// Dense (2, m, d) parameter tensor. Slot 0 holds output j=+1, slot 1 holds
// j=-1. Gradients and moment estimates reuse the same shape.
struct Weights {
    int m = 0;
    int d = 0;
    int q = 3;
    std::vector<double> w;  // size 2*m*d, row-major [slot][r][k]

    Weights() = default;
    Weights(int m_, int d_, int q_) : m(m_), d(d_), q(q_), w(static_cast<std::size_t>(2) * m_ * d_, 0.0) {}

    static int slot(int j) { return j > 0 ? 0 : 1; }

    double* row(int slot_, int r) { return w.data() + (static_cast<std::size_t>(slot_) * m + r) * d; }
    const double* row(int slot_, int r) const {
        return w.data() + (static_cast<std::size_t>(slot_) * m + r) * d;
    }

    double& at(int slot_, int r, int k) { return row(slot_, r)[k]; }
    double at(int slot_, int r, int k) const { return row(slot_, r)[k]; }

    std::size_t size() const { return w.size(); }

    Weights zeros_like() const { return Weights(m, d, q); }

    bool all_finite() const;
};

using Gradient = Weights;  // same shape and layout

// sigma(x) = max(x,0)^q and its derivative q*max(x,0)^(q-1).
inline double activation(double x, int q) {
    if (x <= 0.0) return 0.0;
    double p = x;
    for (int i = 1; i < q; ++i) p *= x;
    return p;
}

inline double activation_prime(double x, int q) {
    if (x <= 0.0) return 0.0;
    double p = 1.0;
    for (int i = 1; i < q; ++i) p *= x;
    return q * p;
}

// Entries i.i.d. N(0, sigma_0^2), drawn in storage order.
Weights init_weights(const ModelConfig& cfg, Rng& rng);
Weights init_weights(const ModelConfig& cfg);  // stream from cfg.seed

double forward_logit(const Weights& W, const DataPoint& x, int j);

// Margin F_y - F_{-y}; the quantity behind losses and error rates.
double forward_margin(const Weights& W, const DataPoint& x, int y);

// Correct iff F_y > F_{-y}; a tie counts as an error.
bool is_correct(const Weights& W, const DataPoint& x, int y);

// Text checkpoint: header "#j=2 m=<m> d=<d> q=<q>", then one line of d
// values per (slot, r) row, slot +1 first. 17 significant digits.
void write_weights(const std::string& path, const Weights& W);
Weights read_weights(const std::string& path);

}  // namespace afl

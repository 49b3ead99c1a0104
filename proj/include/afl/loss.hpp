// Two-class cross-entropy, softmax logit weights, closed-form gradients and
// the finite-difference oracle.
//
// The gradient path evaluates the logit weight through the margin form
// ell_y = 1/(1 + exp(min(max(margin, -700), 700))) so q-th-power logits can
// never overflow and ell_y stays in (0,1) for all finite weights.

#pragma once

#include <vector>

#include "afl/data.hpp"
#include "afl/network.hpp"

namespace afl {

struct BatchSpec {
    std::vector<int> indices;

    int size() const { return static_cast<int>(indices.size()); }
    void validate(int dataset_size) const;  // distinct, in-bounds, non-empty
};

enum class DecayMode {
    none,     // plain averaged loss gradient (AdamW / SignSGDW)
    coupled,  // + lambda * W folded into the gradient (Adam / SignSGD)
};

// ell_j = 1[y=j] - softmax_j(F), computed with max subtraction.
double logit_weight(const Weights& W, const DataPoint& x, int y, int j);

// -log softmax_y(F) = log1p(exp(-margin)), margin clamped to +-700.
double per_sample_loss(const Weights& W, const DataPoint& x, int y);

// grad_{w_jr} L_i = -ell_j [sigma'(<w_jr,x1>) x1 + sigma'(<w_jr,x2>) x2].
Gradient grad_per_sample(const Weights& W, const DataPoint& x, int y);

// Adds the *sum* of per-sample loss gradients over `indices` (in index
// order, unscaled) into G. Shared by batch_gradient and the training loop
// so both produce bit-identical results.
void accumulate_loss_grad_sum(Gradient& G, const Weights& W, const Dataset& ds,
                              const std::vector<int>& indices);

// (1/B) sum_i grad L_i, plus lambda*W when coupled. The final scaling is a
// single pass g[k] = sum[k]*(1/B) + lambda*w[k].
Gradient batch_gradient(const Weights& W, const Dataset& ds, const BatchSpec& batch,
                        DecayMode mode, double lambda);

// Mean per-sample loss over the batch, plus (lambda/2)*||W||_F^2 when
// coupled; the objective differentiated by batch_gradient.
double batch_loss(const Weights& W, const Dataset& ds, const BatchSpec& batch,
                  DecayMode mode, double lambda);

// Central differences of batch_loss, coordinate by coordinate.
Gradient finite_diff_gradient(const Weights& W, const Dataset& ds, const BatchSpec& batch,
                              DecayMode mode, double lambda, double h = 1e-5);

}  // namespace afl

// Error rates, feature-learning / noise-memorization trackers and the
// initialization-scale probe.

#pragma once

#include <vector>

#include "afl/data.hpp"
#include "afl/network.hpp"
#include "afl/rng.hpp"

namespace afl {

// Fraction of points with F_y <= F_{-y} (ties are errors).
double training_error(const Weights& W, const Dataset& ds);

double mean_loss(const Weights& W, const Dataset& ds);

struct TestErrorEstimate {
    double err = 0.0;
    double halfwidth = 0.0;  // 95% normal-approximation half-width
    int n_test = 0;
};

// Monte-Carlo population error over n_test fresh unbalanced samples.
TestErrorEstimate test_error_mc(const Weights& W, const DataConfig& cfg, int n_test, Rng& rng);

// Same estimate against an already-sampled evaluation set.
TestErrorEstimate test_error_on(const Weights& W, const Dataset& test_set);

// max_r <w_{j,r}, j v> = max_r j * W[j,r,0].
double feature_learning(const Weights& W, int j);

enum class Agg { min, max };

// Aggregate over {i : y_i = j} of max_r <w_{j,r}, xi_i>.
double noise_memorization(const Weights& W, const Dataset& ds, int j, Agg agg);

struct InitScaleReport {
    double median_abs_wv = 0.0;      // |<w, v>| over (j,r)
    double median_abs_wxi = 0.0;     // |<w, xi_i>| over (j,r,i)
    double median_abs_coord = 0.0;   // |w[k]| over all entries
    double scale_wv = 0.0;           // sigma_0
    double scale_wxi = 0.0;          // sqrt(s)*sigma_p*sigma_0
    double ratio_wv = 0.0;           // median / scale
    double ratio_wxi = 0.0;
    double ratio_coord = 0.0;
    bool degenerate = false;         // sigma_0 == 0 (all-zero weights)
    bool flagged = false;            // some median off its scale by > 10x
};

InitScaleReport init_scale_report(const Weights& W, const Dataset& ds, const ModelConfig& mcfg,
                                  const DataConfig& dcfg);

// One logged row of a training run. sign_agree and moment_ratio are NaN for
// the sign-based optimizers.
struct MetricsRecord {
    long epoch = 0;
    double train_err = 0.0;
    double test_err = 0.0;
    double test_err_halfwidth = 0.0;
    double mean_loss = 0.0;
    double feat_pos = 0.0;
    double feat_neg = 0.0;
    double noise_min_pos = 0.0;
    double noise_min_neg = 0.0;
    double noise_max_pos = 0.0;
    double noise_max_neg = 0.0;
    double moment_ratio = 0.0;
    double sign_agree = 0.0;
};

}  // namespace afl

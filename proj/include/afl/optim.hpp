// The four update rules: Adam, AdamW, SignSGD, SignSGDW.
//
//   m_{t+1} = beta1 m_t + (1-beta1) g_t        v_{t+1} = beta2 v_t + (1-beta2) g_t^2
//   Adam     w' = w - eta * m/(sqrt(v)+eps)                (g carries coupled decay)
//   AdamW    w' = (1-eta*lambda) w - eta * m/(sqrt(v)+eps) (g decay-free)
//   SignSGD  w' = w - eta * sgn(g)                         (g carries coupled decay)
//   SignSGDW w' = (1-lambda*eta) w - eta * sgn(g)          (g decay-free)
//
// Moments are ingested first and the step uses the refreshed values; the
// one-step-delayed reading of the indices is available via delayed_update.
// bias_correction applies the conventional 1/(1-beta^t) rescaling
// (defaults off: the raw recurrences above have none).

#pragma once

#include <cmath>
#include <string>

#include "afl/errors.hpp"
#include "afl/loss.hpp"
#include "afl/network.hpp"

namespace afl {

enum class OptKind { adam, adamw, signsgd, signsgdw };

const char* opt_kind_name(OptKind k);
OptKind opt_kind_from_name(const std::string& name);

inline bool is_adaptive(OptKind k) { return k == OptKind::adam || k == OptKind::adamw; }

struct OptimizerConfig {
    OptKind kind = OptKind::adam;
    double eta = 5e-5;
    double lambda = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    bool bias_correction = false;
    bool delayed_update = false;  // step with pre-ingest moments

    void validate() const;

    DecayMode decay_mode() const {
        return (kind == OptKind::adam || kind == OptKind::signsgd) ? DecayMode::coupled
                                                                   : DecayMode::none;
    }
};

struct MomentState {
    Weights m;
    Weights v;
    long t = 0;

    static MomentState zeros_like(const Weights& W) {
        MomentState st;
        st.m = W.zeros_like();
        st.v = W.zeros_like();
        st.t = 0;
        return st;
    }
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Bias-correction scalars for the state's step counter: the step applies
// eta * (m*c1) / (sqrt(v)*c2 + eps). Without correction both are 1.
struct StepScale {
    double c1 = 1.0;
    double c2 = 1.0;
};
StepScale step_scale(const OptimizerConfig& cfg, long t);

// --- in-place core (used by the training loop) ---

void update_moments_inplace(MomentState& st, const Gradient& g, const OptimizerConfig& cfg);
void apply_adam_inplace(Weights& W, const MomentState& st, const OptimizerConfig& cfg);
void apply_adamw_inplace(Weights& W, const MomentState& st, const OptimizerConfig& cfg);
void apply_signsgd_inplace(Weights& W, const Gradient& g, const OptimizerConfig& cfg);
void apply_signsgdw_inplace(Weights& W, const Gradient& g, const OptimizerConfig& cfg);

// --- value-returning surface ---

MomentState update_moments(const MomentState& st, const Gradient& g, const OptimizerConfig& cfg);

// Precondition for the adaptive steps: st already ingested g (unless the
// caller runs the delayed ordering on purpose).
Weights step_adam(const Weights& W, const MomentState& st, const Gradient& g,
                  const OptimizerConfig& cfg);
Weights step_adamw(const Weights& W, const MomentState& st, const Gradient& g,
                   const OptimizerConfig& cfg);
Weights step_signsgd(const Weights& W, const Gradient& g, const OptimizerConfig& cfg);
Weights step_signsgdw(const Weights& W, const Gradient& g, const OptimizerConfig& cfg);

// max_k |m_k / (sqrt(v_k)+eps)|: bounded by ratio_bound when beta2 > beta1^2.
double moment_ratio_max(const MomentState& st, const OptimizerConfig& cfg);

// sqrt((1-beta1)^2 / ((1-beta2)(1-beta1^2/beta2))), the closed-form constant
// behind the moment-ratio bound.
double ratio_bound(double beta1, double beta2);

struct SignAgreement {
    double fraction = 1.0;  // over qualifying coordinates; 1 when none qualify
    long qualifying = 0;
};

// Fraction of coordinates with |g| >= threshold where the adaptive step
// direction sgn(-m/(sqrt(v)+eps)) equals -sgn(g).
SignAgreement sign_agreement(const MomentState& st, const Gradient& g,
                             const OptimizerConfig& cfg, double threshold);

// Moment-state checkpoint: three weight blocks (w, m, v) after a "#t=<t>"
// line, each in the weights text format.
void write_moment_state(const std::string& path, const Weights& W, const MomentState& st);
void read_moment_state(const std::string& path, Weights& W, MomentState& st);

}  // namespace afl

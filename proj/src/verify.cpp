// The built-in property suite behind `afl verify`: fast numerical checks of
// the identities and statistics every module must satisfy on a healthy
// build. Each check prints one PASS/FAIL line.

#include <cmath>
#include <cstring>
#include <functional>
#include <ostream>
#include <sstream>

#include "afl/harness.hpp"

namespace afl {

namespace {

Weights random_weights(int m, int d, int q, double scale, Rng& rng) {
    Weights W(m, d, q);
    for (auto& x : W.w) x = rng.normal(0.0, scale);
    return W;
}

Dataset small_dataset(int d, int s, int n, double sigma_p, double alpha, Rng& rng) {
    DataConfig cfg;
    cfg.d = d;
    cfg.n = n;
    cfg.s = s;
    cfg.sigma_p = sigma_p;
    cfg.alpha = alpha;
    cfg.balanced = false;
    return sample_dataset(cfg, rng);
}

bool check_gradient_oracle(std::ostream& log) {
    Rng rng(2024, 77);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 3 + static_cast<int>(rng.uniform_below(6));  // 3..8
        const int s = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(d - 1)));
        const int m = 1 + static_cast<int>(rng.uniform_below(3));
        const int n = 2 + static_cast<int>(rng.uniform_below(4));
        Dataset ds = small_dataset(d, s, n, 0.5, 0.3, rng);
        Weights W = random_weights(m, d, 3, 0.5, rng);
        BatchSpec batch;
        for (int i = 0; i < n; ++i) batch.indices.push_back(i);
        const DecayMode mode = trial % 2 == 0 ? DecayMode::coupled : DecayMode::none;
        const double lambda = trial % 2 == 0 ? 0.01 : 0.0;
        const Gradient analytic = batch_gradient(W, ds, batch, mode, lambda);
        const Gradient fd = finite_diff_gradient(W, ds, batch, mode, lambda, 1e-5);
        for (std::size_t k = 0; k < analytic.size(); ++k) {
            const double denom = std::max({std::fabs(analytic.w[k]), std::fabs(fd.w[k]), 1e-8});
            worst = std::max(worst, std::fabs(analytic.w[k] - fd.w[k]) / denom);
        }
    }
    log << (worst <= 1e-5 ? "PASS" : "FAIL") << " gradient-oracle: max rel err " << worst
        << " (tol 1e-5)\n";
    return worst <= 1e-5;
}

bool check_moment_ratio_bound(std::ostream& log) {
    OptimizerConfig cfg;
    cfg.beta1 = 0.9;
    cfg.beta2 = 0.999;
    cfg.epsilon = 1e-8;
    const double bound = ratio_bound(cfg.beta1, cfg.beta2) + 0.01;
    Rng rng(7, 1);
    double worst = 0.0;
    Weights proto(1, 8, 3);
    // random streams
    for (int rep = 0; rep < 20; ++rep) {
        MomentState st = MomentState::zeros_like(proto);
        for (int t = 0; t < 200; ++t) {
            Gradient g = proto.zeros_like();
            for (auto& x : g.w) x = rng.normal(0.0, std::exp(rng.normal(0.0, 2.0)));
            update_moments_inplace(st, g, cfg);
            worst = std::max(worst, moment_ratio_max(st, cfg));
        }
    }
    // adversarial alternating signs
    {
        MomentState st = MomentState::zeros_like(proto);
        for (int t = 0; t < 1000; ++t) {
            Gradient g = proto.zeros_like();
            for (auto& x : g.w) x = (t % 2 == 0 ? 1.0 : -1.0);
            update_moments_inplace(st, g, cfg);
            worst = std::max(worst, moment_ratio_max(st, cfg));
        }
    }
    const bool ok = worst <= bound;
    log << (ok ? "PASS" : "FAIL") << " moment-ratio-bound: max ratio " << worst << " <= " << bound
        << "\n";
    return ok;
}

bool check_logit_sign_identity(std::ostream& log) {
    Rng rng(11, 3);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int d = 4 + static_cast<int>(rng.uniform_below(5));
        Dataset ds = small_dataset(d, 2, 1, 0.8, 0.4, rng);
        Weights W = random_weights(2, d, 3, 1.0, rng);
        const DataPoint& x = ds.points[0];
        for (int j : {1, -1}) {
            const double lj = logit_weight(W, x, x.label, j);
            ok &= sgn(x.label * lj) == sgn(static_cast<double>(j));
        }
        const double ly = logit_weight(W, x, x.label, x.label);
        ok &= ly > 0.0 && ly < 1.0;
    }
    log << (ok ? "PASS" : "FAIL") << " logit-sign-identity: sgn(y*ell_j) == sgn(j), ell_y in (0,1)\n";
    return ok;
}

bool check_adam_signsgd_degeneration(std::ostream& log) {
    Rng rng(13, 5);
    OptimizerConfig adam_cfg;
    adam_cfg.kind = OptKind::adam;
    adam_cfg.beta1 = 0.0;
    adam_cfg.beta2 = 0.0;
    adam_cfg.epsilon = 1e-16;
    adam_cfg.eta = 1e-3;
    adam_cfg.lambda = 0.01;
    OptimizerConfig sign_cfg = adam_cfg;
    sign_cfg.kind = OptKind::signsgd;
    bool ok = true;
    long compared = 0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const int d = 4 + static_cast<int>(rng.uniform_below(5));
        Dataset ds = small_dataset(d, 2, 3, 0.8, 0.4, rng);
        Weights W = random_weights(2, d, 3, 0.6, rng);
        BatchSpec batch;
        batch.indices = {0, 1, 2};
        const Gradient g = batch_gradient(W, ds, batch, DecayMode::coupled, adam_cfg.lambda);
        MomentState st = MomentState::zeros_like(W);
        update_moments_inplace(st, g, adam_cfg);
        const Weights adam_next = step_adam(W, st, g, adam_cfg);
        const Weights sign_next = step_signsgd(W, g, sign_cfg);
        for (std::size_t k = 0; k < W.size(); ++k) {
            if (g.w[k] == 0.0) continue;
            ++compared;
            ok &= sgn(adam_next.w[k] - W.w[k]) == sgn(sign_next.w[k] - W.w[k]);
        }
    }
    log << (ok ? "PASS" : "FAIL") << " adam-signsgd-degeneration: step directions agree on "
        << compared << " coordinates\n";
    return ok;
}

// Exact all-disjoint probability for n supports of size s over D available
// coordinates: prod_{j=1}^{n-1} C(D - j*s, s) / C(D, s).
double all_disjoint_probability(int D, int s, int n) {
    long double p = 1.0L;
    for (int j = 1; j < n; ++j) {
        // C(D - j*s, s)/C(D, s) = prod_{i=0}^{s-1} (D - j*s - i)/(D - i)
        for (int i = 0; i < s; ++i) {
            p *= static_cast<long double>(D - j * s - i) / static_cast<long double>(D - i);
        }
    }
    return static_cast<double>(1.0L - p);
}

bool check_non_overlap_statistics(std::ostream& log) {
    DataConfig cfg;
    cfg.d = 401;
    cfg.s = 3;
    cfg.n = 10;
    cfg.sigma_p = 0.1;
    cfg.alpha = 0.2;
    cfg.balanced = true;
    const int reps = 200;
    int collided = 0;
    for (int rep = 0; rep < reps; ++rep) {
        cfg.seed = 9000 + static_cast<std::uint64_t>(rep);
        const Dataset ds = sample_dataset(cfg);
        if (!check_non_overlap(ds).all_disjoint) ++collided;
    }
    const double p = all_disjoint_probability(cfg.d - 1, cfg.s, cfg.n);
    const double emp = static_cast<double>(collided) / reps;
    const double slack = 4.0 * std::sqrt(p * (1.0 - p) / reps) + 1.0 / reps;
    const bool ok = std::fabs(emp - p) <= slack;
    log << (ok ? "PASS" : "FAIL") << " non-overlap-statistics: empirical " << emp << " vs exact "
        << p << " (slack " << slack << ")\n";
    return ok;
}

bool check_init_scales(std::ostream& log) {
    DataConfig dcfg;  // table-scale defaults
    dcfg.seed = 5;
    ModelConfig mcfg;
    mcfg.seed = 6;
    const Dataset ds = sample_dataset(dcfg);
    const Weights W = init_weights(mcfg);
    const auto rep = init_scale_report(W, ds, mcfg, dcfg);
    const bool ok = !rep.flagged && !rep.degenerate;
    log << (ok ? "PASS" : "FAIL") << " init-scale: |<w,v>| ratio " << rep.ratio_wv
        << ", |<w,xi>| ratio " << rep.ratio_wxi << " (flag beyond 10x)\n";
    return ok;
}

bool check_moments_replay(std::ostream& log) {
    Rng rng(17, 9);
    OptimizerConfig cfg;
    cfg.beta1 = 0.9;
    cfg.beta2 = 0.999;
    Weights proto(1, 4, 3);
    MomentState st = MomentState::zeros_like(proto);
    std::vector<Gradient> history;
    for (int t = 0; t < 50; ++t) {
        Gradient g = proto.zeros_like();
        for (auto& x : g.w) x = rng.normal(0.0, 1.0);
        history.push_back(g);
        update_moments_inplace(st, g, cfg);
    }
    // naive replay from the stored history
    double worst = 0.0;
    for (std::size_t k = 0; k < proto.size(); ++k) {
        double m = 0.0, v = 0.0;
        for (const auto& g : history) {
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g.w[k];
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.w[k] * g.w[k];
        }
        worst = std::max(worst, std::fabs(m - st.m.w[k]));
        worst = std::max(worst, std::fabs(v - st.v.w[k]));
    }
    const bool ok = worst <= 1e-12 && st.t == 50;
    log << (ok ? "PASS" : "FAIL") << " moments-replay: max abs dev " << worst << "\n";
    return ok;
}

ExperimentConfig tiny_run_config() {
    ExperimentConfig cfg;
    cfg.data = DataConfig{.d = 40, .n = 16, .s = 4, .sigma_p = 0.5, .alpha = 0.3, .seed = 3,
                          .balanced = true};
    cfg.model = ModelConfig{.m = 3, .q = 3, .sigma_0 = 0.05, .d = 40, .seed = 4};
    cfg.optimizer.kind = OptKind::adam;
    cfg.optimizer.eta = 1e-3;
    cfg.optimizer.lambda = 0.0;
    cfg.batch_size = 4;
    cfg.epochs = 50;
    cfg.test_size = 64;
    cfg.metric_period = 10;
    cfg.shuffle_seed = 5;
    return cfg;
}

bool check_decoupling_identity(std::ostream& log) {
    ExperimentConfig cfg = tiny_run_config();
    cfg.optimizer.kind = OptKind::adam;
    cfg.optimizer.lambda = 0.0;
    const RunResult a = train(cfg);
    cfg.optimizer.kind = OptKind::adamw;
    const RunResult b = train(cfg);
    bool ok = a.records.size() == b.records.size();
    if (ok) {
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            ok &= std::memcmp(&a.records[i], &b.records[i], sizeof(MetricsRecord)) == 0;
        }
    }
    log << (ok ? "PASS" : "FAIL") << " decoupling-identity: adam(l=0) == adamw(l=0) records\n";
    return ok;
}

bool check_epoch_partition(std::ostream& log) {
    bool ok = true;
    for (int B : {1, 2, 7, 16}) {
        const auto batches = epoch_batches(16, B, 3, 99);
        std::vector<int> seen(16, 0);
        for (const auto& b : batches) {
            for (int i : b.indices) ++seen[static_cast<std::size_t>(i)];
        }
        for (int c : seen) ok &= c == 1;
    }
    log << (ok ? "PASS" : "FAIL") << " epoch-partition: every index appears exactly once\n";
    return ok;
}

bool check_determinism(std::ostream& log) {
    const ExperimentConfig cfg = tiny_run_config();
    const RunResult a = train(cfg);
    const RunResult b = train(cfg);
    bool ok = a.records.size() == b.records.size();
    if (ok) {
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            ok &= std::memcmp(&a.records[i], &b.records[i], sizeof(MetricsRecord)) == 0;
        }
    }
    log << (ok ? "PASS" : "FAIL") << " determinism: identical configs give identical records\n";
    return ok;
}

}  // namespace

bool verify(std::ostream& log) {
    bool ok = true;
    ok &= check_gradient_oracle(log);
    ok &= check_moment_ratio_bound(log);
    ok &= check_logit_sign_identity(log);
    ok &= check_adam_signsgd_degeneration(log);
    ok &= check_non_overlap_statistics(log);
    ok &= check_init_scales(log);
    ok &= check_moments_replay(log);
    ok &= check_decoupling_identity(log);
    ok &= check_epoch_partition(log);
    ok &= check_determinism(log);
    log << (ok ? "VERIFY OK" : "VERIFY FAILED") << "\n";
    return ok;
}

}  // namespace afl

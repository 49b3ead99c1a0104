#include "afl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "afl/loss.hpp"

namespace afl {

double training_error(const Weights& W, const Dataset& ds) {
    if (ds.size() == 0) throw ConfigError("training_error on empty dataset");
    int wrong = 0;
    for (const auto& p : ds.points) {
        if (!is_correct(W, p, p.label)) ++wrong;
    }
    return static_cast<double>(wrong) / ds.size();
}

double mean_loss(const Weights& W, const Dataset& ds) {
    if (ds.size() == 0) throw ConfigError("mean_loss on empty dataset");
    double acc = 0.0;
    for (const auto& p : ds.points) acc += per_sample_loss(W, p, p.label);
    return acc / ds.size();
}

namespace {

TestErrorEstimate finish_estimate(int wrong, int n) {
    TestErrorEstimate e;
    e.n_test = n;
    e.err = static_cast<double>(wrong) / n;
    e.halfwidth = 1.96 * std::sqrt(e.err * (1.0 - e.err) / n);
    return e;
}

}  // namespace

TestErrorEstimate test_error_mc(const Weights& W, const DataConfig& cfg, int n_test, Rng& rng) {
    if (n_test < 1) throw ConfigError("test_error_mc needs n_test >= 1");
    DataConfig pop = cfg;
    pop.balanced = false;  // err_D is a population quantity
    int wrong = 0;
    for (int i = 0; i < n_test; ++i) {
        const DataPoint p = sample_point(pop, rng);
        if (!is_correct(W, p, p.label)) ++wrong;
    }
    return finish_estimate(wrong, n_test);
}

TestErrorEstimate test_error_on(const Weights& W, const Dataset& test_set) {
    if (test_set.size() == 0) throw ConfigError("empty test set");
    int wrong = 0;
    for (const auto& p : test_set.points) {
        if (!is_correct(W, p, p.label)) ++wrong;
    }
    return finish_estimate(wrong, test_set.size());
}

double feature_learning(const Weights& W, int j) {
    const int slot = Weights::slot(j);
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < W.m; ++r) {
        best = std::max(best, j * W.row(slot, r)[0]);
    }
    return best;
}

double noise_memorization(const Weights& W, const Dataset& ds, int j, Agg agg) {
    const int slot = Weights::slot(j);
    bool any = false;
    double out = 0.0;
    for (const auto& p : ds.points) {
        if (p.label != j) continue;
        double inner = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < W.m; ++r) {
            inner = std::max(inner, p.dot_noise(W.row(slot, r)));
        }
        if (!any) {
            out = inner;
            any = true;
        } else {
            out = agg == Agg::min ? std::min(out, inner) : std::max(out, inner);
        }
    }
    if (!any) throw ConfigError("noise_memorization: no points with the requested label");
    return out;
}

namespace {

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

InitScaleReport init_scale_report(const Weights& W, const Dataset& ds, const ModelConfig& mcfg,
                                  const DataConfig& dcfg) {
    InitScaleReport rep;
    rep.scale_wv = mcfg.sigma_0;
    rep.scale_wxi = std::sqrt(static_cast<double>(dcfg.s)) * dcfg.sigma_p * mcfg.sigma_0;

    std::vector<double> wv, wxi, coords;
    for (int slot = 0; slot < 2; ++slot) {
        for (int r = 0; r < W.m; ++r) {
            const double* row = W.row(slot, r);
            wv.push_back(std::fabs(row[0]));
            for (const auto& p : ds.points) wxi.push_back(std::fabs(p.dot_noise(row)));
            for (int k = 0; k < W.d; ++k) coords.push_back(std::fabs(row[k]));
        }
    }
    rep.median_abs_wv = median(std::move(wv));
    rep.median_abs_wxi = median(std::move(wxi));
    rep.median_abs_coord = median(std::move(coords));

    if (mcfg.sigma_0 == 0.0) {
        rep.degenerate = true;
        rep.flagged = true;
        return rep;
    }
    rep.ratio_wv = rep.median_abs_wv / rep.scale_wv;
    rep.ratio_wxi = rep.median_abs_wxi / rep.scale_wxi;
    rep.ratio_coord = rep.median_abs_coord / rep.scale_wv;
    auto off = [](double ratio) { return ratio > 10.0 || ratio < 0.1; };
    rep.flagged = off(rep.ratio_wv) || off(rep.ratio_wxi) || off(rep.ratio_coord);
    return rep;
}

}  // namespace afl

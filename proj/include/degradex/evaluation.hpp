#pragma once

// Model-comparison metrics (RMSE against cross-unit averages, AIC, KL
// divergence of lifetime densities, Cramer-von Mises distance of
// reliability curves) and the leave-one-stress-level-out extrapolation and
// robustness harnesses.

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "degradex/core.hpp"
#include "degradex/likelihood.hpp"
#include "degradex/optimizer.hpp"
#include "degradex/reliability.hpp"
#include "degradex/types.hpp"

namespace degradex {

struct MetricReport {
    double rmse = 0.0;
    double l_max = 0.0;
    double aic = 0.0;
    std::size_t n_p = 0;
};

struct DivergenceReport {
    double kld = 0.0;
    double cmd = 0.0;
    std::size_t grid_size = 0;
    double censored_fraction_ref = 0.0;
    double censored_fraction_alt = 0.0;
};

inline double aic(double l_max, std::size_t n_p) {
    if (n_p < 1) throw input_error("aic: n_p must be >= 1");
    return -2.0 * l_max + 2.0 * static_cast<double>(n_p);
}

// RMSE of the predicted mean path against the cross-unit average, pooled
// over all levels and times. Ragged grids are reduced to the intersection
// of measurement times within each level.
inline double rmse(const DegradationDataset& data, const ModelParams& p,
                   const ModelVariant& variant, const StressNormalization& norm) {
    data.validate();
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& level : data.levels) {
        // intersection of times across the level's units
        std::vector<double> common = level.units.front().times;
        for (std::size_t i = 1; i < level.units.size(); ++i) {
            const auto& times = level.units[i].times;
            std::vector<double> kept;
            for (double t : common)
                if (std::find(times.begin(), times.end(), t) != times.end()) kept.push_back(t);
            common = std::move(kept);
        }
        if (common.empty())
            throw input_error("rmse: a level has no measurement times shared by all its units");

        for (double t : common) {
            double avg = 0.0;
            for (const auto& u : level.units) {
                auto it = std::find(u.times.begin(), u.times.end(), t);
                avg += u.values[static_cast<std::size_t>(it - u.times.begin())];
            }
            avg /= static_cast<double>(level.units.size());
            double pred = mean_trajectory(p, variant, level.stress, norm, t);
            sum_sq += (avg - pred) * (avg - pred);
            ++count;
        }
    }
    return std::sqrt(sum_sq / static_cast<double>(count));
}

// Discrete KL divergence on a shared grid. Terms with zero reference mass
// contribute nothing; the alternative is floored so the result stays finite.
inline double kld(const std::vector<double>& f_ref, const std::vector<double>& f_alt) {
    if (f_ref.size() != f_alt.size()) throw input_error("kld: mismatched grids");
    constexpr double floor = 1e-12;
    double s = 0.0;
    for (std::size_t i = 0; i < f_ref.size(); ++i) {
        if (f_ref[i] <= 0.0) continue;
        s += f_ref[i] * std::log(f_ref[i] / std::max(f_alt[i], floor));
    }
    return s;
}

// Cramer-von Mises distance: sum of squared pointwise reliability gaps.
inline double cmd(const std::vector<double>& r_ref, const std::vector<double>& r_alt) {
    if (r_ref.size() != r_alt.size()) throw input_error("cmd: mismatched grids");
    double s = 0.0;
    for (std::size_t i = 0; i < r_ref.size(); ++i) {
        double d = r_ref[i] - r_alt[i];
        s += d * d;
    }
    return s;
}

struct LifetimeDensity {
    std::vector<double> values;      // K bins, normalized to sum 1 over crossings
    double censored_fraction = 0.0;  // overflow mass excluded from the bins
};

// Histogram lifetime density on a uniform K-bin grid over [0, horizon].
// Censored lifetimes go to an overflow bin excluded from the density; every
// bin gets a 1e-12 floor so downstream logs stay finite.
inline LifetimeDensity lifetime_density(const LifetimeSample& sample, std::size_t k_bins,
                                        double horizon) {
    if (k_bins < 1) throw input_error("lifetime_density: k_bins must be >= 1");
    LifetimeDensity d;
    d.values.assign(k_bins, 0.0);
    std::size_t crossed = 0;
    for (std::size_t q = 0; q < sample.lifetimes.size(); ++q) {
        if (sample.censored[q]) continue;
        ++crossed;
        auto bin = static_cast<std::size_t>(sample.lifetimes[q] / horizon * static_cast<double>(k_bins));
        d.values[std::min(bin, k_bins - 1)] += 1.0;
    }
    d.censored_fraction = 1.0 - static_cast<double>(crossed) /
                                    static_cast<double>(sample.lifetimes.size());
    if (crossed > 0)
        for (double& v : d.values) v /= static_cast<double>(crossed);
    for (double& v : d.values) v += 1e-12;
    return d;
}

struct LosoReport {
    std::size_t test = 0;  // held-out level index
    VariantKind variant = VariantKind::M0;
    double rmse = 0.0;
    double l_max = 0.0;
};

// Leave-one-stress-level-out extrapolation: fit on k-1 levels, score RMSE
// and log-likelihood on the held-out level.
inline std::vector<LosoReport> loso_extrapolation(const DegradationDataset& data,
                                                  const std::vector<ModelVariant>& variants,
                                                  const StressNormalization& norm,
                                                  const Bounds& bounds,
                                                  const OptimizerConfig& opt_config) {
    data.validate();
    if (data.levels.size() < 2) throw input_error("loso_extrapolation: needs >= 2 levels");

    std::vector<LosoReport> reports;
    for (std::size_t held = 0; held < data.levels.size(); ++held) {
        DegradationDataset train, test;
        for (std::size_t l = 0; l < data.levels.size(); ++l)
            (l == held ? test : train).levels.push_back(data.levels[l]);
        for (std::size_t v = 0; v < variants.size(); ++v) {
            OptimizerConfig c = opt_config;
            c.seed = split_seed(opt_config.seed, 0x4c4f534fULL, held, v);
            FitResult fr = fit(train, variants[v], norm, bounds, c);
            LosoReport r;
            r.test = held;
            r.variant = variants[v].kind;
            r.rmse = rmse(test, fr.params, variants[v], norm);
            r.l_max = total_loglik(fr.params, variants[v], test, norm);
            reports.push_back(r);
        }
    }
    return reports;
}

struct RobustnessReport {
    std::size_t test = 0;
    VariantKind variant = VariantKind::M0;
    DivergenceReport divergence;
};

// Robustness harness: divergence between the reliability prediction of the
// all-data fit and each leave-one-level-out fit, evaluated at a common
// prediction stress on a K-point grid. All curves share the MC seed so a
// duplicated fit diverges by exactly zero.
inline std::vector<RobustnessReport> robustness(const DegradationDataset& data,
                                                const std::vector<ModelVariant>& variants,
                                                const StressNormalization& norm,
                                                const Bounds& bounds,
                                                const OptimizerConfig& opt_config,
                                                const StressVector& prediction_stress,
                                                const MCConfig& mc, std::size_t k_grid = 500) {
    data.validate();
    if (data.levels.size() < 2) throw input_error("robustness: needs >= 2 levels");

    StressProfile profile = StressProfile::constant(prediction_stress, mc.horizon);
    std::vector<double> grid(k_grid);
    for (std::size_t i = 0; i < k_grid; ++i)
        grid[i] = mc.horizon * static_cast<double>(i + 1) / static_cast<double>(k_grid);

    std::vector<RobustnessReport> reports;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        OptimizerConfig c = opt_config;
        c.seed = split_seed(opt_config.seed, 0x524f42ULL, data.levels.size(), v);
        FitResult full = fit(data, variants[v], norm, bounds, c);
        ReliabilityResult all = reliability_curve(full.params, variants[v], profile, norm, mc);
        LifetimeDensity f_all = lifetime_density(all.sample, k_grid, mc.horizon);
        std::vector<double> r_all = reliability_on_grid(all.sample, grid);

        for (std::size_t held = 0; held < data.levels.size(); ++held) {
            DegradationDataset train;
            for (std::size_t l = 0; l < data.levels.size(); ++l)
                if (l != held) train.levels.push_back(data.levels[l]);
            OptimizerConfig ct = opt_config;
            ct.seed = split_seed(opt_config.seed, 0x524f42ULL, held, v);
            FitResult fr = fit(train, variants[v], norm, bounds, ct);
            ReliabilityResult loo = reliability_curve(fr.params, variants[v], profile, norm, mc);
            LifetimeDensity f_test = lifetime_density(loo.sample, k_grid, mc.horizon);

            RobustnessReport r;
            r.test = held;
            r.variant = variants[v].kind;
            r.divergence.kld = kld(f_all.values, f_test.values);
            r.divergence.cmd = cmd(r_all, reliability_on_grid(loo.sample, grid));
            r.divergence.grid_size = k_grid;
            r.divergence.censored_fraction_ref = f_all.censored_fraction;
            r.divergence.censored_fraction_alt = f_test.censored_fraction;
            reports.push_back(r);
        }
    }
    return reports;
}

}  // namespace degradex

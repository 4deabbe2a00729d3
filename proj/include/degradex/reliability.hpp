#pragma once

// Monte Carlo first-passage lifetime and reliability under piecewise-constant
// stress profiles.
//
// Drift accumulation across stress switches follows the equivalent-age rule:
// at each switch the virtual age tau solves
//   mu-drift-so-far = a * e(s_new) * tau^beta,
// which keeps the trajectory continuous and reduces to the plain model on a
// single segment. Because the rule rescales age by rate ratios only, the
// per-segment virtual ages are independent of the sampled coefficient a and
// can be precomputed. Brownian motion accumulates in real time, unaffected
// by switches.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "degradex/core.hpp"
#include "degradex/parallel.hpp"
#include "degradex/rng.hpp"
#include "degradex/types.hpp"

namespace degradex {

struct ProfileSegment {
    double start = 0.0;  // hours
    double end = 0.0;    // hours
    StressVector stress;
};

// Piecewise-constant (temperature, humidity) schedule: contiguous,
// non-overlapping segments starting at 0.
struct StressProfile {
    std::vector<ProfileSegment> segments;

    static StressProfile constant(const StressVector& s, double horizon) {
        return {{{0.0, horizon, s}}};
    }

    void validate() const {
        if (segments.empty()) throw input_error("StressProfile: needs at least one segment");
        if (segments.front().start != 0.0) throw input_error("StressProfile: must start at 0");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (!(segments[i].end > segments[i].start))
                throw input_error("StressProfile: segment end must exceed start");
            segments[i].stress.validate();
            if (i + 1 < segments.size() && segments[i].end != segments[i + 1].start)
                throw input_error("StressProfile: segments must be contiguous");
        }
    }

    double horizon() const { return segments.back().end; }
};

struct MCConfig {
    std::size_t paths = 10000;
    double time_step = 12.0;  // hours
    double horizon = 0.0;     // hours
    double threshold = 0.0;   // failure threshold Y_th (SAR)
    std::uint64_t seed = 0;
    bool include_measurement_noise = false;

    void validate() const {
        if (paths < 1) throw input_error("MCConfig: paths must be >= 1");
        if (!(time_step > 0.0)) throw input_error("MCConfig: time_step must be > 0");
        if (!(horizon >= time_step)) throw input_error("MCConfig: horizon must be >= time_step");
    }
};

struct LifetimeSample {
    std::vector<double> lifetimes;   // hours; censored entries hold the horizon
    std::vector<bool> censored;
    double horizon = 0.0;

    std::size_t censored_count() const {
        std::size_t n = 0;
        for (bool c : censored)
            if (c) ++n;
        return n;
    }
};

struct ReliabilityCurve {
    std::vector<double> grid;    // hours, starting at 0
    std::vector<double> values;  // R(t_i)
    std::vector<double> lower;   // optional confidence band
    std::vector<double> upper;
};

namespace detail {

// Per-segment virtual starting ages under the equivalent-age rule.
inline std::vector<double> segment_virtual_ages(const ModelParams& p, const ModelVariant& variant,
                                                const StressProfile& profile,
                                                const StressNormalization& norm,
                                                std::vector<double>& rates_out) {
    std::vector<double> ages(profile.segments.size(), 0.0);
    rates_out.resize(profile.segments.size());
    for (std::size_t k = 0; k < profile.segments.size(); ++k)
        rates_out[k] = rate(p, variant, profile.segments[k].stress, norm);
    for (std::size_t k = 1; k < profile.segments.size(); ++k) {
        const auto& prev = profile.segments[k - 1];
        double age_end = ages[k - 1] + (prev.end - prev.start);
        // e_prev * age_end^beta == e_k * tau^beta
        ages[k] = age_end * std::pow(rates_out[k - 1] / rates_out[k], 1.0 / p.beta);
    }
    return ages;
}

}  // namespace detail

// Mean (noise-free) drift value at time t under the profile.
inline double profile_mean_drift(const ModelParams& p, const ModelVariant& variant,
                                 const StressProfile& profile, const StressNormalization& norm,
                                 double t) {
    std::vector<double> rates;
    auto ages = detail::segment_virtual_ages(p, variant, profile, norm, rates);
    std::size_t k = 0;
    while (k + 1 < profile.segments.size() && t >= profile.segments[k].end) ++k;
    double age = ages[k] + (t - profile.segments[k].start);
    return p.mu_a * rates[k] * std::pow(age, p.beta);
}

// One simulated degradation trajectory on the uniform grid {0, dt, 2dt, ...}.
inline std::vector<double> simulate_path(const ModelParams& p, const ModelVariant& variant,
                                         const StressProfile& profile,
                                         const StressNormalization& norm, const MCConfig& mc,
                                         std::uint64_t path_seed) {
    std::vector<double> rates;
    auto ages = detail::segment_virtual_ages(p, variant, profile, norm, rates);

    auto rng = make_rng(path_seed, 0x50415448ULL);
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    double y0 = p.mu_y0 + p.sigma_y0 * stdnorm(rng);
    double a = p.mu_a + p.sigma_a * stdnorm(rng);

    std::size_t steps = static_cast<std::size_t>(std::floor(mc.horizon / mc.time_step + 1e-9));
    std::vector<double> traj(steps + 1);
    double sqrt_dt = std::sqrt(mc.time_step);

    double bm = 0.0;
    std::size_t seg = 0;
    for (std::size_t j = 0; j <= steps; ++j) {
        double t = mc.time_step * static_cast<double>(j);
        if (j > 0) bm += sqrt_dt * stdnorm(rng);
        while (seg + 1 < profile.segments.size() && t >= profile.segments[seg].end) ++seg;
        double age = ages[seg] + (t - profile.segments[seg].start);
        double y = y0 + a * rates[seg] * std::pow(age, p.beta) + p.sigma_bm * bm;
        if (mc.include_measurement_noise) y += p.sigma_eps * stdnorm(rng);
        traj[j] = y;
    }
    return traj;
}

struct Lifetime {
    double hours = 0.0;
    bool censored = false;
};

// First grid interval where the trajectory crosses the threshold, refined by
// linear interpolation inside the interval. A path starting at or above the
// threshold gets lifetime 0 (the first grid point).
inline Lifetime lifetime(const std::vector<double>& trajectory, const std::vector<double>& grid,
                         double threshold) {
    for (std::size_t j = 0; j < trajectory.size(); ++j) {
        if (trajectory[j] >= threshold) {
            if (j == 0) return {grid[0], false};
            double frac = (threshold - trajectory[j - 1]) / (trajectory[j] - trajectory[j - 1]);
            return {grid[j - 1] + frac * (grid[j] - grid[j - 1]), false};
        }
    }
    return {grid.back(), true};
}

struct ReliabilityResult {
    ReliabilityCurve curve;
    LifetimeSample sample;
};

// Empirical reliability on a given grid: R(t) = 1 - #{crossed with L <= t}/P.
inline std::vector<double> reliability_on_grid(const LifetimeSample& sample,
                                               const std::vector<double>& grid) {
    std::vector<double> crossed;
    crossed.reserve(sample.lifetimes.size());
    for (std::size_t q = 0; q < sample.lifetimes.size(); ++q)
        if (!sample.censored[q]) crossed.push_back(sample.lifetimes[q]);
    std::sort(crossed.begin(), crossed.end());
    double p_total = static_cast<double>(sample.lifetimes.size());
    std::vector<double> r(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto it = std::upper_bound(crossed.begin(), crossed.end(), grid[i]);
        r[i] = 1.0 - static_cast<double>(it - crossed.begin()) / p_total;
    }
    return r;
}

inline ReliabilityResult reliability_curve(const ModelParams& p, const ModelVariant& variant,
                                           const StressProfile& profile,
                                           const StressNormalization& norm, const MCConfig& mc) {
    profile.validate();
    mc.validate();
    p.validate();

    std::size_t steps = static_cast<std::size_t>(std::floor(mc.horizon / mc.time_step + 1e-9));
    std::vector<double> grid(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) grid[j] = mc.time_step * static_cast<double>(j);

    ReliabilityResult out;
    out.sample.lifetimes.resize(mc.paths);
    out.sample.censored.resize(mc.paths);
    out.sample.horizon = grid.back();

    parallel_for(mc.paths, [&](std::size_t q) {
        auto traj = simulate_path(p, variant, profile, norm, mc, split_seed(mc.seed, q));
        Lifetime lt = lifetime(traj, grid, mc.threshold);
        out.sample.lifetimes[q] = lt.hours;
        out.sample.censored[q] = lt.censored;
    });

    out.curve.grid = grid;
    out.curve.values = reliability_on_grid(out.sample, grid);
    return out;
}

// Linear-interpolation empirical quantile of a sorted sample.
inline double empirical_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw input_error("empirical_quantile: empty sample");
    if (sorted.size() == 1) return sorted[0];
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                                        static_cast<double>(sorted.size() - 2)));
    double frac = pos - static_cast<double>(i);
    return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

// Pointwise reliability bands across subsampled parameter sets. The central
// value is the pointwise median; the bands are the (1-c)/2 and (1+c)/2
// quantiles. All sets share the MC seed so identical sets give identical
// curves.
inline ReliabilityCurve reliability_bands(const std::vector<ModelParams>& param_sets,
                                          const ModelVariant& variant,
                                          const StressProfile& profile,
                                          const StressNormalization& norm, const MCConfig& mc,
                                          double confidence) {
    if (param_sets.size() < 2)
        throw input_error("reliability_bands: need at least 2 parameter sets");
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw input_error("reliability_bands: confidence must be in (0, 1]");

    std::vector<ReliabilityResult> curves(param_sets.size());
    for (std::size_t s = 0; s < param_sets.size(); ++s)
        curves[s] = reliability_curve(param_sets[s], variant, profile, norm, mc);

    ReliabilityCurve out;
    out.grid = curves[0].curve.grid;
    std::size_t n = out.grid.size();
    out.values.resize(n);
    out.lower.resize(n);
    out.upper.resize(n);
    std::vector<double> column(param_sets.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < param_sets.size(); ++s)
            column[s] = curves[s].curve.values[i];
        std::sort(column.begin(), column.end());
        out.values[i] = empirical_quantile(column, 0.5);
        out.lower[i] = empirical_quantile(column, (1.0 - confidence) / 2.0);
        out.upper[i] = empirical_quantile(column, (1.0 + confidence) / 2.0);
    }
    return out;
}

}  // namespace degradex

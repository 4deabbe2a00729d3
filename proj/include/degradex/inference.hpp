#pragma once

// Subsampling-based interval estimation (resampling without replacement)
// and degradation-mechanism determination by sign analysis of the
// temperature coefficient on the two temperature partitions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "degradex/optimizer.hpp"
#include "degradex/parallel.hpp"
#include "degradex/reliability.hpp"
#include "degradex/rng.hpp"
#include "degradex/types.hpp"

namespace degradex {

struct SubsampleConfig {
    double ratio = 0.632;
    std::size_t repeats = 1000;
    double confidence = 0.90;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(ratio > 0.0 && ratio <= 1.0)) throw input_error("SubsampleConfig: ratio must be in (0, 1]");
        if (repeats < 2) throw input_error("SubsampleConfig: repeats must be >= 2");
        if (!(confidence > 0.0 && confidence < 1.0))
            throw input_error("SubsampleConfig: confidence must be in (0, 1)");
    }
};

struct IntervalEstimate {
    std::string name;
    double point = 0.0;          // from the full-data fit
    double lower = 0.0;          // empirical subsample quantiles
    double upper = 0.0;
    std::vector<double> samples; // one estimate per repeat
};

struct IntervalSet {
    FitResult full_fit;
    std::vector<IntervalEstimate> params;  // active parameters in canonical order

    const IntervalEstimate& by_name(const std::string& n) const {
        for (const auto& ie : params)
            if (ie.name == n) return ie;
        throw input_error("IntervalSet: no such parameter " + n);
    }
};

namespace detail {

// Units drawn per level: nearest integer to ratio * n_l, at least 1.
inline std::size_t subsample_size(double ratio, std::size_t n_units) {
    auto n = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n_units)));
    return std::clamp<std::size_t>(n, 1, n_units);
}

inline DegradationDataset draw_subsample(const DegradationDataset& data, double ratio,
                                         std::mt19937_64& rng) {
    DegradationDataset sub;
    sub.levels.reserve(data.levels.size());
    for (const auto& level : data.levels) {
        std::size_t n = level.units.size();
        std::size_t take = subsample_size(ratio, n);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        // partial Fisher-Yates
        for (std::size_t j = 0; j < take; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, n - 1);
            std::swap(idx[j], idx[pick(rng)]);
        }
        StressLevel out;
        out.stress = level.stress;
        for (std::size_t j = 0; j < take; ++j) out.units.push_back(level.units[idx[j]]);
        sub.levels.push_back(std::move(out));
    }
    return sub;
}

}  // namespace detail

// Full-data fit plus W subsample fits; intervals are the (1-c)/2 and
// (1+c)/2 empirical quantiles of the subsample estimates. The W fits are
// independent and run in parallel, keyed by repeat index.
inline IntervalSet subsample_intervals(const DegradationDataset& data, const ModelVariant& variant,
                                       const StressNormalization& norm, const Bounds& bounds,
                                       const OptimizerConfig& opt_config,
                                       const SubsampleConfig& sub_config) {
    data.validate();
    sub_config.validate();

    IntervalSet out;
    out.full_fit = fit(data, variant, norm, bounds, opt_config);

    std::vector<ModelParams> estimates(sub_config.repeats);
    parallel_for(sub_config.repeats, [&](std::size_t w) {
        auto rng = make_rng(sub_config.seed, 0x535542ULL, w);
        DegradationDataset sub = detail::draw_subsample(data, sub_config.ratio, rng);
        OptimizerConfig c = opt_config;
        c.seed = split_seed(sub_config.seed, 0xF17ULL, w);
        estimates[w] = fit(sub, variant, norm, bounds, c).params;
    });

    for (std::size_t i = 0; i < param_count; ++i) {
        if (!variant.is_active(i)) continue;
        IntervalEstimate ie;
        ie.name = param_names[i];
        ie.point = get_param(out.full_fit.params, i);
        ie.samples.resize(sub_config.repeats);
        for (std::size_t w = 0; w < sub_config.repeats; ++w)
            ie.samples[w] = get_param(estimates[w], i);
        std::vector<double> sorted = ie.samples;
        std::sort(sorted.begin(), sorted.end());
        ie.lower = empirical_quantile(sorted, (1.0 - sub_config.confidence) / 2.0);
        ie.upper = empirical_quantile(sorted, (1.0 + sub_config.confidence) / 2.0);
        out.params.push_back(std::move(ie));
    }
    return out;
}

struct MechanismVerdict {
    IntervalEstimate alpha1_low;
    IntervalEstimate alpha1_high;
    double sign_frequency_low = 0.0;   // fraction of subsample estimates > 0
    double sign_frequency_high = 0.0;  // fraction of subsample estimates < 0
    bool transition_detected = false;
    double split_temperature = 0.0;    // kelvin
};

namespace detail {

// Normalization local to a temperature partition; degenerate axes fall back
// to the global window.
inline StressNormalization partition_normalization(const DegradationDataset& part,
                                                   const StressNormalization& global) {
    double t_min = part.levels.front().stress.temperature;
    double t_max = t_min;
    double h_min = part.levels.front().stress.humidity;
    double h_max = h_min;
    for (const auto& level : part.levels) {
        t_min = std::min(t_min, level.stress.temperature);
        t_max = std::max(t_max, level.stress.temperature);
        h_min = std::min(h_min, level.stress.humidity);
        h_max = std::max(h_max, level.stress.humidity);
    }
    StressNormalization n = global;
    if (t_min < t_max) {
        n.t_low = t_min;
        n.t_high = t_max;
    }
    if (h_min < h_max) {
        n.h_low = h_min;
        n.h_high = h_max;
    }
    return n;
}

}  // namespace detail

// Fits the single-regime model separately on the low- and high-temperature
// partitions (each with a partition-local normalization) and reads the
// mechanism off the signs of the temperature coefficient. The sign
// frequencies double as the largest one-sided confidence level at which the
// interval excludes zero.
inline MechanismVerdict determine_mechanism(const DegradationDataset& data,
                                            const StressNormalization& norm, const Bounds& bounds,
                                            const OptimizerConfig& opt_config,
                                            const SubsampleConfig& sub_config,
                                            double split_kelvin) {
    data.validate();

    DegradationDataset low, high;
    for (const auto& level : data.levels) {
        (level.stress.temperature < split_kelvin ? low : high).levels.push_back(level);
    }
    if (low.levels.empty() || high.levels.empty())
        throw input_error("determine_mechanism: a temperature partition is empty at this split");

    ModelVariant m1{VariantKind::M1};
    MechanismVerdict v;
    v.split_temperature = split_kelvin;

    auto run_partition = [&](const DegradationDataset& part, std::uint64_t salt) {
        StressNormalization local = detail::partition_normalization(part, norm);
        SubsampleConfig sc = sub_config;
        sc.seed = split_seed(sub_config.seed, salt);
        OptimizerConfig oc = opt_config;
        oc.seed = split_seed(opt_config.seed, salt);
        return subsample_intervals(part, m1, local, bounds, oc, sc);
    };

    IntervalSet low_set = run_partition(low, 1);
    IntervalSet high_set = run_partition(high, 2);
    v.alpha1_low = low_set.by_name("alpha1");
    v.alpha1_high = high_set.by_name("alpha1");

    auto fraction = [](const std::vector<double>& s, bool positive) {
        std::size_t n = 0;
        for (double x : s)
            if (positive ? x > 0.0 : x < 0.0) ++n;
        return static_cast<double>(n) / static_cast<double>(s.size());
    };
    v.sign_frequency_low = fraction(v.alpha1_low.samples, true);
    v.sign_frequency_high = fraction(v.alpha1_high.samples, false);
    v.transition_detected = v.alpha1_low.point > 0.0 && v.alpha1_high.point < 0.0;
    return v;
}

}  // namespace degradex

#pragma once

// Forward simulation of the full stochastic degradation model: per-unit
// random initial value and rate coefficient, Brownian motion accumulated on
// the measurement grid, i.i.d. measurement noise per reading.

#include <cmath>
#include <cstdint>
#include <vector>

#include "degradex/core.hpp"
#include "degradex/rng.hpp"
#include "degradex/types.hpp"

namespace degradex {

struct ExperimentDesign {
    std::vector<StressVector> levels;
    std::size_t units_per_level = 12;
    double measurement_interval = 12.0;  // hours
    std::size_t measurements_per_unit = 40;

    void validate() const {
        if (levels.empty()) throw input_error("ExperimentDesign: needs at least one level");
        if (units_per_level < 1 || measurements_per_unit < 1)
            throw input_error("ExperimentDesign: counts must be >= 1");
        if (!(measurement_interval > 0.0))
            throw input_error("ExperimentDesign: measurement interval must be > 0");
        for (const auto& s : levels) s.validate();
    }
};

// Eight-level test plan (temperature C, humidity %): 40/50, 40/75, 50/50,
// 50/75, 60/90, 65/75, 85/80, 90/85; 12 units per level measured every 12 h.
inline ExperimentDesign reference_design() {
    ExperimentDesign d;
    const double plan[8][2] = {{40, 50}, {40, 75}, {50, 50}, {50, 75},
                               {60, 90}, {65, 75}, {85, 80}, {90, 85}};
    for (const auto& row : plan)
        d.levels.push_back({celsius_to_kelvin(row[0]), row[1] / 100.0});
    return d;
}

// Standardization window matching the reference design: 40-90 C, 50-90 %.
inline StressNormalization reference_normalization() {
    return {celsius_to_kelvin(40.0), celsius_to_kelvin(90.0), 0.50, 0.90};
}

inline DegradationDataset generate_dataset(const ModelParams& true_params,
                                           const ModelVariant& variant,
                                           const ExperimentDesign& design,
                                           const StressNormalization& norm,
                                           std::uint64_t seed) {
    true_params.validate();
    design.validate();
    norm.validate();

    DegradationDataset data;
    data.levels.resize(design.levels.size());
    for (std::size_t l = 0; l < design.levels.size(); ++l) {
        auto& level = data.levels[l];
        level.stress = design.levels[l];
        level.units.resize(design.units_per_level);
        double e = rate(true_params, variant, level.stress, norm);
        for (std::size_t i = 0; i < design.units_per_level; ++i) {
            auto rng = make_rng(seed, l, i);
            std::normal_distribution<double> stdnorm(0.0, 1.0);
            double y0 = true_params.mu_y0 + true_params.sigma_y0 * stdnorm(rng);
            double a = true_params.mu_a + true_params.sigma_a * stdnorm(rng);

            auto& unit = level.units[i];
            unit.times.resize(design.measurements_per_unit);
            unit.values.resize(design.measurements_per_unit);
            double bm = 0.0;
            double prev_t = 0.0;
            for (std::size_t j = 0; j < design.measurements_per_unit; ++j) {
                double t = design.measurement_interval * static_cast<double>(j + 1);
                bm += std::sqrt(t - prev_t) * stdnorm(rng);
                prev_t = t;
                double eps = true_params.sigma_eps * stdnorm(rng);
                unit.times[j] = t;
                unit.values[j] = y0 + a * e * std::pow(t, true_params.beta) +
                                 true_params.sigma_bm * bm + eps;
            }
        }
    }
    return data;
}

}  // namespace degradex

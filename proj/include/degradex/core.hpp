#pragma once

// Deterministic degradation model: stress standardization, the two-regime
// stress rate with a learnable transition threshold, and the noise-free
// mean trajectory mu_Y0 + mu_a * e(s) * t^beta.

#include <cmath>

#include "degradex/types.hpp"

namespace degradex {

// Arrhenius standardization: 0 at t_low, 1 at t_high, strictly increasing.
// Values outside [0, 1] are permitted extrapolation.
inline double standardize_temperature(double t_kelvin, const StressNormalization& norm) {
    if (!(t_kelvin > 0.0)) throw input_error("standardize_temperature: temperature must be > 0 K");
    return (1.0 / norm.t_low - 1.0 / t_kelvin) / (1.0 / norm.t_low - 1.0 / norm.t_high);
}

// Power-law (log-ratio) standardization for relative humidity.
inline double standardize_humidity(double h, const StressNormalization& norm) {
    if (!(h > 0.0)) throw input_error("standardize_humidity: humidity must be > 0");
    return (std::log(h) - std::log(norm.h_low)) / (std::log(norm.h_high) - std::log(norm.h_low));
}

// Low-regime temperature standardization: 0 at t_low, 1 at t_threshold.
inline double phi1(double t_kelvin, const StressNormalization& norm, double t_threshold) {
    if (!(t_kelvin > 0.0)) throw input_error("phi1: temperature must be > 0 K");
    double denom = 1.0 / norm.t_low - 1.0 / t_threshold;
    if (denom == 0.0) throw input_error("phi1: t_threshold equals t_low (singular denominator)");
    return (1.0 / norm.t_low - 1.0 / t_kelvin) / denom;
}

// High-regime temperature standardization: 0 at t_threshold, 1 at t_high.
inline double phi3(double t_kelvin, const StressNormalization& norm, double t_threshold) {
    if (!(t_kelvin > 0.0)) throw input_error("phi3: temperature must be > 0 K");
    double denom = 1.0 / t_threshold - 1.0 / norm.t_high;
    if (denom == 0.0) throw input_error("phi3: t_threshold equals t_high (singular denominator)");
    return (1.0 / t_threshold - 1.0 / t_kelvin) / denom;
}

// Stress-related degradation rate e(s). Two temperature regimes joined at
// t_threshold for M0/M2/M3; a single regime for M1. Both branches agree at
// the threshold: phi1 -> 1, phi3 -> 0 there.
inline double rate(const ModelParams& p, const ModelVariant& variant,
                   const StressVector& stress, const StressNormalization& norm) {
    double h_std = standardize_humidity(stress.humidity, norm);
    if (variant.kind == VariantKind::M1) {
        double t_std = standardize_temperature(stress.temperature, norm);
        return std::exp(p.alpha1 * t_std + p.alpha2 * h_std);
    }
    if (stress.temperature < p.t_threshold) {
        return std::exp(p.alpha1 * phi1(stress.temperature, norm, p.t_threshold) + p.alpha2 * h_std);
    }
    // alpha3 == 0 pins the high regime flat; skip phi3 so a threshold pinned
    // to t_high stays evaluable at T = t_high.
    double high_term =
        p.alpha3 == 0.0 ? 0.0 : p.alpha3 * phi3(stress.temperature, norm, p.t_threshold);
    return std::exp(p.alpha1 + p.alpha2 * h_std + high_term);
}

// Noise-free mean degradation path.
inline double mean_trajectory(const ModelParams& p, const ModelVariant& variant,
                              const StressVector& stress, const StressNormalization& norm,
                              double t_hours) {
    if (t_hours < 0.0) throw input_error("mean_trajectory: time must be >= 0");
    return p.mu_y0 + p.mu_a * rate(p, variant, stress, norm) * std::pow(t_hours, p.beta);
}

}  // namespace degradex

#pragma once

// Domain types for stress-dependent Wiener-process degradation modeling:
// stress vectors, stress normalization windows, the full parameter vector,
// model-variant masks and multi-level measurement panels.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace degradex {

inline constexpr const char* version_string = "0.1.0";

inline constexpr double kelvin_offset = 273.15;

inline double celsius_to_kelvin(double c) { return c + kelvin_offset; }
inline double kelvin_to_celsius(double k) { return k - kelvin_offset; }

// Input/validation failure (CLI exit code 2).
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Optimization failure (CLI exit code 3).
struct optimization_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Storage stress: absolute temperature and relative humidity fraction.
struct StressVector {
    double temperature = 0.0;  // kelvin
    double humidity = 0.0;     // fraction in (0, 1]

    void validate() const {
        if (!(temperature > 0.0))
            throw input_error("StressVector: temperature must be > 0 K");
        if (!(humidity > 0.0 && humidity <= 1.0))
            throw input_error("StressVector: humidity must be in (0, 1]");
    }
};

// Standardization window: lowest/highest test levels of temperature and
// humidity. Temperature maps through reciprocal absolute temperature
// (Arrhenius), humidity through log ratio (power law).
struct StressNormalization {
    double t_low = 0.0;   // kelvin
    double t_high = 0.0;  // kelvin
    double h_low = 0.0;   // fraction
    double h_high = 0.0;  // fraction

    void validate() const {
        if (!(t_low > 0.0 && t_low < t_high))
            throw input_error("StressNormalization: require 0 < t_low < t_high");
        if (!(h_low > 0.0 && h_low < h_high && h_high <= 1.0))
            throw input_error("StressNormalization: require 0 < h_low < h_high <= 1");
    }
};

// Full parameter vector of the degradation model. Temperatures in kelvin,
// times in hours; mu_a is in SAR/hour^beta so fitted values are
// unit-consistent with the hour-based measurement grid.
struct ModelParams {
    double mu_y0 = 0.0;        // mean initial SAR
    double sigma_y0 = 0.0;     // sd of initial SAR, >= 0
    double mu_a = 0.0;         // mean degradation-rate coefficient
    double sigma_a = 0.0;      // sd of rate coefficient, >= 0
    double alpha1 = 0.0;       // low-regime temperature coefficient
    double alpha2 = 0.0;       // humidity coefficient
    double alpha3 = 0.0;       // high-regime temperature coefficient
    double beta = 1.0;         // timescale exponent, in (0, 2]
    double sigma_bm = 0.0;     // Brownian-motion diffusion, >= 0
    double sigma_eps = 0.0;    // measurement-error sd, >= 0
    double t_threshold = 0.0;  // mechanism-transition temperature, kelvin

    bool valid() const {
        return sigma_y0 >= 0.0 && sigma_a >= 0.0 && sigma_bm >= 0.0 &&
               sigma_eps >= 0.0 && beta > 0.0 && beta <= 2.0;
    }

    void validate() const {
        if (!valid()) throw input_error("ModelParams: sigma fields must be >= 0 and beta in (0, 2]");
    }
};

// Names of the parameter fields in canonical packing order.
inline constexpr std::array<const char*, 11> param_names = {
    "mu_y0", "sigma_y0", "mu_a", "sigma_a", "alpha1", "alpha2",
    "alpha3", "beta", "sigma_bm", "sigma_eps", "t_threshold"};

inline constexpr std::size_t param_count = 11;

inline double get_param(const ModelParams& p, std::size_t i) {
    switch (i) {
        case 0: return p.mu_y0;
        case 1: return p.sigma_y0;
        case 2: return p.mu_a;
        case 3: return p.sigma_a;
        case 4: return p.alpha1;
        case 5: return p.alpha2;
        case 6: return p.alpha3;
        case 7: return p.beta;
        case 8: return p.sigma_bm;
        case 9: return p.sigma_eps;
        case 10: return p.t_threshold;
    }
    throw input_error("get_param: index out of range");
}

inline void set_param(ModelParams& p, std::size_t i, double v) {
    switch (i) {
        case 0: p.mu_y0 = v; return;
        case 1: p.sigma_y0 = v; return;
        case 2: p.mu_a = v; return;
        case 3: p.sigma_a = v; return;
        case 4: p.alpha1 = v; return;
        case 5: p.alpha2 = v; return;
        case 6: p.alpha3 = v; return;
        case 7: p.beta = v; return;
        case 8: p.sigma_bm = v; return;
        case 9: p.sigma_eps = v; return;
        case 10: p.t_threshold = v; return;
    }
    throw input_error("set_param: index out of range");
}

enum class VariantKind { M0, M1, M2, M3 };

inline const char* variant_name(VariantKind k) {
    switch (k) {
        case VariantKind::M0: return "m0";
        case VariantKind::M1: return "m1";
        case VariantKind::M2: return "m2";
        case VariantKind::M3: return "m3";
    }
    return "?";
}

// Model variant: which parameter fields are free. M0 is the full model;
// M1 drops the mechanism transition (alpha3, t_threshold); M2 drops the
// time-dimension and unit-to-unit uncertainties (sigma_a, sigma_bm);
// M3 drops measurement error (sigma_eps).
struct ModelVariant {
    VariantKind kind = VariantKind::M0;

    bool is_active(std::size_t i) const {
        switch (kind) {
            case VariantKind::M0: return true;
            case VariantKind::M1: return i != 6 && i != 10;  // alpha3, t_threshold
            case VariantKind::M2: return i != 3 && i != 8;   // sigma_a, sigma_bm
            case VariantKind::M3: return i != 9;             // sigma_eps
        }
        return false;
    }

    std::size_t n_active() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < param_count; ++i)
            if (is_active(i)) ++n;
        return n;
    }

    // Pins the inactive fields: sigma fields to 0, alpha3 to 0,
    // t_threshold to the top of the normalization window.
    void pin_inactive(ModelParams& p, const StressNormalization& norm) const {
        for (std::size_t i = 0; i < param_count; ++i) {
            if (is_active(i)) continue;
            set_param(p, i, i == 10 ? norm.t_high : 0.0);
        }
    }
};

inline ModelVariant variant_from_name(const std::string& s) {
    if (s == "m0" || s == "M0") return {VariantKind::M0};
    if (s == "m1" || s == "M1") return {VariantKind::M1};
    if (s == "m2" || s == "M2") return {VariantKind::M2};
    if (s == "m3" || s == "M3") return {VariantKind::M3};
    throw input_error("unknown model variant: " + s);
}

// One measured degradation path: strictly increasing positive times (hours)
// and the SAR readings taken at them.
struct UnitSeries {
    std::vector<double> times;
    std::vector<double> values;
};

struct StressLevel {
    StressVector stress;
    std::vector<UnitSeries> units;
};

// Multi-stress-level measurement panel.
struct DegradationDataset {
    std::vector<StressLevel> levels;

    void validate() const {
        if (levels.empty()) throw input_error("dataset: needs at least one stress level");
        for (const auto& lvl : levels) {
            lvl.stress.validate();
            if (lvl.units.empty()) throw input_error("dataset: level with no units");
            for (const auto& u : lvl.units) {
                if (u.times.empty() || u.times.size() != u.values.size())
                    throw input_error("dataset: unit with empty or mismatched series");
                double prev = 0.0;
                for (double t : u.times) {
                    if (!(t > prev)) throw input_error("dataset: times must be strictly increasing and > 0");
                    prev = t;
                }
            }
        }
    }

    std::size_t total_readings() const {
        std::size_t n = 0;
        for (const auto& lvl : levels)
            for (const auto& u : lvl.units) n += u.times.size();
        return n;
    }
};

}  // namespace degradex

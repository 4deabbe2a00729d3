#pragma once

// File formats: the measurement-panel CSV
// (level_id,temperature_c,humidity_pct,unit_id,time_h,sar), curve CSVs
// (t_h,value[,lower,upper]) and JSON conversions for parameters and bounds.
// Temperatures cross the boundary in Celsius and humidity in percent;
// everything is kelvin/fraction internally. Floats are written with 17
// significant digits so ingestion round-trips bit-exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degradex/optimizer.hpp"
#include "degradex/reliability.hpp"
#include "degradex/types.hpp"

namespace degradex {

using json = nlohmann::json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* dataset_csv_header =
    "level_id,temperature_c,humidity_pct,unit_id,time_h,sar";

inline void write_dataset_csv(std::ostream& os, const DegradationDataset& data) {
    os << dataset_csv_header << "\n";
    for (std::size_t l = 0; l < data.levels.size(); ++l) {
        const auto& level = data.levels[l];
        std::string temp_c = format_double(kelvin_to_celsius(level.stress.temperature));
        std::string hum = format_double(level.stress.humidity * 100.0);
        for (std::size_t i = 0; i < level.units.size(); ++i) {
            const auto& u = level.units[i];
            for (std::size_t j = 0; j < u.times.size(); ++j) {
                os << (l + 1) << ',' << temp_c << ',' << hum << ',' << (i + 1) << ','
                   << format_double(u.times[j]) << ',' << format_double(u.values[j]) << "\n";
            }
        }
    }
}

inline void write_dataset_csv(const std::string& path, const DegradationDataset& data) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    write_dataset_csv(os, data);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, std::size_t line_no, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw input_error("malformed " + std::string(what) + " at line " +
                          std::to_string(line_no) + ": '" + s + "'");
    }
}

}  // namespace detail

inline DegradationDataset ingest_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || detail::split_csv_line(line) != detail::split_csv_line(dataset_csv_header))
        throw input_error(std::string("CSV header must be exactly: ") + dataset_csv_header);

    struct LevelAccum {
        StressVector stress;
        std::vector<long long> unit_order;
        std::map<long long, UnitSeries> units;
    };
    std::vector<long long> level_order;
    std::map<long long, LevelAccum> levels;

    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 6)
            throw input_error("malformed row at line " + std::to_string(line_no) +
                              ": expected 6 fields, got " + std::to_string(f.size()));
        long long level_id = static_cast<long long>(detail::parse_double(f[0], line_no, "level_id"));
        double temp_k = celsius_to_kelvin(detail::parse_double(f[1], line_no, "temperature_c"));
        double hum = detail::parse_double(f[2], line_no, "humidity_pct") / 100.0;
        long long unit_id = static_cast<long long>(detail::parse_double(f[3], line_no, "unit_id"));
        double time_h = detail::parse_double(f[4], line_no, "time_h");
        double sar = detail::parse_double(f[5], line_no, "sar");

        auto [it, inserted] = levels.try_emplace(level_id);
        if (inserted) {
            level_order.push_back(level_id);
            it->second.stress = {temp_k, hum};
        } else if (it->second.stress.temperature != temp_k || it->second.stress.humidity != hum) {
            throw input_error("inconsistent stress for level " + std::to_string(level_id) +
                              " at line " + std::to_string(line_no));
        }
        auto [uit, unit_new] = it->second.units.try_emplace(unit_id);
        if (unit_new) it->second.unit_order.push_back(unit_id);
        auto& series = uit->second;
        if (!series.times.empty() && time_h <= series.times.back()) {
            if (time_h == series.times.back())
                throw input_error("duplicate time for level " + std::to_string(level_id) +
                                  ", unit " + std::to_string(unit_id) + ", time " +
                                  format_double(time_h));
            throw input_error("non-increasing times for level " + std::to_string(level_id) +
                              ", unit " + std::to_string(unit_id));
        }
        series.times.push_back(time_h);
        series.values.push_back(sar);
    }

    DegradationDataset data;
    for (long long lid : level_order) {
        const auto& acc = levels.at(lid);
        StressLevel level;
        level.stress = acc.stress;
        for (long long uid : acc.unit_order) level.units.push_back(acc.units.at(uid));
        data.levels.push_back(std::move(level));
    }
    data.validate();
    return data;
}

inline DegradationDataset ingest_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open data file: " + path);
    return ingest_csv(is);
}

inline void write_curve_csv(const std::string& path, const ReliabilityCurve& curve) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    bool bands = !curve.lower.empty();
    os << (bands ? "t_h,value,lower,upper" : "t_h,value") << "\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        os << format_double(curve.grid[i]) << ',' << format_double(curve.values[i]);
        if (bands) os << ',' << format_double(curve.lower[i]) << ',' << format_double(curve.upper[i]);
        os << "\n";
    }
}

inline void write_series_csv(const std::string& path, const std::vector<double>& t,
                             const std::vector<double>& value) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot open for writing: " + path);
    os << "t_h,value\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        os << format_double(t[i]) << ',' << format_double(value[i]) << "\n";
}

// JSON boundary convention: t_threshold in Celsius, everything else as-is.
inline json params_to_json(const ModelParams& p) {
    json j;
    for (std::size_t i = 0; i < param_count; ++i) {
        if (i == 10) j["t_threshold_c"] = kelvin_to_celsius(p.t_threshold);
        else j[param_names[i]] = get_param(p, i);
    }
    return j;
}

inline ModelParams params_from_json(const json& j) {
    ModelParams p;
    for (std::size_t i = 0; i < param_count; ++i) {
        const char* key = i == 10 ? "t_threshold_c" : param_names[i];
        if (!j.contains(key)) throw input_error(std::string("params: missing field ") + key);
        double v = j.at(key).get<double>();
        set_param(p, i, i == 10 ? celsius_to_kelvin(v) : v);
    }
    return p;
}

inline json bounds_to_json(const Bounds& b) {
    json j;
    for (std::size_t i = 0; i < param_count; ++i) {
        if (i == 10)
            j["t_threshold_c"] = {kelvin_to_celsius(b.lower[i]), kelvin_to_celsius(b.upper[i])};
        else
            j[param_names[i]] = {b.lower[i], b.upper[i]};
    }
    return j;
}

inline Bounds bounds_from_json(const json& j, const Bounds& defaults) {
    Bounds b = defaults;
    for (const auto& [key, val] : j.items()) {
        bool known = false;
        for (std::size_t i = 0; i < param_count; ++i) {
            const char* name = i == 10 ? "t_threshold_c" : param_names[i];
            if (key != name) continue;
            known = true;
            if (!val.is_array() || val.size() != 2)
                throw input_error("bounds: " + key + " must be [lower, upper]");
            double lo = val[0].get<double>();
            double hi = val[1].get<double>();
            if (i == 10) {
                lo = celsius_to_kelvin(lo);
                hi = celsius_to_kelvin(hi);
            }
            b.lower[i] = lo;
            b.upper[i] = hi;
        }
        if (!known) throw input_error("bounds: unknown parameter " + key);
    }
    return b;
}

}  // namespace degradex

// degradex command-line front end.
//
// Subcommands: simulate, fit, intervals, mechanism, reliability, compare,
// profile-predict. Configuration comes from a JSON file (--config) with
// flag overrides; every run writes a manifest recording the effective
// config, seed and code version. Exit codes: 0 ok, 2 input error,
// 3 optimization failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "degradex/degradex.hpp"

namespace fs = std::filesystem;
using degradex::json;

namespace {

void require_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw degradex::input_error(std::string("config: unknown key '") + key + "' in " + where);
    }
}

struct RunConfig {
    std::string variant = "m0";
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string data;
    std::size_t threads = 0;

    degradex::StressNormalization norm = degradex::reference_normalization();
    degradex::Bounds bounds = degradex::default_bounds();
    degradex::OptimizerConfig opt;
    degradex::SubsampleConfig sub;
    degradex::MCConfig mc;
    std::optional<degradex::StressProfile> profile;
    std::optional<degradex::ExperimentDesign> design;
    std::optional<degradex::ModelParams> true_params;
    std::optional<degradex::ModelParams> params;
    std::optional<degradex::StressVector> prediction;
    double split_c = 60.0;
    bool bands = false;
    std::size_t k_grid = 500;

    json echo;  // effective config for the manifest
};

degradex::StressVector stress_from_json(const json& j, const char* where) {
    require_keys(j, where, {"temperature_c", "humidity_pct"});
    return {degradex::celsius_to_kelvin(j.at("temperature_c").get<double>()),
            j.at("humidity_pct").get<double>() / 100.0};
}

RunConfig parse_config(const json& j) {
    require_keys(j, "top level",
                 {"variant", "seed", "out_dir", "data", "threads", "normalization", "bounds",
                  "optimizer", "subsample", "mc", "profile", "design", "true_params", "params",
                  "prediction", "split_c", "bands", "k_grid"});
    RunConfig c;
    c.echo = j;
    if (j.contains("variant")) c.variant = j.at("variant").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("data")) c.data = j.at("data").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
    if (j.contains("split_c")) c.split_c = j.at("split_c").get<double>();
    if (j.contains("bands")) c.bands = j.at("bands").get<bool>();
    if (j.contains("k_grid")) c.k_grid = j.at("k_grid").get<std::size_t>();

    if (j.contains("normalization")) {
        const auto& n = j.at("normalization");
        require_keys(n, "normalization", {"t_low_c", "t_high_c", "h_low_pct", "h_high_pct"});
        c.norm = {degradex::celsius_to_kelvin(n.at("t_low_c").get<double>()),
                  degradex::celsius_to_kelvin(n.at("t_high_c").get<double>()),
                  n.at("h_low_pct").get<double>() / 100.0,
                  n.at("h_high_pct").get<double>() / 100.0};
    }
    if (j.contains("bounds")) c.bounds = degradex::bounds_from_json(j.at("bounds"), c.bounds);
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        require_keys(o, "optimizer", {"population", "max_iterations", "algorithm"});
        if (o.contains("population")) c.opt.population = o.at("population").get<std::size_t>();
        if (o.contains("max_iterations"))
            c.opt.max_iterations = o.at("max_iterations").get<std::size_t>();
        if (o.contains("algorithm")) {
            std::string a = o.at("algorithm").get<std::string>();
            if (a == "rime_style") c.opt.algorithm = degradex::Algorithm::rime_style;
            else if (a == "nelder_mead") c.opt.algorithm = degradex::Algorithm::nelder_mead;
            else throw degradex::input_error("config: unknown algorithm '" + a + "'");
        }
    }
    if (j.contains("subsample")) {
        const auto& s = j.at("subsample");
        require_keys(s, "subsample", {"ratio", "repeats", "confidence"});
        if (s.contains("ratio")) c.sub.ratio = s.at("ratio").get<double>();
        if (s.contains("repeats")) c.sub.repeats = s.at("repeats").get<std::size_t>();
        if (s.contains("confidence")) c.sub.confidence = s.at("confidence").get<double>();
    }
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        require_keys(m, "mc",
                     {"paths", "time_step_h", "horizon_h", "threshold", "include_measurement_noise"});
        if (m.contains("paths")) c.mc.paths = m.at("paths").get<std::size_t>();
        if (m.contains("time_step_h")) c.mc.time_step = m.at("time_step_h").get<double>();
        if (m.contains("horizon_h")) c.mc.horizon = m.at("horizon_h").get<double>();
        if (m.contains("threshold")) c.mc.threshold = m.at("threshold").get<double>();
        if (m.contains("include_measurement_noise"))
            c.mc.include_measurement_noise = m.at("include_measurement_noise").get<bool>();
    }
    if (j.contains("profile")) {
        degradex::StressProfile p;
        for (const auto& seg : j.at("profile")) {
            require_keys(seg, "profile segment",
                         {"start_h", "end_h", "temperature_c", "humidity_pct"});
            degradex::StressVector s{
                degradex::celsius_to_kelvin(seg.at("temperature_c").get<double>()),
                seg.at("humidity_pct").get<double>() / 100.0};
            p.segments.push_back({seg.at("start_h").get<double>(), seg.at("end_h").get<double>(), s});
        }
        p.validate();
        c.profile = p;
    }
    if (j.contains("design")) {
        const auto& d = j.at("design");
        require_keys(d, "design",
                     {"levels", "units_per_level", "measurement_interval_h", "measurements_per_unit"});
        degradex::ExperimentDesign design;
        design.levels.clear();
        for (const auto& lv : d.at("levels"))
            design.levels.push_back(stress_from_json(lv, "design level"));
        if (d.contains("units_per_level"))
            design.units_per_level = d.at("units_per_level").get<std::size_t>();
        if (d.contains("measurement_interval_h"))
            design.measurement_interval = d.at("measurement_interval_h").get<double>();
        if (d.contains("measurements_per_unit"))
            design.measurements_per_unit = d.at("measurements_per_unit").get<std::size_t>();
        c.design = design;
    }
    if (j.contains("true_params")) c.true_params = degradex::params_from_json(j.at("true_params"));
    if (j.contains("params")) c.params = degradex::params_from_json(j.at("params"));
    if (j.contains("prediction")) c.prediction = stress_from_json(j.at("prediction"), "prediction");
    return c;
}

void write_manifest(const RunConfig& c, const std::string& command) {
    json m;
    m["command"] = command;
    m["version"] = degradex::version_string;
    m["seed"] = c.seed;
    m["config"] = c.echo;
    m["timestamp_utc"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    std::ofstream os(fs::path(c.out_dir) / "manifest.json");
    os << m.dump(2) << "\n";
}

json fit_result_to_json(const degradex::FitResult& fr, const degradex::ModelVariant& variant) {
    json j;
    j["variant"] = degradex::variant_name(variant.kind);
    j["loglik"] = fr.loglik;
    j["iterations_used"] = fr.iterations_used;
    json params = degradex::params_to_json(fr.params);
    json active;
    for (std::size_t i = 0; i < degradex::param_count; ++i) {
        const char* key = i == 10 ? "t_threshold_c" : degradex::param_names[i];
        if (variant.is_active(i)) active[key] = params.at(key);
    }
    j["params"] = params;
    j["active_params"] = active;
    return j;
}

degradex::DegradationDataset load_data(const RunConfig& c) {
    if (c.data.empty()) throw degradex::input_error("this command requires --data (or config 'data')");
    return degradex::ingest_csv(c.data);
}

degradex::ModelParams point_params(const RunConfig& c, const degradex::ModelVariant& variant,
                                   const degradex::DegradationDataset* data) {
    if (c.params) return *c.params;
    if (!data) throw degradex::input_error("need either 'params' in config or --data to fit");
    degradex::OptimizerConfig oc = c.opt;
    oc.seed = c.seed;
    return degradex::fit(*data, variant, c.norm, c.bounds, oc).params;
}

int run_command(const std::string& command, RunConfig& c) {
    fs::create_directories(c.out_dir);
    degradex::set_thread_count(c.threads);
    degradex::ModelVariant variant = degradex::variant_from_name(c.variant);
    degradex::OptimizerConfig oc = c.opt;
    oc.seed = c.seed;
    degradex::SubsampleConfig sc = c.sub;
    sc.seed = c.seed;
    degradex::MCConfig mc = c.mc;
    mc.seed = c.seed;

    if (command == "simulate") {
        if (!c.true_params) throw degradex::input_error("simulate requires config 'true_params'");
        degradex::ExperimentDesign design = c.design ? *c.design : degradex::reference_design();
        auto data = degradex::generate_dataset(*c.true_params, variant, design, c.norm, c.seed);
        degradex::write_dataset_csv((fs::path(c.out_dir) / "data.csv").string(), data);
    } else if (command == "fit") {
        auto data = load_data(c);
        auto fr = degradex::fit(data, variant, c.norm, c.bounds, oc);
        json j = fit_result_to_json(fr, variant);
        std::ofstream os(fs::path(c.out_dir) / "fit.json");
        os << j.dump(2) << "\n";
    } else if (command == "intervals") {
        auto data = load_data(c);
        auto set = degradex::subsample_intervals(data, variant, c.norm, c.bounds, oc, sc);
        json j;
        j["fit"] = fit_result_to_json(set.full_fit, variant);
        for (const auto& ie : set.params) {
            j["intervals"][ie.name] = {{"point", ie.point}, {"lower", ie.lower}, {"upper", ie.upper}};
        }
        std::ofstream os(fs::path(c.out_dir) / "intervals.json");
        os << j.dump(2) << "\n";
        // subsample estimates, one column per parameter
        std::ofstream samples(fs::path(c.out_dir) / "samples.csv");
        for (std::size_t i = 0; i < set.params.size(); ++i)
            samples << (i ? "," : "") << set.params[i].name;
        samples << "\n";
        for (std::size_t w = 0; w < sc.repeats; ++w) {
            for (std::size_t i = 0; i < set.params.size(); ++i)
                samples << (i ? "," : "") << degradex::format_double(set.params[i].samples[w]);
            samples << "\n";
        }
    } else if (command == "mechanism") {
        auto data = load_data(c);
        auto v = degradex::determine_mechanism(data, c.norm, c.bounds, oc, sc,
                                               degradex::celsius_to_kelvin(c.split_c));
        json j;
        j["split_c"] = degradex::kelvin_to_celsius(v.split_temperature);
        j["transition_detected"] = v.transition_detected;
        j["sign_frequency_low"] = v.sign_frequency_low;
        j["sign_frequency_high"] = v.sign_frequency_high;
        j["alpha1_low"] = {{"point", v.alpha1_low.point},
                           {"lower", v.alpha1_low.lower},
                           {"upper", v.alpha1_low.upper}};
        j["alpha1_high"] = {{"point", v.alpha1_high.point},
                            {"lower", v.alpha1_high.lower},
                            {"upper", v.alpha1_high.upper}};
        std::ofstream os(fs::path(c.out_dir) / "mechanism.json");
        os << j.dump(2) << "\n";
    } else if (command == "reliability" || command == "profile-predict") {
        degradex::StressProfile profile;
        if (c.profile) {
            profile = *c.profile;
            if (mc.horizon == 0.0) mc.horizon = profile.horizon();
        } else if (c.prediction) {
            if (mc.horizon == 0.0)
                throw degradex::input_error("constant-stress prediction requires mc.horizon_h");
            profile = degradex::StressProfile::constant(*c.prediction, mc.horizon);
        } else {
            throw degradex::input_error(command + " requires config 'profile' or 'prediction'");
        }

        degradex::DegradationDataset data;
        bool have_data = !c.data.empty();
        if (have_data) data = load_data(c);
        auto params = point_params(c, variant, have_data ? &data : nullptr);

        auto result = degradex::reliability_curve(params, variant, profile, c.norm, mc);
        degradex::ReliabilityCurve curve = result.curve;

        if (c.bands) {
            if (!have_data)
                throw degradex::input_error("confidence bands require --data for subsampling");
            auto set = degradex::subsample_intervals(data, variant, c.norm, c.bounds, oc, sc);
            std::vector<degradex::ModelParams> param_sets(sc.repeats);
            for (std::size_t w = 0; w < sc.repeats; ++w) {
                degradex::ModelParams p;
                variant.pin_inactive(p, c.norm);
                for (const auto& ie : set.params) {
                    for (std::size_t i = 0; i < degradex::param_count; ++i)
                        if (ie.name == degradex::param_names[i])
                            degradex::set_param(p, i, ie.samples[w]);
                }
                param_sets[w] = p;
            }
            auto banded = degradex::reliability_bands(param_sets, variant, profile, c.norm, mc,
                                                      sc.confidence);
            curve.lower = banded.lower;
            curve.upper = banded.upper;
        }
        degradex::write_curve_csv((fs::path(c.out_dir) / "reliability.csv").string(), curve);

        json summary;
        summary["paths"] = mc.paths;
        summary["censored_fraction"] =
            static_cast<double>(result.sample.censored_count()) / static_cast<double>(mc.paths);
        summary["params"] = degradex::params_to_json(params);
        std::ofstream os(fs::path(c.out_dir) / "lifetimes.json");
        os << summary.dump(2) << "\n";

        if (command == "profile-predict") {
            std::vector<double> mean(curve.grid.size());
            for (std::size_t i = 0; i < curve.grid.size(); ++i)
                mean[i] = params.mu_y0 +
                          degradex::profile_mean_drift(params, variant, profile, c.norm, curve.grid[i]);
            degradex::write_series_csv((fs::path(c.out_dir) / "degradation.csv").string(),
                                       curve.grid, mean);
        }
    } else if (command == "compare") {
        auto data = load_data(c);
        if (!c.prediction) throw degradex::input_error("compare requires config 'prediction'");
        if (mc.horizon == 0.0) throw degradex::input_error("compare requires mc.horizon_h");
        std::vector<degradex::ModelVariant> variants = {{degradex::VariantKind::M0},
                                                        {degradex::VariantKind::M1},
                                                        {degradex::VariantKind::M2},
                                                        {degradex::VariantKind::M3}};
        auto loso = degradex::loso_extrapolation(data, variants, c.norm, c.bounds, oc);
        auto robust = degradex::robustness(data, variants, c.norm, c.bounds, oc, *c.prediction, mc,
                                           c.k_grid);
        json j;
        for (const auto& r : loso)
            j["extrapolation"].push_back({{"test", r.test},
                                          {"variant", degradex::variant_name(r.variant)},
                                          {"rmse", r.rmse},
                                          {"l_max", r.l_max}});
        for (const auto& r : robust)
            j["robustness"].push_back({{"test", r.test},
                                       {"variant", degradex::variant_name(r.variant)},
                                       {"kld", r.divergence.kld},
                                       {"cmd", r.divergence.cmd},
                                       {"grid_size", r.divergence.grid_size}});
        std::ofstream os(fs::path(c.out_dir) / "compare.json");
        os << j.dump(2) << "\n";
    } else {
        throw degradex::input_error("unknown command: " + command);
    }

    write_manifest(c, command);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degradex: stress-dependent Wiener-process degradation modeling"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global options after the subcommand name

    std::string config_path, data_path, out_dir, variant;
    std::int64_t seed = -1;
    std::int64_t threads = -1;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "master seed (overrides config)");
    app.add_option("--out-dir", out_dir, "output directory (overrides config)");
    app.add_option("--data", data_path, "input panel CSV (overrides config)");
    app.add_option("--variant", variant, "model variant m0|m1|m2|m3 (overrides config)");
    app.add_option("--threads", threads, "worker threads, 0 = auto (overrides config)");

    for (const char* name : {"simulate", "fit", "intervals", "mechanism", "reliability",
                             "compare", "profile-predict"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    try {
        json raw = json::object();
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw degradex::input_error("cannot open config file: " + config_path);
            try {
                raw = json::parse(is);
            } catch (const json::exception& e) {
                throw degradex::input_error(std::string("config parse failure: ") + e.what());
            }
        }
        RunConfig c = parse_config(raw);
        if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
        if (!out_dir.empty()) c.out_dir = out_dir;
        if (!data_path.empty()) c.data = data_path;
        if (!variant.empty()) c.variant = variant;
        if (threads >= 0) c.threads = static_cast<std::size_t>(threads);
        else if (const char* env = std::getenv("DEGRADEX_THREADS"))
            c.threads = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));

        return run_command(app.get_subcommands().front()->get_name(), c);
    } catch (const degradex::input_error& e) {
        std::cerr << "error:input: " << e.what() << "\n";
        return 2;
    } catch (const degradex::optimization_error& e) {
        std::cerr << "error:optimization: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error:internal: " << e.what() << "\n";
        return 1;
    }
}

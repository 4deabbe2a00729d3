#include <catch2/catch_amalgamated.hpp>

#include "degradex/evaluation.hpp"
#include "degradex/synth.hpp"
#include "test_util.hpp"

using namespace degradex;

namespace {
const StressNormalization kNorm = reference_normalization();
}

TEST_CASE("aic arithmetic") {
    CHECK(aic(0.0, 1) == 2.0);
    CHECK(aic(-461.19, 11) == Catch::Approx(944.38).margin(1e-10));
    CHECK(aic(-461.19, 9) == Catch::Approx(940.38).margin(1e-10));
    CHECK(aic(100.0, 2) == -196.0);
    CHECK_THROWS_AS(aic(0.0, 0), input_error);
}

TEST_CASE("rmse trivial cases") {
    ModelParams p = testutil::reference_truth();
    ModelVariant m0{VariantKind::M0};
    StressVector s{celsius_to_kelvin(50.0), 0.75};

    DegradationDataset data;
    StressLevel level;
    level.stress = s;
    std::vector<double> times = {12.0, 24.0, 36.0};
    UnitSeries u1, u2;
    u1.times = u2.times = times;
    for (double t : times) {
        double mu = mean_trajectory(p, m0, s, kNorm, t);
        u1.values.push_back(mu);
        u2.values.push_back(mu);
    }
    level.units = {u1, u2};
    data.levels = {level};

    SECTION("exact mean data gives zero") {
        CHECK(rmse(data, p, m0, kNorm) == Catch::Approx(0.0).margin(1e-14));
    }

    SECTION("a constant cross-unit offset is returned exactly") {
        // unit values mean + 0.5 and mean - 0.1 average to mean + 0.2
        for (double& v : data.levels[0].units[0].values) v += 0.5;
        for (double& v : data.levels[0].units[1].values) v -= 0.1;
        CHECK(rmse(data, p, m0, kNorm) == Catch::Approx(0.2).epsilon(1e-12));
    }

    SECTION("ragged grids reduce to the shared times") {
        data.levels[0].units[1].times = {12.0, 36.0, 48.0};
        data.levels[0].units[1].values = {mean_trajectory(p, m0, s, kNorm, 12.0),
                                          mean_trajectory(p, m0, s, kNorm, 36.0), 99.0};
        // shared times are 12 and 36 where both units sit on the mean
        CHECK(rmse(data, p, m0, kNorm) == Catch::Approx(0.0).margin(1e-14));

        data.levels[0].units[1].times = {100.0, 200.0, 300.0};
        CHECK_THROWS_AS(rmse(data, p, m0, kNorm), input_error);
    }
}

TEST_CASE("kld identities") {
    std::vector<double> f = {0.2, 0.3, 0.5};
    std::vector<double> g = {0.6, 0.3, 0.1};
    CHECK(kld(f, f) == Catch::Approx(0.0).margin(1e-15));
    CHECK(kld(f, g) > 0.0);
    // asymmetric in general
    CHECK(kld(f, g) != Catch::Approx(kld(g, f)).margin(1e-12));
    // direct arithmetic
    double expect = 0.2 * std::log(0.2 / 0.6) + 0.3 * std::log(0.3 / 0.3) + 0.5 * std::log(0.5 / 0.1);
    CHECK(kld(f, g) == Catch::Approx(expect).epsilon(1e-14));
    // zero reference mass contributes nothing
    CHECK(kld({0.0, 1.0}, {0.7, 1.0}) == Catch::Approx(0.0).margin(1e-15));
    // zero alternative mass is floored, not infinite
    double floored = kld({1.0, 0.0}, {0.0, 1.0});
    CHECK(std::isfinite(floored));
    CHECK(floored == Catch::Approx(std::log(1e12)).epsilon(1e-10));
    CHECK_THROWS_AS(kld({1.0}, {0.5, 0.5}), input_error);
}

TEST_CASE("cmd identities") {
    std::vector<double> r = {1.0, 0.8, 0.5, 0.1};
    std::vector<double> q = {1.0, 0.7, 0.4, 0.2};
    CHECK(cmd(r, r) == 0.0);
    CHECK(cmd(r, q) == Catch::Approx(0.01 + 0.01 + 0.01).epsilon(1e-12));
    CHECK(cmd(r, q) == cmd(q, r));  // symmetric, unlike kld
    CHECK_THROWS_AS(cmd({1.0}, {0.5, 0.5}), input_error);
}

TEST_CASE("lifetime density histogram") {
    LifetimeSample s;
    s.lifetimes = {5.0, 15.0, 15.0, 95.0, 100.0};
    s.censored = {false, false, false, false, true};
    s.horizon = 100.0;

    auto d = lifetime_density(s, 10, 100.0);
    REQUIRE(d.values.size() == 10);
    CHECK(d.censored_fraction == Catch::Approx(0.2));
    CHECK(d.values[0] == Catch::Approx(0.25 + 1e-12));
    CHECK(d.values[1] == Catch::Approx(0.5 + 1e-12));
    CHECK(d.values[9] == Catch::Approx(0.25 + 1e-12));
    for (std::size_t i : {2, 3, 4, 5, 6, 7, 8}) CHECK(d.values[i] == 1e-12);

    double total = 0.0;
    for (double v : d.values) total += v;
    CHECK(total == Catch::Approx(1.0 + 10e-12).epsilon(1e-12));

    // all censored: density is the bare floor
    LifetimeSample cens;
    cens.lifetimes = {50.0, 50.0};
    cens.censored = {true, true};
    auto dc = lifetime_density(cens, 4, 100.0);
    CHECK(dc.censored_fraction == 1.0);
    for (double v : dc.values) CHECK(v == 1e-12);

    CHECK_THROWS_AS(lifetime_density(s, 0, 100.0), input_error);
}

TEST_CASE("kld between lifetime densities scales consistently with the bin count") {
    // same two samples histogrammed at K and 2K: divergence stays the same
    // order of magnitude and identical samples always give zero
    ModelParams p = testutil::reference_truth();
    ModelVariant m0{VariantKind::M0};
    StressVector hot{celsius_to_kelvin(60.0), 0.90};
    auto profile = StressProfile::constant(hot, 960.0);
    MCConfig mc;
    mc.paths = 2000;
    mc.time_step = 12.0;
    mc.horizon = 960.0;
    mc.threshold = 9.6;
    mc.seed = 77;
    auto a = reliability_curve(p, m0, profile, kNorm, mc);
    mc.seed = 78;
    auto b = reliability_curve(p, m0, profile, kNorm, mc);

    for (std::size_t k : {20, 40}) {
        auto fa = lifetime_density(a.sample, k, mc.horizon);
        auto fb = lifetime_density(b.sample, k, mc.horizon);
        CHECK(kld(fa.values, fa.values) == Catch::Approx(0.0).margin(1e-15));
        double d = kld(fa.values, fb.values);
        CHECK(d >= 0.0);
        CHECK(d < 0.1);  // same law, different seeds: small divergence
    }
}

TEST_CASE("leave-one-level-out extrapolation and robustness run end to end") {
    ModelParams truth = testutil::reference_truth();
    ModelVariant m2{VariantKind::M2};
    ExperimentDesign d;
    d.levels = {{celsius_to_kelvin(50.0), 0.75}, {celsius_to_kelvin(85.0), 0.80}};
    d.units_per_level = 4;
    d.measurements_per_unit = 10;
    auto data = generate_dataset(truth, m2, d, kNorm, 55);

    OptimizerConfig oc;
    oc.population = 8;
    oc.max_iterations = 60;
    oc.seed = 3;
    Bounds bounds = default_bounds();

    auto loso = loso_extrapolation(data, {m2}, kNorm, bounds, oc);
    REQUIRE(loso.size() == 2);
    for (const auto& r : loso) {
        CHECK(r.variant == VariantKind::M2);
        CHECK(std::isfinite(r.rmse));
        CHECK(r.rmse >= 0.0);
        CHECK(std::isfinite(r.l_max));
    }
    CHECK(loso[0].test == 0);
    CHECK(loso[1].test == 1);

    MCConfig mc;
    mc.paths = 400;
    mc.time_step = 24.0;
    mc.horizon = 960.0;
    mc.threshold = 9.6;
    mc.seed = 5;
    auto rob = robustness(data, {m2}, kNorm, bounds, oc, {celsius_to_kelvin(60.0), 0.90}, mc, 40);
    REQUIRE(rob.size() == 2);
    for (const auto& r : rob) {
        // floored histogram densities are not exactly normalized, so the
        // divergence can undershoot zero by rounding
        CHECK(r.divergence.kld >= -1e-9);
        CHECK(r.divergence.cmd >= 0.0);
        CHECK(r.divergence.grid_size == 40);
        CHECK(std::isfinite(r.divergence.kld));
    }

    DegradationDataset single;
    single.levels = {data.levels[0]};
    CHECK_THROWS_AS(loso_extrapolation(single, {m2}, kNorm, bounds, oc), input_error);
}

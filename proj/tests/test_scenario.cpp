#include <doctest.h>

#include <cmath>
#include <fstream>

#include "frp/scenario.hpp"
#include "support.hpp"

using namespace frp;

namespace {

PowerSystem one_solar_system(double capacity = 500.0) {
    PowerSystem sys = test::make_system(1, {}, {test::make_generator(0, 10, {{90, 20}}, 10)});
    sys.solar_units.push_back({0, 0, capacity, 1.0});
    return sys;
}

UncertaintyConfig sigma15(double frac) {
    UncertaintyConfig cfg;
    cfg.sigma_hourly_frac = 2.0 * frac;
    return cfg;
}

}  // namespace

TEST_CASE("bundled profile has 96 points and an evening netload ramp") {
    const PowerSystem sys = load_system(test::data_dir() / "toy5" / "system.json");
    const ForecastProfile p = load_profiles(test::data_dir() / "toy5" / "profile_hourly.csv",
                                            test::data_dir() / "toy5" / "profile_15min.csv", sys);
    CHECK(p.num_intervals() == kIntervalsPerDay);
    CHECK(p.hourly_load.size() == 24);
    CHECK(p.netload(76) > p.netload(52) + 50.0);
    // Solar is split across units by share.
    CHECK(p.solar[48][0] == doctest::Approx(p.total_solar(48) * sys.solar_units[0].share));
}

TEST_CASE("constant load profile has no variability") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = test::flat_profile(sys, 1000.0);
    for (int t = 1; t < p.num_intervals(); ++t) CHECK(p.netload(t) == p.netload(0));
    for (double h : p.hourly_load) CHECK(h == 1000.0);
}

TEST_CASE("profile with 95 intervals is rejected") {
    const auto dir = test::scratch_dir("profile95");
    {
        std::ofstream q(dir / "q.csv");
        q << "interval_index,load_mw,solar_total_mw\n";
        for (int t = 0; t < 95; ++t) q << t << ",100,0\n";
        std::ofstream h(dir / "h.csv");
        h << "interval_index,load_mw,solar_total_mw\n";
        for (int t = 0; t < 24; ++t) h << t << ",100,0\n";
    }
    CHECK_THROWS_AS(load_profiles(dir / "h.csv", dir / "q.csv", one_solar_system()), DataError);
}

TEST_CASE("scenario sampling is reproducible and order independent") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = make_profile("ramp", std::vector<double>(96, 800.0), std::vector<double>(96, 100.0), sys);
    UncertaintyConfig cfg;
    cfg.seed = 42;
    const ScenarioSet a = sample_scenarios(p, sys, cfg, 10, ScenarioKind::training);
    const ScenarioSet b = sample_scenarios(p, sys, cfg, 10, ScenarioKind::training);
    const ScenarioSet c = sample_scenarios(p, sys, cfg, 4, ScenarioKind::training);
    REQUIRE(a.size() == 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(a.scenarios[i].load == b.scenarios[i].load);
        CHECK(a.scenarios[i].solar == b.scenarios[i].solar);
    }
    for (int i = 0; i < 4; ++i) CHECK(a.scenarios[i].load == c.scenarios[i].load);
    CHECK(a.scenarios[0].load != a.scenarios[1].load);

    cfg.seed = 43;
    const ScenarioSet d = sample_scenarios(p, sys, cfg, 1, ScenarioKind::training);
    CHECK(d.scenarios[0].load != a.scenarios[0].load);
}

TEST_CASE("zero sigma reproduces the forecast") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = make_profile("f", std::vector<double>(96, 700.0), std::vector<double>(96, 50.0), sys);
    const ScenarioSet s = sample_scenarios(p, sys, sigma15(0.0), 3, ScenarioKind::out_of_sample);
    for (const auto& sc : s.scenarios) {
        CHECK(sc.load == p.load);
        CHECK(sc.solar == p.solar);
    }
}

TEST_CASE("sample standard deviation matches the configured sigma") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = test::flat_profile(sys, 1000.0, 0.0);
    const ScenarioSet s = sample_scenarios(p, sys, sigma15(0.025), 10000, ScenarioKind::training);
    double sum = 0.0, sq = 0.0;
    for (const auto& sc : s.scenarios) {
        sum += sc.load[10];
        sq += sc.load[10] * sc.load[10];
    }
    const double n = s.size();
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
    CHECK(sd == doctest::Approx(25.0).epsilon(0.05));
}

TEST_CASE("deployment quantiles") {
    SUBCASE("two scenarios sit at +-1.96 sigma") {
        const auto z = deployment_quantiles(2);
        REQUIRE(z.size() == 2);
        CHECK(z[0] == doctest::Approx(1.96));
        CHECK(z[1] == doctest::Approx(-1.96));
    }
    SUBCASE("four scenarios add the 20/80 pair") {
        const auto z = deployment_quantiles(4);
        REQUIRE(z.size() == 4);
        CHECK(z[0] == doctest::Approx(1.96));
        CHECK(z[1] == doctest::Approx(0.8416).epsilon(1e-3));
        CHECK(z[2] == doctest::Approx(-0.8416).epsilon(1e-3));
        CHECK(z[3] == doctest::Approx(-1.96));
    }
    CHECK_THROWS(deployment_quantiles(1));
}

TEST_CASE("deployment scenarios shift load up and solar down together") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = make_profile("f", std::vector<double>(96, 1000.0), std::vector<double>(96, 100.0), sys);
    const ScenarioSet dep = select_deployment_scenarios(p, sys, sigma15(0.025), 2);
    REQUIRE(dep.size() == 2);
    CHECK(dep.scenarios[0].kind == ScenarioKind::deployment);
    CHECK(dep.scenarios[0].load[5] == doctest::Approx(1049.0));
    CHECK(dep.scenarios[0].solar[5][0] == doctest::Approx(100.0 - 4.9));
    CHECK(dep.scenarios[1].load[5] == doctest::Approx(951.0));

    const ScenarioSet flat = select_deployment_scenarios(p, sys, sigma15(0.0), 2);
    for (const auto& s : flat.scenarios) CHECK(s.load == p.load);
}

TEST_CASE("proxy envelope") {
    const PowerSystem sys = one_solar_system(500.0);
    SUBCASE("1000 MW at 2.5% gives [951, 1049]") {
        const ForecastProfile p = test::flat_profile(sys, 1000.0, 0.0);
        const ProxyEnvelope env = proxy_envelopes(p, sys, sigma15(0.025));
        CHECK(env.load_min[3] == doctest::Approx(951.0));
        CHECK(env.load_max[3] == doctest::Approx(1049.0));
    }
    SUBCASE("zero sigma collapses to the forecast") {
        const ForecastProfile p = test::flat_profile(sys, 1000.0, 40.0);
        const ProxyEnvelope env = proxy_envelopes(p, sys, sigma15(0.0));
        CHECK(env.load_min[0] == 1000.0);
        CHECK(env.load_max[0] == 1000.0);
        CHECK(env.total_solar_min(0) == doctest::Approx(40.0));
        CHECK(env.total_solar_max(0) == doctest::Approx(40.0));
    }
    SUBCASE("solar lower envelope clamps at zero") {
        // 10 MW forecast with a 25 MW sigma.
        const ForecastProfile p = test::flat_profile(sys, 1000.0, 10.0);
        const ProxyEnvelope env = proxy_envelopes(p, sys, sigma15(2.5));
        CHECK(env.solar_min[0][0] == 0.0);
        CHECK(env.solar_max[0][0] == doctest::Approx(10.0 + 1.96 * 25.0));
    }
}

TEST_CASE("scenario CSV round trip is exact") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = make_profile("f", std::vector<double>(96, 812.3), std::vector<double>(96, 77.7), sys);
    const ScenarioSet a = sample_scenarios(p, sys, UncertaintyConfig{}, 3, ScenarioKind::out_of_sample);
    const auto dir = test::scratch_dir("scenario_csv");
    write_scenarios_csv(a, dir / "s.csv");
    const ScenarioSet b = read_scenarios_csv(dir / "s.csv", a.config);
    REQUIRE(b.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(b.scenarios[i].load == a.scenarios[i].load);
        CHECK(b.scenarios[i].solar == a.scenarios[i].solar);
        CHECK(b.scenarios[i].seed == a.scenarios[i].seed);
    }
}

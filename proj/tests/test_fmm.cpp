#include <doctest.h>

#include <cmath>
#include <random>

#include "frp/fmm.hpp"
#include "support.hpp"

using namespace frp;

namespace {

DaCommitments all_on(const PowerSystem& sys) {
    DaCommitments da;
    da.u.assign(sys.num_generators(), std::vector<int>(24, 1));
    da.p.assign(sys.num_generators(), std::vector<double>(24, 0.0));
    return da;
}

UncertaintyConfig sigma15(double frac) {
    UncertaintyConfig cfg;
    cfg.sigma_hourly_frac = 2.0 * frac;
    return cfg;
}

struct Fixture {
    PowerSystem sys;
    PtdfMatrix ptdf;
    DaCommitments da;
    ForecastProfile profile;
    Scenario forecast;
    ProxyEnvelope envelope;
    UncertaintyConfig uncertainty;

    FmmInputs inputs() const { return {&sys, &ptdf, &da}; }
};

void finish(Fixture& f, const std::vector<double>& load, double sigma_frac) {
    f.ptdf = compute_ptdf(f.sys);
    if (f.da.u.empty()) f.da = all_on(f.sys);
    f.profile = make_profile("test", load, std::vector<double>(load.size(), 0.0), f.sys);
    f.forecast = forecast_scenario(f.profile, ScenarioKind::training);
    f.uncertainty = sigma15(sigma_frac);
    f.envelope = proxy_envelopes(f.profile, f.sys, f.uncertainty);
}

// Cheap unit at bus 0 exporting over one line to the load at bus 1, which
// also hosts an expensive unit. Load climbs 2 MW per interval.
Fixture two_bus(double rating, double sigma_frac = 0.025) {
    Fixture f;
    f.sys = test::make_system(2, {{0, 0, 1, 0.1, rating}},
                              {test::make_generator(0, 0, {{200, 10}}, 60), test::make_generator(1, 0, {{300, 40}}, 60)},
                              1, {0.0, 1.0});
    std::vector<double> load(kIntervalsPerDay);
    for (int t = 0; t < kIntervalsPerDay; ++t) load[t] = 100.0 + 2.0 * t;
    finish(f, load, sigma_frac);
    return f;
}

RampResponseFactors zero_factors(int generators, int scenarios) {
    RampResponseFactors r;
    r.zeta.assign(generators, std::vector<std::vector<double>>(kIntervalsPerDay, std::vector<double>(scenarios, 0.0)));
    r.has_model.assign(generators, true);
    return r;
}

Scenario series(std::vector<double> load, std::vector<double> solar) {
    Scenario s;
    s.load = std::move(load);
    for (double v : solar) s.solar.push_back({v});
    return s;
}

ProxyEnvelope envelope_at_next(double load_min, double load_max, double solar_min, double solar_max) {
    ProxyEnvelope env;
    env.load_min = {0.0, load_min};
    env.load_max = {0.0, load_max};
    env.solar_min = {{0.0}, {solar_min}};
    env.solar_max = {{0.0}, {solar_max}};
    return env;
}

MilpSolution solve_tight(const MilpModel& model) {
    SolveOptions opts;
    opts.mip_rel_gap = 1e-9;
    return solve(model, opts);
}

}  // namespace

TEST_CASE("proxy requirement from the envelope") {
    // Forecast netload 100 - 20 = 80; envelope extremes at t+1 are 110 - 10 and 95 - 25.
    const Scenario forecast = series({100, 100}, {20, 20});
    const FrpRequirements req = compute_frp_requirements(envelope_at_next(95, 110, 10, 25), forecast);
    REQUIRE(req.up.size() == 1);
    CHECK(req.up[0] == doctest::Approx(20.0));
    CHECK(req.down[0] == doctest::Approx(10.0));

    SUBCASE("flat netload with no spread needs nothing") {
        const FrpRequirements flat = compute_frp_requirements(envelope_at_next(80, 80, 0, 0), series({80, 80}, {0, 0}));
        CHECK(flat.up[0] == 0.0);
        CHECK(flat.down[0] == 0.0);
    }
    SUBCASE("a 30 MW drop is all downward") {
        const FrpRequirements drop =
            compute_frp_requirements(envelope_at_next(70, 70, 0, 0), series({100, 70}, {0, 0}));
        CHECK(drop.up[0] == 0.0);
        CHECK(drop.down[0] == doctest::Approx(30.0));
    }
}

TEST_CASE("netload change of a deployment scenario") {
    const Scenario forecast = series({100, 100}, {0, 0});
    CHECK(delta_netload(forecast, series({100, 115}, {0, 0}))[0] == doctest::Approx(15.0));
    CHECK(delta_netload(forecast, series({100, 100}, {0, 0}))[0] == 0.0);
    CHECK(delta_netload(forecast, series({100, 100}, {0, 30}))[0] == doctest::Approx(-30.0));
    CHECK_THROWS(delta_netload(forecast, series({100}, {0})));
}

TEST_CASE("units switching state get one-sided awards") {
    GenerationResource g0 = test::make_generator(0, 20, {{80, 10}}, 30);
    g0.ramp_startup = 50;
    g0.ramp_shutdown = 40;
    Fixture f;
    f.sys = test::make_system(1, {}, {g0, test::make_generator(0, 0, {{300, 50}}, 300)});
    f.da = all_on(f.sys);

    SUBCASE("shutting down: no upward award, downward award up to the shutdown ramp") {
        for (int h = 1; h < 24; ++h) f.da.u[0][h] = 0;
        finish(f, std::vector<double>(kIntervalsPerDay, 100.0), 0.0);
        const FmmModel base = build_fmm_proxy(f.inputs(), f.forecast, f.envelope, hourly_horizon(0, {}));

        FmmModel up = base;
        up.model.add_constraint("probe", {{up.ur[0][3], 1.0}}, Sense::greater_equal, 0.01);
        CHECK(solve(up.model).status == SolveStatus::infeasible);

        FmmModel down = base;
        down.model.add_constraint("probe", {{down.dr[0][3], 1.0}}, Sense::greater_equal, 40.0);
        REQUIRE(solve(down.model).optimal());
        down.model.add_constraint("probe_more", {{down.dr[0][3], 1.0}}, Sense::greater_equal, 40.01);
        CHECK(solve(down.model).status == SolveStatus::infeasible);
    }
    SUBCASE("starting up: no downward award, upward award up to the startup ramp") {
        f.da.u[0][0] = 0;
        finish(f, std::vector<double>(kIntervalsPerDay, 100.0), 0.0);
        const FmmModel base = build_fmm_proxy(f.inputs(), f.forecast, f.envelope, hourly_horizon(0, {}));

        FmmModel down = base;
        down.model.add_constraint("probe", {{down.dr[0][3], 1.0}}, Sense::greater_equal, 0.01);
        CHECK(solve(down.model).status == SolveStatus::infeasible);

        FmmModel up = base;
        up.model.add_constraint("probe", {{up.ur[0][3], 1.0}}, Sense::greater_equal, 50.0);
        REQUIRE(solve(up.model).optimal());
        up.model.add_constraint("probe_more", {{up.ur[0][3], 1.0}}, Sense::greater_equal, 50.01);
        CHECK(solve(up.model).status == SolveStatus::infeasible);
    }
}

TEST_CASE("zero requirements reduce the proxy model to energy only") {
    Fixture f;
    f.sys = test::make_system(1, {}, {test::make_generator(0, 10, {{90, 10}}, 30), test::make_generator(0, 10, {{90, 30}}, 30)});
    finish(f, std::vector<double>(kIntervalsPerDay, 150.0), 0.0);
    const FmmHorizon horizon = hourly_horizon(5, {});
    const FmmModel proxy = build_fmm_proxy(f.inputs(), f.forecast, f.envelope, horizon);
    for (double r : proxy.requirements.up) CHECK(r == 0.0);
    const FmmModel energy = build_fmm_training(f.inputs(), f.forecast, horizon);
    const MilpSolution a = solve_tight(proxy.model);
    const MilpSolution b = solve_tight(energy.model);
    REQUIRE(a.optimal());
    REQUIRE(b.optimal());
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("the only unit able to ramp carries the whole award") {
    Fixture f;
    f.sys = test::make_system(1, {}, {test::make_generator(0, 0, {{200, 30}}, 25), test::make_generator(0, 0, {{200, 10}}, 0)});
    finish(f, std::vector<double>(kIntervalsPerDay, 100.0), 0.0);
    for (double& v : f.envelope.load_max) v += 20.0;
    const FmmModel m = build_fmm_proxy(f.inputs(), f.forecast, f.envelope, hourly_horizon(8, {}));
    const MilpSolution sol = solve_tight(m.model);
    REQUIRE(sol.optimal());
    CHECK(check_solution(m.model, sol).empty());
    for (int t = 0; t + 1 < m.length(); ++t) {
        CHECK(sol.value(m.ur[0][t]) == doctest::Approx(20.0));
        CHECK(sol.value(m.ur[1][t]) == doctest::Approx(0.0));
    }
}

TEST_CASE("training model follows its scenario") {
    Fixture f;
    f.sys = test::make_system(1, {}, {test::make_generator(0, 10, {{190, 10}}, 60), test::make_generator(0, 10, {{190, 30}}, 20)});
    finish(f, std::vector<double>(kIntervalsPerDay, 150.0), 0.0);
    Scenario day = f.forecast;

    SUBCASE("a 50 MW step is balanced") {
        for (int t = 44; t < kIntervalsPerDay; ++t) day.load[t] += 50.0;
        const FmmModel m = build_fmm_training(f.inputs(), day, hourly_horizon(10, {}));
        const MilpSolution sol = solve_tight(m.model);
        REQUIRE(sol.optimal());
        double before = 0.0, after = 0.0;
        for (int g = 0; g < 2; ++g) {
            before += sol.value(m.vars.p[g][3]);
            after += sol.value(m.vars.p[g][4]);
        }
        CHECK(after - before == doctest::Approx(50.0));
        CHECK(sol.value(m.vars.shortfall[4]) == doctest::Approx(0.0));
    }
    SUBCASE("a step beyond the ramp capability is shed at VOLL") {
        for (int t = 44; t < kIntervalsPerDay; ++t) day.load[t] += 150.0;
        std::vector<UnitInitialState> init = {{true, 140.0, 100}, {true, 10.0, 100}};
        const FmmModel m = build_fmm_training(f.inputs(), day, hourly_horizon(10, init));
        const MilpSolution sol = solve_tight(m.model);
        REQUIRE(sol.optimal());
        CHECK(sol.value(m.vars.shortfall[4]) > 1.0);
    }
    CHECK_THROWS(build_fmm_training(f.inputs(), forecast_scenario(f.profile, ScenarioKind::out_of_sample),
                                    hourly_horizon(0, {})));
}

TEST_CASE("data-driven model tightens the proxy") {
    const Fixture f = two_bus(1e4);
    const ScenarioSet dep = select_deployment_scenarios(f.profile, f.sys, f.uncertainty, 2);
    const FmmHorizon horizon = hourly_horizon(10, {});
    const FmmModel proxy = build_fmm_proxy(f.inputs(), f.forecast, f.envelope, horizon);
    const MilpSolution ps = solve_tight(proxy.model);
    REQUIRE(ps.optimal());

    SUBCASE("zero factors never lower the objective") {
        FmmModel dd = build_fmm_datadriven(f.inputs(), f.forecast, f.envelope, horizon, zero_factors(2, 2), dep);
        const CutLoopResult r = solve_with_cuts(dd);
        REQUIRE(r.converged);
        CHECK(r.solution.objective >= ps.objective - 1e-6);
    }
    SUBCASE("a factor of 0.8 forces at least 0.8 of the ramp into the award") {
        RampResponseFactors factors = zero_factors(2, 2);
        for (auto& row : factors.zeta[0]) row[0] = 0.8;
        FmmModel dd = build_fmm_datadriven(f.inputs(), f.forecast, f.envelope, horizon, factors, dep);
        const CutLoopResult r = solve_with_cuts(dd);
        REQUIRE(r.converged);
        int events = 0;
        for (int t = 0; t + 1 < dd.length(); ++t) {
            if (dd.event_sign(0, t) != 1) continue;
            ++events;
            CHECK(r.solution.value(dd.ur[0][t]) >= 0.8 * 60.0 - 1e-6);
        }
        CHECK(events > 0);
    }
    SUBCASE("mismatched factor shape is rejected") {
        CHECK_THROWS(build_fmm_datadriven(f.inputs(), f.forecast, f.envelope, horizon, zero_factors(2, 3), dep));
    }
}

TEST_CASE("post-deployment flow on two buses") {
    const Fixture f = two_bus(1e4);
    const ScenarioSet dep = select_deployment_scenarios(f.profile, f.sys, f.uncertainty, 2);
    FmmModel dd = build_fmm_datadriven(f.inputs(), f.forecast, f.envelope, hourly_horizon(10, {}), zero_factors(2, 2), dep);
    const CutLoopResult r = solve_with_cuts(dd);
    REQUIRE(r.converged);
    CHECK(r.cuts.empty());
    CHECK(r.rounds == 1);

    REQUIRE(dd.event_sign(0, 2) == 1);
    std::vector<double> values = r.solution.values;
    const double before = post_deployment_flows(dd, values, 0, Direction::up)[0][2];
    const double before_down = post_deployment_flows(dd, values, 0, Direction::down)[0][2];
    values[dd.aux[0][0][2]] += 10.0;
    const double after = post_deployment_flows(dd, values, 0, Direction::up)[0][2];
    // The slack is the load bus, so 10 MW more at bus 0 is 10 MW more on the line.
    CHECK(std::abs(f.ptdf(0, 0)) == doctest::Approx(1.0));
    CHECK(after - before == doctest::Approx(10.0 * f.ptdf(0, 0)));
    // An upward event contributes nothing to the downward flows.
    CHECK(post_deployment_flows(dd, values, 0, Direction::down)[0][2] == doctest::Approx(before_down));
}

TEST_CASE("post-deployment expression matches a direct DC solve") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> bus_pick(0, 4);
    std::uniform_real_distribution<double> noise(0.0, 15.0);
    for (int trial = 0; trial < 5; ++trial) {
        CAPTURE(trial);
        Fixture f;
        f.sys = test::random_network(rng, 5, 2);
        for (auto& line : f.sys.lines) line.rating = 1e5;
        for (int g = 0; g < 3; ++g) {
            GenerationResource gen = test::make_generator(bus_pick(rng), 0, {{300, 10.0 + 10 * g}}, 60);
            gen.id = g;
            gen.name = "G" + std::to_string(g);
            f.sys.generators.push_back(gen);
        }
        f.sys.solar_units.push_back({0, bus_pick(rng), 200.0, 1.0});
        f.da = all_on(f.sys);
        f.ptdf = compute_ptdf(f.sys);
        std::vector<double> load(kIntervalsPerDay), solar(kIntervalsPerDay);
        for (int t = 0; t < kIntervalsPerDay; ++t) {
            load[t] = 300.0 + 3.0 * t;
            solar[t] = 50.0 + (t % 7) * 4.0;
        }
        f.profile = make_profile("random", load, solar, f.sys);
        f.forecast = forecast_scenario(f.profile, ScenarioKind::training);
        f.uncertainty = sigma15(0.025);
        f.envelope = proxy_envelopes(f.profile, f.sys, f.uncertainty);
        const ScenarioSet dep = select_deployment_scenarios(f.profile, f.sys, f.uncertainty, 2);
        FmmModel dd = build_fmm_datadriven(f.inputs(), f.forecast, f.envelope, hourly_horizon(12, {}), zero_factors(3, 2), dep);
        const MilpSolution sol = solve_tight(dd.model);
        REQUIRE(sol.optimal());
        std::vector<double> values = sol.values;
        for (const auto& per_s : dd.aux) {
            for (const auto& row : per_s) {
                for (int v : row) {
                    if (v >= 0) values[v] += noise(rng);
                }
            }
        }
        for (int s = 0; s < 2; ++s) {
            for (int t = 0; t + 1 < dd.length(); ++t) {
                const int sign = dd.event_sign(s, t);
                if (sign == 0) continue;
                const Scenario& d = dd.deployment[s];
                std::vector<double> injection(f.sys.num_buses(), 0.0);
                for (int g = 0; g < 3; ++g) {
                    injection[f.sys.generators[g].bus] += values[dd.vars.p[g][t]] + sign * values[dd.aux[s][g][t]];
                }
                injection[f.sys.solar_units[0].bus] += d.solar[t + 1][0];
                const double slack = values[dd.vars.shortfall[t]] - values[dd.vars.surplus[t]];
                for (int n = 0; n < f.sys.num_buses(); ++n) {
                    injection[n] += (slack - d.load[t + 1]) * f.sys.load_participation[n];
                }
                const std::vector<double> direct = dc_power_flow(f.sys, injection);
                const auto flows = post_deployment_flows(dd, values, s, sign > 0 ? Direction::up : Direction::down);
                for (int k = 0; k < f.sys.num_lines(); ++k) CHECK(flows[k][t] == doctest::Approx(direct[k]).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("a bottleneck line triggers cuts and the final awards are deliverable") {
    const Fixture f = two_bus(100.0);
    const ScenarioSet dep = select_deployment_scenarios(f.profile, f.sys, f.uncertainty, 2);
    RampResponseFactors factors = zero_factors(2, 2);
    for (auto& row : factors.zeta[0]) row[0] = 0.1;
    FmmModel dd = build_fmm_datadriven(f.inputs(), f.forecast, f.envelope, hourly_horizon(10, {}), factors, dep);

    const MilpSolution first = solve_tight(dd.model);
    REQUIRE(first.optimal());
    CHECK(worst_post_deployment_excess(dd, first.values) > 1.0);

    const CutLoopResult r = solve_with_cuts(dd);
    REQUIRE(r.converged);
    CHECK(r.rounds >= 2);
    REQUIRE_FALSE(r.cuts.empty());
    for (const auto& c : r.cuts) CHECK(c.line == 0);
    CHECK(worst_post_deployment_excess(dd, r.solution.values) <= 1e-4);
    CHECK(r.worst_check <= 1e-6);
    CHECK(dd.model.find_constraint("post_deployment_max_up[0,0,0]") >= 0);
    CHECK(dd.model.find_constraint("post_deployment_min_up[0,0,0]") >= 0);
}

TEST_CASE("awards extraction and CSV round trip") {
    const Fixture f = two_bus(1e4);
    const FmmModel m = build_fmm_proxy(f.inputs(), f.forecast, f.envelope, hourly_horizon(3, {}));
    const MilpSolution sol = solve_tight(m.model);
    REQUIRE(sol.optimal());
    const FmmAwards a = extract_awards(m, sol.values, 3);
    REQUIRE(a.ur.size() == 2);
    REQUIRE(a.ur[0].size() == kFmmLength);
    CHECK(a.ur[0][kFmmLength - 1] == 0.0);
    CHECK(a.dr[1][kFmmLength - 1] == 0.0);
    double total = 0.0;
    for (int g = 0; g < 2; ++g) total += a.ur[g][0];
    CHECK(total >= m.requirements.up[0] - 1e-6);

    const auto dir = test::scratch_dir("awards_csv");
    write_awards_csv(a, dir / "a.csv");
    const FmmAwards b = read_awards_csv(dir / "a.csv", 3, 2);
    CHECK(b.u == a.u);
    for (int g = 0; g < 2; ++g) {
        for (int t = 0; t < kFmmLength; ++t) {
            CHECK(b.p[g][t] == doctest::Approx(a.p[g][t]).epsilon(1e-12));
            CHECK(b.ur[g][t] == doctest::Approx(a.ur[g][t]).epsilon(1e-12));
            CHECK(b.dr[g][t] == doctest::Approx(a.dr[g][t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("rolling day chains hourly states") {
    const Fixture f = two_bus(150.0);
    FmmDayData data;
    data.day = &f.forecast;
    data.envelope = &f.envelope;
    const FmmDayResult day = run_fmm_day(f.inputs(), FmmPolicy::proxy, data);
    REQUIRE(day.hours.size() == 24);
    CHECK(day.converged);
    CHECK(day.worst_check <= 1e-6);
    for (int h = 0; h + 1 < 24; ++h) {
        // The next hour starts where this one ends its binding intervals.
        const auto& prev = day.hours[h].awards;
        const auto& next = day.hours[h + 1].awards;
        for (int g = 0; g < 2; ++g) {
            CHECK(std::abs(next.p[g][0] - prev.p[g][kFmmBinding - 1]) <= f.sys.generators[g].ramp_15 + 1e-6);
        }
    }
    double sum = 0.0;
    for (const auto& h : day.hours) sum += h.binding_cost;
    CHECK(day.total_binding_cost == doctest::Approx(sum));
}

#include <doctest.h>

#include <filesystem>

#include "frp/validation.hpp"
#include "support.hpp"

using namespace frp;

namespace {

struct Fixture {
    PowerSystem sys;
    PtdfMatrix ptdf;
    DaCommitments da;
    Scenario forecast;

    FmmInputs inputs() const { return {&sys, &ptdf, &da}; }
};

// Two must-run units and a 20 MW fast-start unit that the DA leaves off.
Fixture single_bus(double load) {
    Fixture f;
    GenerationResource cheap = test::make_generator(0, 20, {{180, 10}}, 30);
    GenerationResource mid = test::make_generator(0, 20, {{180, 30}}, 30);
    GenerationResource peaker = test::make_generator(0, 5, {{15, 90}}, 20, true);
    peaker.min_up = peaker.min_down = 1;
    peaker.no_load_cost = 200.0;
    f.sys = test::make_system(1, {}, {cheap, mid, peaker});
    f.ptdf = compute_ptdf(f.sys);
    f.da.u = {std::vector<int>(24, 1), std::vector<int>(24, 1), std::vector<int>(24, 0)};
    f.da.p = {std::vector<double>(24, load - 20.0), std::vector<double>(24, 20.0), std::vector<double>(24, 0.0)};
    f.forecast = forecast_scenario(test::flat_profile(f.sys, load), ScenarioKind::out_of_sample);
    return f;
}

std::vector<FmmAwards> uniform_awards(const Fixture& f, double value) {
    std::vector<FmmAwards> out(24);
    const int G = f.sys.num_generators();
    for (int h = 0; h < 24; ++h) {
        out[h].hour = h;
        out[h].u.assign(G, std::vector<int>(kFmmLength, 1));
        out[h].p.assign(G, std::vector<double>(kFmmLength, 0.0));
        out[h].ur.assign(G, std::vector<double>(kFmmLength, value));
        out[h].dr = out[h].ur;
    }
    return out;
}

ScenarioResult result(int id, double cost, double violation, int fs) {
    ScenarioResult r;
    r.scenario_id = id;
    r.rt_cost_excl_violation = cost;
    r.total_violation = violation;
    r.fs_commitments = fs;
    r.total_cost = cost + kDefaultVoll * violation;
    r.interval_cost = {cost};
    r.interval_violation = {violation};
    return r;
}

}  // namespace

TEST_CASE("realized equal to the forecast needs no load shedding") {
    const Fixture f = single_bus(150.0);
    const ScenarioResult r = run_rtuc_validation(f.inputs(), uniform_awards(f, 0.0), f.forecast);
    CHECK(r.total_violation == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.fs_commitments == 0);
    CHECK(r.worst_check <= 1e-6);
    CHECK(r.worst_cap_excess <= 1e-6);
    CHECK(r.interval_cost.size() == kIntervalsPerDay);
    // Both units sit on p_min (covered by zero no-load cost) and the cheap one
    // carries the remaining 110 MW.
    CHECK(r.rt_cost_excl_violation == doctest::Approx(kIntervalsPerDay * 110.0 * 10.0 * kIntervalHours));
    CHECK(r.total_cost == r.rt_cost_excl_violation + kDefaultVoll * r.total_violation);
}

TEST_CASE("a realized spike beyond the held awards is shed") {
    const Fixture f = single_bus(150.0);
    Scenario realized = f.forecast;
    realized.id = 17;
    realized.load[41] += 50.0;

    const ScenarioResult held = run_rtuc_validation(f.inputs(), uniform_awards(f, 0.0), realized);
    CHECK(held.scenario_id == 17);
    // Must-run units are frozen, so only the 20 MW peaker can respond.
    CHECK(held.interval_violation[41] == doctest::Approx(30.0 * kIntervalHours));
    CHECK(held.fs_commitments >= 1);
    CHECK(held.worst_cap_excess <= 1e-6);
    CHECK(held.total_cost == held.rt_cost_excl_violation + kDefaultVoll * held.total_violation);

    const ScenarioResult free = run_rtuc_validation(f.inputs(), uniform_awards(f, 30.0), realized);
    CHECK(free.total_violation == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(free.total_cost < held.total_cost);
}

TEST_CASE("awards at the physical ramp reproduce the uncapped run") {
    const Fixture f = single_bus(150.0);
    Scenario realized = f.forecast;
    for (int t = 30; t < 60; ++t) realized.load[t] += 2.0 * (t - 30);
    const ScenarioResult capped = run_rtuc_validation(f.inputs(), uniform_awards(f, 30.0), realized);
    const ScenarioResult uncapped = run_rtuc_validation(f.inputs(), uniform_awards(f, -1.0), realized);
    const ScenarioResult oversized = run_rtuc_validation(f.inputs(), uniform_awards(f, 500.0), realized);
    CHECK(capped.total_cost == doctest::Approx(uncapped.total_cost).epsilon(1e-9));
    CHECK(oversized.total_cost == doctest::Approx(uncapped.total_cost).epsilon(1e-9));
}

TEST_CASE("malformed award sets are rejected") {
    const Fixture f = single_bus(150.0);
    std::vector<FmmAwards> awards = uniform_awards(f, 0.0);
    awards.pop_back();
    CHECK_THROWS_AS(run_rtuc_validation(f.inputs(), awards, f.forecast), std::invalid_argument);
    awards = uniform_awards(f, 0.0);
    awards[5].hour = 6;
    CHECK_THROWS_AS(run_rtuc_validation(f.inputs(), awards, f.forecast), std::invalid_argument);
}

TEST_CASE("paired aggregation") {
    const std::vector<ScenarioResult> proxy = {result(0, 10, 1, 2), result(1, 20, 0, 1), result(2, 30, 2, 0)};
    const std::vector<ScenarioResult> dd = {result(0, 5, 0, 1), result(1, 25, 0, 1), result(2, 20, 3, 0)};
    const MetricsReport r = aggregate_metrics(proxy, dd);
    CHECK(r.scenarios == 3);
    CHECK(r.improved_cost == 2);
    CHECK(r.improved_violation == 1);
    CHECK(r.improved_fs == 1);
    CHECK(r.proxy_stats.sum_cost == doctest::Approx(60.0));
    CHECK(r.datadriven_stats.sum_cost == doctest::Approx(50.0));
    CHECK(r.proxy_stats.avg_cost == doctest::Approx(20.0));
    CHECK(r.datadriven_stats.max_violation == doctest::Approx(3.0));
    REQUIRE(r.intervals.size() == 1);
    // Gains 5, -5, 10.
    CHECK(r.intervals[0].median == doctest::Approx(5.0));
    CHECK(r.intervals[0].q1 == doctest::Approx(0.0));
    CHECK(r.intervals[0].q3 == doctest::Approx(7.5));

    const auto rows = compare_policies(r);
    bool found = false;
    for (const auto& row : rows) {
        if (row.table == "costs" && row.metric == "total_rt_cost_excl_violation") {
            found = true;
            CHECK(row.difference == doctest::Approx(-10.0));
        }
    }
    CHECK(found);

    const auto dir = test::scratch_dir("tables");
    emit_tables(r, dir);
    for (const char* name : {"table_improvements.csv", "table_violations.csv", "table_costs.csv",
                             "table_fs_commitments.csv", "interval_quartiles.csv"}) {
        CHECK(std::filesystem::exists(dir / name));
    }
    write_results_csv(proxy, dir / "proxy.csv");
    CHECK(std::filesystem::file_size(dir / "proxy.csv") > 0);
}

TEST_CASE("identical policies show no improvement") {
    const std::vector<ScenarioResult> same = {result(0, 10, 1, 2), result(1, 20, 0, 1)};
    const MetricsReport r = aggregate_metrics(same, same);
    CHECK(r.improved_cost == 0);
    CHECK(r.improved_violation == 0);
    CHECK(r.improved_fs == 0);
    CHECK(r.improved_total == 0);
    CHECK(r.intervals[0].median == 0.0);
}

TEST_CASE("aggregation input errors") {
    CHECK_THROWS_AS(aggregate_metrics({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_metrics({result(0, 1, 0, 0)}, {}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_metrics({result(0, 1, 0, 0)}, {result(1, 1, 0, 0)}), std::invalid_argument);
}

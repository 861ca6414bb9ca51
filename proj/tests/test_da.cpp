#include <doctest.h>

#include "frp/da.hpp"
#include "frp/oracle.hpp"
#include "support.hpp"

using namespace frp;

namespace {

GenerationResource unit(double p_min, double width, double slope, double no_load) {
    GenerationResource g = test::make_generator(0, p_min, {{width, slope}}, 100);
    g.no_load_cost = no_load;
    g.startup_cost = 500;
    g.min_up = 4;
    g.min_down = 4;
    return g;
}

}  // namespace

TEST_CASE("single unit covering a flat load is committed all day") {
    const PowerSystem sys = test::make_system(1, {}, {unit(10, 190, 20, 50)});
    const DaCommitments da = run_da(sys, nullptr, test::flat_profile(sys, 120.0));
    REQUIRE(da.num_hours() == 24);
    for (int h = 0; h < 24; ++h) CHECK(da.u[0][h] == 1);
    CHECK(da.p[0][7] == doctest::Approx(120.0));
    CHECK(da.at_interval(0, 95) == 1);
}

TEST_CASE("zero load leaves everything off") {
    const PowerSystem sys = test::make_system(1, {}, {unit(10, 190, 20, 50), unit(5, 45, 60, 20)});
    const DaCommitments da = run_da(sys, nullptr, test::flat_profile(sys, 0.0));
    for (const auto& row : da.u) {
        for (int v : row) CHECK(v == 0);
    }
    CHECK(da.objective == doctest::Approx(0.0));
}

TEST_CASE("cheap unit suffices, expensive one stays off") {
    // No-load cost covers output at p_min, so the second unit must cost more than 10 MW of the first.
    const PowerSystem sys = test::make_system(1, {}, {unit(10, 190, 20, 50), unit(10, 190, 60, 500)});
    const ForecastProfile profile = test::flat_profile(sys, 150.0);
    const DaCommitments da = run_da(sys, nullptr, profile);
    for (int h = 0; h < 24; ++h) {
        CHECK(da.u[0][h] == 1);
        CHECK(da.u[1][h] == 0);
    }

    // Same structure cut to four hours, against exhaustive enumeration.
    DaModel m = build_da_model(sys, nullptr, profile);
    UcProblem small = m.problem;
    small.intervals = 4;
    small.system_load.resize(4);
    small.solar.resize(4);
    MilpModel model;
    const UcVariables vars = add_uc_formulation(model, small);
    const MilpSolution sol = solve(model);
    REQUIRE(sol.optimal());
    CHECK(check_solution(model, sol).empty());
    const BruteForceResult bf = brute_force_uc(small);
    REQUIRE(bf.feasible);
    CHECK(sol.objective == doctest::Approx(bf.cost).epsilon(1e-6));
    for (int t = 0; t < 4; ++t) CHECK(bf.commitment[1][t] == 0);
}

TEST_CASE("load beyond capacity is priced at VOLL") {
    const PowerSystem sys = test::make_system(1, {}, {unit(10, 190, 20, 50)});
    std::vector<double> load(kIntervalsPerDay, 150.0);
    for (int t = 72; t < 76; ++t) load[t] = 260.0;  // hour 18
    const ForecastProfile profile = make_profile("peak", load, std::vector<double>(kIntervalsPerDay, 0.0), sys);
    DaModel m = build_da_model(sys, nullptr, profile);
    const MilpSolution sol = solve(m.model);
    REQUIRE(sol.optimal());
    CHECK(check_solution(m.model, sol).empty());
    CHECK(sol.value(m.vars.shortfall[18]) == doctest::Approx(60.0));
    const IntervalCost c = interval_cost(m.problem, m.vars, sol.values, 18);
    CHECK(c.violation_mwh == doctest::Approx(60.0));
    CHECK(sol.objective >= kDefaultVoll * 60.0);
}

TEST_CASE("reserve requirement commits headroom") {
    const PowerSystem sys = test::make_system(1, {}, {unit(10, 90, 20, 10), unit(10, 90, 40, 10)});
    DaOptions opts;
    opts.reserve_fraction = 0.3;
    const DaCommitments da = run_da(sys, nullptr, test::flat_profile(sys, 90.0), opts);
    for (int h = 0; h < 24; ++h) CHECK(da.u[0][h] + da.u[1][h] == 2);
}

TEST_CASE("DA commitments CSV round trip") {
    const PowerSystem sys = test::make_system(1, {}, {unit(10, 190, 20, 50), unit(10, 190, 60, 50)});
    const DaCommitments da = run_da(sys, nullptr, test::flat_profile(sys, 150.0));
    const auto dir = test::scratch_dir("da_csv");
    write_da_csv(da, dir / "da.csv");
    const DaCommitments back = read_da_csv(dir / "da.csv", 2);
    CHECK(back.u == da.u);
    CHECK(back.p == da.p);
}

#include <doctest.h>

#include <random>

#include "frp/oracle.hpp"
#include "frp/uc.hpp"
#include "support.hpp"

using namespace frp;

namespace {

struct Solved {
    MilpModel model;
    UcVariables vars;
    MilpSolution solution;
};

Solved solve_uc(const UcProblem& pb) {
    Solved s;
    s.vars = add_uc_formulation(s.model, pb);
    SolveOptions opts;
    opts.mip_rel_gap = 1e-9;
    s.solution = solve(s.model, opts);
    return s;
}

UcProblem simple_problem(const PowerSystem& sys, std::vector<double> load) {
    UcProblem pb;
    pb.system = &sys;
    pb.intervals = static_cast<int>(load.size());
    pb.system_load = std::move(load);
    pb.solar.assign(pb.intervals, std::vector<double>(sys.num_solar(), 0.0));
    pb.voll = 1000.0;
    return pb;
}

}  // namespace

TEST_CASE("single unit serving a flat load matches the hand-computed cost") {
    GenerationResource g = test::make_generator(0, 0.0, {{100, 20}}, 100);
    g.no_load_cost = 10.0;
    g.ramp_startup = 100.0;
    const PowerSystem sys = test::make_system(1, {}, {g});
    const UcProblem pb = simple_problem(sys, {50, 50});
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(check_solution(s.model, s.solution).empty());
    const double expected = 2 * (10.0 + 50.0 * 20.0 * 0.25);
    CHECK(s.solution.objective == doctest::Approx(expected).epsilon(1e-9));
    const BruteForceResult bf = brute_force_uc(pb);
    REQUIRE(bf.feasible);
    CHECK(bf.cost == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("zero load with free shutdown leaves every unit off") {
    const PowerSystem sys =
        test::make_system(1, {}, {test::make_generator(0, 10, {{40, 20}}, 20), test::make_generator(0, 5, {{20, 30}}, 20)});
    UcProblem pb = simple_problem(sys, {0, 0, 0});
    pb.initial = {{true, 20.0, 4}, {false, 0.0, 4}};
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    // Off from the first interval, the shutdown ramp allows dropping 20 MW.
    CHECK(s.solution.objective == doctest::Approx(0.0));
    for (int t = 0; t < 3; ++t) {
        CHECK(s.solution.value(s.vars.u[0][t]) == 0.0);
        CHECK(s.solution.value(s.vars.u[1][t]) == 0.0);
    }
    CHECK(brute_force_uc(pb).cost == doctest::Approx(0.0));
}

TEST_CASE("ramp-binding load step agrees with the brute-force oracle") {
    GenerationResource cheap = test::make_generator(0, 10, {{90, 10}}, 15);
    cheap.no_load_cost = 20;
    GenerationResource peaker = test::make_generator(0, 5, {{45, 80}}, 50);
    peaker.no_load_cost = 50;
    peaker.startup_cost = 100;
    const PowerSystem sys = test::make_system(1, {}, {cheap, peaker});
    UcProblem pb = simple_problem(sys, {40, 40, 90});
    pb.initial = {{true, 40.0, 10}, {false, 0.0, 10}};
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(check_solution(s.model, s.solution).empty());
    const BruteForceResult bf = brute_force_uc(pb);
    REQUIRE(bf.feasible);
    CHECK(s.solution.objective == doctest::Approx(bf.cost).epsilon(1e-6));
    // The cheap unit can only climb 15 MW per interval, so the peaker runs.
    CHECK(s.solution.value(s.vars.u[1][2]) == 1.0);
}

TEST_CASE("minimum up time keeps a started unit online") {
    GenerationResource g = test::make_generator(0, 10, {{40, 10}}, 50);
    g.min_up = 3;
    g.startup_cost = 1.0;
    const PowerSystem sys = test::make_system(1, {}, {g});
    UcProblem pb = simple_problem(sys, {30, 0, 0, 0});
    pb.initial = {{false, 0.0, 10}};
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(s.solution.value(s.vars.u[0][0]) == 1.0);
    CHECK(s.solution.value(s.vars.u[0][1]) == 1.0);
    CHECK(s.solution.value(s.vars.u[0][2]) == 1.0);
    CHECK(s.solution.objective == doctest::Approx(brute_force_uc(pb).cost).epsilon(1e-9));
}

TEST_CASE("carry-over of a short history") {
    GenerationResource g = test::make_generator(0, 10, {{40, 10}}, 50);
    g.min_down = 4;
    const PowerSystem sys = test::make_system(1, {}, {g});
    UcProblem pb = simple_problem(sys, {30, 30, 30});
    pb.initial = {{false, 0.0, 2}};
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(s.solution.value(s.vars.u[0][0]) == 0.0);
    CHECK(s.solution.value(s.vars.u[0][1]) == 0.0);
    CHECK(s.solution.value(s.vars.shortfall[0]) == doctest::Approx(30.0));

    const IntervalCost c = interval_cost(pb, s.vars, s.solution.values, 0);
    CHECK(c.violation_mwh == doctest::Approx(7.5));
    CHECK(c.operating == doctest::Approx(0.0));

    const auto state = state_after(pb, s.vars, s.solution.values, 2);
    CHECK(state[0].on);
    CHECK(state[0].intervals_in_state == 1);
    CHECK(state[0].power == doctest::Approx(30.0));
}

TEST_CASE("fixed and at-least commitment rules") {
    const PowerSystem sys =
        test::make_system(1, {}, {test::make_generator(0, 10, {{40, 10}}, 50), test::make_generator(0, 10, {{40, 90}}, 50)});
    UcProblem pb = simple_problem(sys, {30, 30});
    pb.rule = {CommitmentRule::fixed, CommitmentRule::at_least};
    pb.reference = {{1, 0}, {0, 1}};
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(s.solution.value(s.vars.u[0][0]) == 1.0);
    CHECK(s.solution.value(s.vars.u[0][1]) == 0.0);
    CHECK(s.solution.value(s.vars.u[1][1]) == 1.0);
    CHECK(s.solution.objective == doctest::Approx(brute_force_uc(pb).cost).epsilon(1e-9));
}

TEST_CASE("a congested line forces the expensive local unit") {
    // Cheap unit at bus 0, load at bus 1 behind a 40 MW line.
    const PowerSystem sys = test::make_system(
        2, {{0, 0, 1, 0.1, 40.0}},
        {test::make_generator(0, 0, {{100, 10}}, 100), test::make_generator(1, 0, {{100, 50}}, 100)}, 0, {0.0, 1.0});
    const PtdfMatrix ptdf = compute_ptdf(sys);
    UcProblem pb = simple_problem(sys, {70});
    pb.ptdf = &ptdf;
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(s.solution.value(s.vars.p[0][0]) == doctest::Approx(40.0));
    CHECK(s.solution.value(s.vars.p[1][0]) == doctest::Approx(30.0));
    CHECK(s.solution.objective == doctest::Approx(brute_force_uc(pb).cost).epsilon(1e-9));
}

TEST_CASE("award caps replace the ramp limit") {
    const PowerSystem sys = test::make_system(1, {}, {test::make_generator(0, 10, {{90, 10}}, 50)});
    UcProblem pb = simple_problem(sys, {40, 80});
    pb.initial = {{true, 40.0, 10}};
    pb.ramp_up_cap = {{-1.0, 15.0}};
    pb.ramp_down_cap = {{-1.0, -1.0}};
    const Solved s = solve_uc(pb);
    REQUIRE(s.solution.optimal());
    CHECK(s.solution.value(s.vars.p[0][1]) == doctest::Approx(55.0));
    CHECK(s.solution.value(s.vars.shortfall[1]) == doctest::Approx(25.0));
}

TEST_CASE("brute force refuses large instances") {
    std::vector<GenerationResource> gens(4, test::make_generator(0, 0, {{10, 1}}, 10));
    const PowerSystem sys = test::make_system(1, {}, gens);
    const UcProblem pb = simple_problem(sys, {1, 1});
    CHECK_THROWS_AS(brute_force_uc(pb), std::invalid_argument);
}

TEST_CASE("random tiny instances match the oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 15; ++i) {
        CAPTURE(i);
        const auto inst = test::random_tiny_uc(rng);
        const Solved s = solve_uc(inst->problem);
        const BruteForceResult bf = brute_force_uc(inst->problem);
        REQUIRE(s.solution.optimal() == bf.feasible);
        if (!bf.feasible) continue;
        CHECK(check_solution(s.model, s.solution).empty());
        CHECK(s.solution.objective == doctest::Approx(bf.cost).epsilon(1e-6));
    }
}

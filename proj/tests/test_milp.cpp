#include <doctest.h>

#include "frp/milp.hpp"
#include "frp/oracle.hpp"

using namespace frp;

TEST_CASE("continuous lower bound") {
    MilpModel m;
    const int x = m.add_variable("x", VarKind::continuous, 0.0, kInfinity, 1.0);
    m.add_constraint("floor", {{x, 1.0}}, Sense::greater_equal, 3.0);
    const MilpSolution s = solve(m);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(check_solution(m, s).empty());
}

TEST_CASE("binary rounds up") {
    MilpModel m;
    const int y = m.add_variable("y", VarKind::binary, 0.0, 1.0, 1.0);
    m.add_constraint("half", {{y, 1.0}}, Sense::greater_equal, 0.5);
    const MilpSolution s = solve(m);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.value(y) == 1.0);
}

TEST_CASE("infeasible pair") {
    MilpModel m;
    const int x = m.add_variable("x", VarKind::continuous, 0.0, kInfinity, 1.0);
    m.add_constraint("le", {{x, 1.0}}, Sense::less_equal, 0.0);
    m.add_constraint("ge", {{x, 1.0}}, Sense::greater_equal, 1.0);
    CHECK(solve(m).status == SolveStatus::infeasible);
}

TEST_CASE("names are unique and lookups work") {
    MilpModel m;
    const int x = m.add_variable("x", VarKind::continuous, 0.0, 1.0);
    CHECK_THROWS(m.add_variable("x", VarKind::continuous, 0.0, 1.0));
    CHECK(m.find_variable("x") == x);
    CHECK(m.find_variable("nope") == -1);
    m.add_constraint("c", {{x, 1.0}}, Sense::less_equal, 1.0);
    CHECK_THROWS(m.add_constraint("c", {{x, 1.0}}, Sense::less_equal, 1.0));
    CHECK_THROWS(m.add_constraint("bad", {{5, 1.0}}, Sense::less_equal, 1.0));
}

TEST_CASE("objective offset is carried") {
    MilpModel m;
    const int x = m.add_variable("x", VarKind::continuous, 2.0, 5.0, 3.0);
    m.set_objective_offset(10.0);
    const MilpSolution s = solve(m);
    REQUIRE(s.optimal());
    CHECK(s.value(x) == doctest::Approx(2.0));
    CHECK(s.objective == doctest::Approx(16.0));
}

TEST_CASE("check_solution names the violated row and uses a strict tolerance") {
    MilpModel m;
    const int a = m.add_variable("p_a", VarKind::continuous, 0.0, 100.0, 10.0);
    const int b = m.add_variable("p_b", VarKind::continuous, 0.0, 100.0, 20.0);
    m.add_constraint("balance", {{a, 1.0}, {b, 1.0}}, Sense::equal, 120.0);
    MilpSolution s = solve(m);
    REQUIRE(s.optimal());
    CHECK(check_solution(m, s).empty());

    s.values[a] += 10.0;
    const ConstraintReport r = check_solution(m, s);
    REQUIRE_FALSE(r.empty());
    bool named = false;
    for (const auto& v : r.violations) named = named || v.name == "balance";
    CHECK(named);
    CHECK(r.worst() == doctest::Approx(10.0));

    // 100.5 + 20 - 120 is exactly 0.5: equal to the tolerance is not a violation.
    MilpSolution exact = s;
    exact.values = {100.0, 20.5};
    CHECK(check_solution(m, exact, 0.5).empty());
    CHECK_FALSE(check_solution(m, exact, 0.25).empty());
}

TEST_CASE("integrality violations are reported") {
    MilpModel m;
    m.add_variable("y", VarKind::binary, 0.0, 1.0, 1.0);
    MilpSolution s;
    s.values = {0.5};
    CHECK_FALSE(check_solution(m, s).empty());
}

TEST_CASE("LP export lists every row") {
    MilpModel m;
    const int x = m.add_variable("x[0,1]", VarKind::binary, 0.0, 1.0, 2.0);
    m.add_constraint("row[0]", {{x, 1.0}}, Sense::greater_equal, 1.0);
    const std::string text = to_lp_format(m);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("row(0):") != std::string::npos);
    CHECK(text.find("Binaries") != std::string::npos);
    CHECK(text.find('[') == std::string::npos);
}

TEST_CASE("dense simplex oracle") {
    SUBCASE("two-variable production problem") {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
        DenseLp lp;
        lp.add_variable(-3.0, 4.0);
        lp.add_variable(-5.0, kInfinity);
        lp.add_row({0.0, 2.0}, Sense::less_equal, 12.0);
        lp.add_row({3.0, 2.0}, Sense::less_equal, 18.0);
        const DenseLpResult r = solve_dense_lp(lp);
        REQUIRE(r.feasible);
        CHECK(r.objective == doctest::Approx(-36.0));
        CHECK(r.x[0] == doctest::Approx(2.0));
        CHECK(r.x[1] == doctest::Approx(6.0));
    }
    SUBCASE("equality and infeasibility") {
        DenseLp lp;
        lp.add_variable(1.0, 10.0);
        lp.add_variable(2.0, 10.0);
        lp.add_row({1.0, 1.0}, Sense::equal, 5.0);
        DenseLpResult r = solve_dense_lp(lp);
        REQUIRE(r.feasible);
        CHECK(r.objective == doctest::Approx(5.0));
        lp.add_row({1.0, 0.0}, Sense::greater_equal, 11.0);
        r = solve_dense_lp(lp);
        CHECK_FALSE(r.feasible);
    }
    SUBCASE("negative right-hand side") {
        DenseLp lp;
        lp.add_variable(1.0, kInfinity);
        lp.add_row({-1.0}, Sense::less_equal, -3.0);
        const DenseLpResult r = solve_dense_lp(lp);
        REQUIRE(r.feasible);
        CHECK(r.objective == doctest::Approx(3.0));
    }
}

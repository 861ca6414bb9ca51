#include <doctest.h>

#include <cmath>
#include <random>

#include "frp/system.hpp"
#include "support.hpp"

using namespace frp;

namespace {

const char* kTwoBus = R"({
  "name": "two-bus",
  "slack_bus": 0,
  "buses": [{"id": 0}, {"id": 1}],
  "lines": [{"from": 0, "to": 1, "reactance": 0.1, "rating": 50}],
  "generators": [{"bus": 0, "p_min": 10, "p_max": 60,
                  "cost_blocks": [{"width": 50, "slope": 20}],
                  "no_load_cost": 5, "startup_cost": 100, "ramp_15": 10,
                  "ramp_startup": 10, "ramp_shutdown": 10, "min_up": 1, "min_down": 1}],
  "participation": [{"bus": 1, "factor": 1.0}]
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

PowerSystem ring3() {
    // Buses 1..3 map to indices 0..2; slack at bus 3.
    return test::make_system(3, {{0, 0, 2, 0.1, 100}, {0, 0, 1, 0.1, 100}, {0, 1, 2, 0.1, 100}}, {}, 2);
}

}  // namespace

TEST_CASE("minimal two-bus file parses with the declared counts") {
    const PowerSystem sys = parse_system(kTwoBus);
    CHECK(sys.num_buses() == 2);
    CHECK(sys.num_lines() == 1);
    CHECK(sys.num_generators() == 1);
    CHECK(sys.num_solar() == 0);
    CHECK(validate_system(sys).empty());
    CHECK(sys.load_participation[1] == doctest::Approx(1.0));
    CHECK(sys.generators[0].frp_up_cost > 0.0);
}

TEST_CASE("generator on a nonexistent bus is rejected") {
    const std::string bad = replace(kTwoBus, R"("bus": 0, "p_min")", R"("bus": 7, "p_min")");
    std::string message;
    try {
        const PowerSystem sys = parse_system(bad);
        const auto problems = validate_system(sys);
        REQUIRE_FALSE(problems.empty());
        message = problems.front();
    } catch (const DataError& e) {
        message = e.what();
    }
    CHECK(message.find("unknown bus") != std::string::npos);
}

TEST_CASE("missing required field names its location") {
    const std::string bad = replace(kTwoBus, R"("ramp_15": 10,)", "");
    try {
        parse_system(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("ramp_15") != std::string::npos);
    }
}

TEST_CASE("validate_system reports block widths and startup ramp") {
    PowerSystem sys = parse_system(kTwoBus);
    SUBCASE("widths off by five") {
        sys.generators[0].cost_blocks[0].width += 5.0;
        const auto problems = validate_system(sys);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0].find(sys.generators[0].name) != std::string::npos);
    }
    SUBCASE("startup ramp below p_min") {
        sys.generators[0].ramp_startup = 5.0;
        const auto problems = validate_system(sys);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0].find("startup ramp below p_min") != std::string::npos);
    }
}

TEST_CASE("two-bus PTDF is one on the only path") {
    const PowerSystem sys = parse_system(kTwoBus);
    const PtdfMatrix ptdf = compute_ptdf(sys);
    CHECK(std::abs(ptdf(0, 1)) == doctest::Approx(1.0));
    CHECK(ptdf(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("three-bus ring splits 2/3 and 1/3") {
    const PowerSystem sys = ring3();
    const PtdfMatrix ptdf = compute_ptdf(sys);
    CHECK(ptdf(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(ptdf(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(ptdf(2, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // Same answer from solving B*theta = P directly.
    const std::vector<double> flows = dc_power_flow(sys, {1.0, 0.0, -1.0});
    for (int k = 0; k < 3; ++k) CHECK(flows[k] == doctest::Approx(ptdf(k, 0)).epsilon(1e-12));
}

TEST_CASE("disconnected network is reported") {
    PowerSystem sys = test::make_system(3, {{0, 0, 1, 0.1, 100}}, {});
    CHECK_FALSE(validate_system(sys).empty());
    CHECK_THROWS_AS(compute_ptdf(sys), DataError);
}

TEST_CASE("system JSON round trip") {
    const PowerSystem a = load_system(test::data_dir() / "toy5" / "system.json");
    const PowerSystem b = parse_system(system_to_json(a));
    CHECK(b.num_buses() == a.num_buses());
    CHECK(b.num_lines() == a.num_lines());
    REQUIRE(b.num_generators() == a.num_generators());
    for (int g = 0; g < a.num_generators(); ++g) {
        CHECK(b.generators[g].p_max == a.generators[g].p_max);
        CHECK(b.generators[g].fast_start == a.generators[g].fast_start);
        CHECK(b.generators[g].cost_blocks.size() == a.generators[g].cost_blocks.size());
    }
    CHECK(b.load_participation == a.load_participation);
}

TEST_CASE("bundled 118-bus system has the published network size") {
    const PowerSystem sys = load_system(test::data_dir() / "ieee118" / "system.json");
    CHECK(sys.num_buses() == 118);
    CHECK(sys.num_lines() == 186);
    CHECK(sys.num_generators() == 51);
    CHECK(sys.num_solar() == 3);
    int fast = 0;
    for (const auto& g : sys.generators) fast += g.fast_start ? 1 : 0;
    CHECK(fast > 0);
    CHECK(fast < sys.num_generators());
    CHECK_NOTHROW(compute_ptdf(sys));
}

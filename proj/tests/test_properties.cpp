#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "frp/fmm.hpp"
#include "frp/milp.hpp"
#include "frp/oracle.hpp"
#include "support.hpp"

using namespace frp;

namespace {

PowerSystem one_solar_system() {
    PowerSystem sys = test::make_system(1, {}, {test::make_generator(0, 10, {{90, 20}}, 10)});
    sys.solar_units.push_back({0, 0, 800.0, 1.0});
    return sys;
}

}  // namespace

TEST_CASE("PTDF times injection equals a direct DC solve") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> size(2, 12), extra(0, 6);
    for (int trial = 0; trial < 30; ++trial) {
        CAPTURE(trial);
        const int n = size(rng);
        const PowerSystem sys = test::random_network(rng, n, extra(rng));
        const PtdfMatrix ptdf = compute_ptdf(sys);
        const std::vector<double> p = test::random_balanced_injection(rng, n, 100.0);
        const std::vector<double> direct = dc_power_flow(sys, p);
        for (int k = 0; k < sys.num_lines(); ++k) {
            double via_ptdf = 0.0;
            for (int b = 0; b < n; ++b) via_ptdf += ptdf(k, b) * p[b];
            CHECK(via_ptdf == doctest::Approx(direct[k]).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("renumbering buses permutes PTDF columns") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 10; ++trial) {
        CAPTURE(trial);
        const PowerSystem sys = test::random_network(rng, 7, 3);
        std::vector<int> perm(7);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<TransmissionLine> lines = sys.lines;
        for (auto& l : lines) {
            l.from_bus = perm[l.from_bus];
            l.to_bus = perm[l.to_bus];
        }
        const PowerSystem renumbered = test::make_system(7, lines, {}, perm[sys.slack_bus]);
        const PtdfMatrix a = compute_ptdf(sys);
        const PtdfMatrix b = compute_ptdf(renumbered);
        for (int k = 0; k < sys.num_lines(); ++k) {
            for (int n = 0; n < 7; ++n) CHECK(b(k, perm[n]) == doctest::Approx(a(k, n)).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("about 95% of sampled values fall inside the proxy envelope") {
    const PowerSystem sys = one_solar_system();
    std::vector<double> load(kIntervalsPerDay), solar(kIntervalsPerDay);
    for (int t = 0; t < kIntervalsPerDay; ++t) {
        load[t] = 900.0 + 200.0 * std::sin(t / 15.0);
        solar[t] = 300.0 + 100.0 * std::cos(t / 11.0);
    }
    const ForecastProfile p = make_profile("cover", load, solar, sys);
    UncertaintyConfig cfg;
    cfg.seed = 8;
    const ProxyEnvelope env = proxy_envelopes(p, sys, cfg);
    const ScenarioSet s = sample_scenarios(p, sys, cfg, 10000, ScenarioKind::training);
    long inside_load = 0, inside_solar = 0, total = 0;
    for (const auto& sc : s.scenarios) {
        for (int t = 0; t < kIntervalsPerDay; t += 8) {
            inside_load += sc.load[t] >= env.load_min[t] && sc.load[t] <= env.load_max[t] ? 1 : 0;
            inside_solar += sc.solar[t][0] >= env.solar_min[t][0] && sc.solar[t][0] <= env.solar_max[t][0] ? 1 : 0;
            ++total;
        }
    }
    const double load_share = static_cast<double>(inside_load) / total;
    const double solar_share = static_cast<double>(inside_solar) / total;
    CHECK(load_share >= 0.93);
    CHECK(load_share <= 0.97);
    CHECK(solar_share >= 0.93);
    CHECK(solar_share <= 0.97);
}

TEST_CASE("four 15-minute errors aggregate to the hourly spread") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = test::flat_profile(sys, 1000.0, 0.0);
    UncertaintyConfig cfg;
    cfg.sigma_hourly_frac = 0.04;
    const ScenarioSet s = sample_scenarios(p, sys, cfg, 10000, ScenarioKind::out_of_sample);
    double sum = 0.0, sq = 0.0;
    for (const auto& sc : s.scenarios) {
        double e = 0.0;
        for (int t = 20; t < 24; ++t) e += sc.load[t] - 1000.0;
        sum += e;
        sq += e * e;
    }
    const double n = s.size();
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
    // Four independent errors of sd sigma_15 sum to sd 2 * sigma_15, the hourly sigma.
    CHECK(sd == doctest::Approx(2.0 * cfg.sigma_15min_frac() * 1000.0).epsilon(0.05));
    CHECK(sd == doctest::Approx(cfg.sigma_hourly_frac * 1000.0).epsilon(0.05));
}

TEST_CASE("scenario w depends only on the seed and w") {
    const PowerSystem sys = one_solar_system();
    const ForecastProfile p = test::flat_profile(sys, 700.0, 200.0);
    UncertaintyConfig cfg;
    cfg.seed = 1234;
    for (ScenarioKind kind : {ScenarioKind::training, ScenarioKind::out_of_sample}) {
        const ScenarioSet big = sample_scenarios(p, sys, cfg, 25, kind);
        const ScenarioSet small = sample_scenarios(p, sys, cfg, 7, kind);
        for (int w = 0; w < 7; ++w) {
            CHECK(big.scenarios[w].load == small.scenarios[w].load);
            CHECK(big.scenarios[w].solar == small.scenarios[w].solar);
        }
    }
    // Training and out-of-sample streams do not overlap.
    CHECK(sample_scenarios(p, sys, cfg, 1, ScenarioKind::training).scenarios[0].load !=
          sample_scenarios(p, sys, cfg, 1, ScenarioKind::out_of_sample).scenarios[0].load);
}

TEST_CASE("proxy requirements cover every deployment event at the envelope edge") {
    const PowerSystem sys = one_solar_system();
    std::mt19937_64 rng(4);
    std::normal_distribution<double> wiggle(0.0, 15.0);
    std::vector<double> load(kIntervalsPerDay), solar(kIntervalsPerDay);
    for (int t = 0; t < kIntervalsPerDay; ++t) {
        load[t] = 800.0 + 3.0 * t + wiggle(rng);
        solar[t] = std::max(0.0, 250.0 * std::sin(3.14159 * t / kIntervalsPerDay) + wiggle(rng));
    }
    const ForecastProfile p = make_profile("edge", load, solar, sys);
    UncertaintyConfig cfg;
    for (int count : {2, 4}) {
        const ScenarioSet dep = select_deployment_scenarios(p, sys, cfg, count);
        const Scenario forecast = forecast_scenario(p, ScenarioKind::deployment);
        const FrpRequirements req = compute_frp_requirements(proxy_envelopes(p, sys, cfg), forecast);
        for (const auto& d : dep.scenarios) {
            const std::vector<double> dnl = delta_netload(forecast, d);
            for (int t = 0; t + 1 < kIntervalsPerDay; ++t) {
                CHECK(req.up[t] >= dnl[t] - 1e-6);
                CHECK(req.down[t] >= -dnl[t] - 1e-6);
            }
        }
    }
}

TEST_CASE("random LPs agree with the dense simplex") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> coef(-5.0, 5.0), cost(-3.0, 3.0), bound(1.0, 10.0), rhs(-5.0, 20.0);
    std::uniform_int_distribution<int> vars(1, 4), rows(1, 4), sense(0, 2);
    int feasible = 0;
    for (int trial = 0; trial < 40; ++trial) {
        CAPTURE(trial);
        MilpModel m;
        DenseLp lp;
        const int n = vars(rng);
        for (int j = 0; j < n; ++j) {
            const double c = cost(rng), ub = bound(rng);
            m.add_variable("x" + std::to_string(j), VarKind::continuous, 0.0, ub, c);
            lp.add_variable(c, ub);
        }
        const int r = rows(rng);
        for (int i = 0; i < r; ++i) {
            std::vector<double> a(n);
            std::vector<Term> terms;
            for (int j = 0; j < n; ++j) {
                a[j] = coef(rng);
                terms.push_back({j, a[j]});
            }
            const Sense s = static_cast<Sense>(sense(rng));
            const double b = rhs(rng);
            m.add_constraint("r" + std::to_string(i), terms, s, b);
            lp.add_row(a, s, b);
        }
        const MilpSolution sol = solve(m);
        const DenseLpResult ref = solve_dense_lp(lp);
        REQUIRE(sol.optimal() == ref.feasible);
        if (!ref.feasible) continue;
        ++feasible;
        CHECK(sol.objective == doctest::Approx(ref.objective).epsilon(1e-7).scale(1.0));
        CHECK(check_solution(m, sol).empty());
    }
    CHECK(feasible >= 10);
}

// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// if any gating criterion fails. Criterion 10 runs only when
// FRP_ACCEPTANCE_LONG is set and never gates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "frp/csv.hpp"
#include "frp/oracle.hpp"
#include "frp/pipeline.hpp"
#include "support.hpp"

using namespace frp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Worst check_solution result over every MILP solution this run looks at.
struct CheckTally {
    long solutions = 0;
    double worst = 0.0;
    std::string where = "none";

    void add(const std::string& source, double value, long count = 1) {
        solutions += count;
        if (value > worst) {
            worst = value;
            where = source;
        }
    }
};

CheckTally tally;

UncertaintyConfig sigma15(double frac) {
    UncertaintyConfig cfg;
    cfg.sigma_hourly_frac = 2.0 * frac;
    return cfg;
}

SolveOptions tight() {
    SolveOptions s;
    s.mip_rel_gap = 1e-9;
    return s;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
    std::mt19937_64 rng(20240611);
    int agree = 0, feasible = 0;
    double worst_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto inst = test::random_tiny_uc(rng);
        MilpModel model;
        add_uc_formulation(model, inst->problem);
        const MilpSolution sol = solve(model, tight());
        const BruteForceResult bf = brute_force_uc(inst->problem);
        if (sol.optimal() != bf.feasible) continue;
        if (!bf.feasible) {
            ++agree;
            continue;
        }
        ++feasible;
        tally.add("random tiny UC", check_solution(model, sol, 0.0).worst());
        const double rel = std::abs(sol.objective - bf.cost) / std::max(1.0, std::abs(bf.cost));
        worst_rel = std::max(worst_rel, rel);
        if (rel <= 1e-6) ++agree;
    }
    return {agree == 20, fmt::format("{}/20 instances agree ({} feasible), worst relative gap {:.2e}", agree, feasible,
                                     worst_rel)};
}

// ---------------------------------------------------------------------------

struct Toy {
    PowerSystem sys;
    PtdfMatrix ptdf;
    ForecastProfile profile;
};

Toy load_toy() {
    const fs::path dir = test::data_dir() / "toy5";
    Toy t;
    t.sys = load_system(dir / "system.json");
    t.ptdf = compute_ptdf(t.sys);
    t.profile = load_profiles(dir / "profile_hourly.csv", dir / "profile_15min.csv", t.sys);
    return t;
}

Outcome policy_cost_ordering() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> rating(0.7, 1.3), ramp(0.8, 1.2), scale(0.85, 1.05), zeta(-0.5, 0.5);
    std::uniform_int_distribution<int> pick_hour(0, 23);
    int ordered = 0, dd_infeasible = 0, compared = 0;
    double worst_margin = kInfinity;
    for (int i = 0; i < 10; ++i) {
        Toy toy = load_toy();
        for (auto& l : toy.sys.lines) l.rating *= rating(rng);
        for (auto& g : toy.sys.generators) g.ramp_15 *= ramp(rng);
        toy.ptdf = compute_ptdf(toy.sys);
        const double s = scale(rng);
        std::vector<double> load = toy.profile.load, solar(kIntervalsPerDay);
        for (int t = 0; t < kIntervalsPerDay; ++t) {
            load[t] *= s;
            solar[t] = toy.profile.total_solar(t);
        }
        const ForecastProfile profile = make_profile("variant", load, solar, toy.sys);
        DaOptions dao;
        dao.solve = tight();
        const DaCommitments da = run_da(toy.sys, &toy.ptdf, profile, dao);
        const UncertaintyConfig cfg;
        const Scenario forecast = forecast_scenario(profile, ScenarioKind::deployment);
        const ProxyEnvelope env = proxy_envelopes(profile, toy.sys, cfg);
        const ScenarioSet dep = select_deployment_scenarios(profile, toy.sys, cfg, 2);
        RampResponseFactors factors;
        factors.has_model.assign(toy.sys.num_generators(), true);
        factors.zeta.assign(toy.sys.num_generators(),
                            std::vector<std::vector<double>>(kIntervalsPerDay, std::vector<double>(2)));
        for (auto& g : factors.zeta) {
            for (auto& t : g) {
                for (double& z : t) z = zeta(rng);
            }
        }
        const FmmInputs in{&toy.sys, &toy.ptdf, &da};
        const FmmHorizon horizon = hourly_horizon(pick_hour(rng), {});
        FmmOptions opts;
        opts.solve = tight();
        const FmmModel proxy = build_fmm_proxy(in, forecast, env, horizon, opts);
        const MilpSolution ps = solve(proxy.model, opts.solve);
        if (!ps.optimal()) continue;
        ++compared;
        tally.add("policy ordering (proxy)", check_solution(proxy.model, ps, 0.0).worst());
        FmmModel dd = build_fmm_datadriven(in, forecast, env, horizon, factors, dep, opts);
        const CutLoopResult r = solve_with_cuts(dd, opts);
        if (!r.converged || !r.solution.optimal()) {
            ++dd_infeasible;  // an infeasible superset counts as +infinity
            ++ordered;
            continue;
        }
        tally.add("policy ordering (data-driven)", r.worst_check);
        const double margin = r.solution.objective - ps.objective;
        worst_margin = std::min(worst_margin, margin / (1.0 + std::abs(ps.objective)));
        if (margin >= -1e-6 * (1.0 + std::abs(ps.objective))) ++ordered;
    }
    return {compared == 10 && ordered == 10,
            fmt::format("{}/10 instances ordered ({} data-driven infeasible), smallest scaled margin {:.3e}", ordered,
                        dd_infeasible, worst_margin)};
}

// ---------------------------------------------------------------------------

struct CaseStudy {
    ExperimentConfig config;
    Toy toy;
    int cheap = -1;  // unit behind the bottleneck line
    DaCommitments da;
    std::string error;
};

CaseStudy run_case_study() {
    CaseStudy cs;
    cs.config = load_config(test::data_dir() / "toy5" / "config.json");
    cs.config.output_dir = test::scratch_dir("acceptance_toy5");
    cs.config.policy = PolicySelection::both;
    cs.toy = load_toy();
    for (int g = 0; g < cs.toy.sys.num_generators(); ++g) {
        if (cs.toy.sys.generators[g].name == "remote_cheap") cs.cheap = g;
    }
    try {
        const auto started = std::chrono::steady_clock::now();
        run_pipeline(cs.config, [&](const std::string& msg) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            std::fprintf(stderr, "[case study %7.1fs] %s\n", secs, msg.c_str());
        });
        cs.da = read_da_csv(cs.config.output_dir / "da_commitments.csv", cs.toy.sys.num_generators());
    } catch (const std::exception& e) {
        cs.error = e.what();
    }
    return cs;
}

std::vector<FmmAwards> read_day_awards(const CaseStudy& cs, FmmPolicy policy) {
    std::vector<FmmAwards> out;
    for (int h = 0; h < kHoursPerDay; ++h) {
        out.push_back(read_awards_csv(cs.config.output_dir / "fmm" / to_string(policy) /
                                          fmt::format("awards_hour_{:02}.csv", h),
                                      h, cs.toy.sys.num_generators()));
    }
    return out;
}

struct AwardStats {
    double cheap_share = 0.0;      // cheap unit's share of all upward awards
    double worst_violating = 0.0;  // award the line cannot carry, MW
};

// Line 0 is radial to the cheap unit's bus, so its flow equals that unit's
// output and the deliverable part of its upward award is the remaining headroom.
AwardStats award_stats(const CaseStudy& cs, const std::vector<FmmAwards>& awards) {
    const double rating = cs.toy.sys.lines[0].rating;
    const int G = cs.toy.sys.num_generators();
    double cheap = 0.0, total = 0.0, worst = 0.0;
    for (const auto& a : awards) {
        for (int t = 0; t < kFmmBinding; ++t) {
            for (int g = 0; g < G; ++g) total += a.ur[g][t];
            cheap += a.ur[cs.cheap][t];
            worst = std::max(worst, a.ur[cs.cheap][t] - (rating - a.p[cs.cheap][t]));
        }
    }
    return {total > 0.0 ? cheap / total : 0.0, std::max(worst, 0.0)};
}

Outcome bottleneck_case_study(const CaseStudy& cs) {
    if (!cs.error.empty()) return {false, "pipeline failed: " + cs.error};
    if (cs.cheap < 0) return {false, "fixture has no remote_cheap unit"};
    const auto* bus_line = &cs.toy.sys.lines[0];
    if (cs.toy.sys.generators[cs.cheap].bus != bus_line->from_bus && cs.toy.sys.generators[cs.cheap].bus != bus_line->to_bus) {
        return {false, "fixture line 0 does not reach the cheap unit"};
    }
    const AwardStats proxy = award_stats(cs, read_day_awards(cs, FmmPolicy::proxy));
    const AwardStats dd = award_stats(cs, read_day_awards(cs, FmmPolicy::datadriven));
    const auto report = nlohmann::json::parse(slurp(cs.config.output_dir / "report.json"));
    const int n = report["improvements"]["scenarios"].get<int>();
    const int better_violation = report["improvements"]["total_violation"].get<int>();
    const int better_cost = report["improvements"]["rt_cost_excl_violation"].get<int>();
    const double tol = cs.config.fmm.cut_tolerance;
    const bool pass = n == 100 && proxy.cheap_share >= 0.5 && dd.worst_violating <= tol &&
                      better_violation >= 80 && better_cost > 50;
    return {pass, fmt::format("proxy gives the cheap unit {:.0f}% of upward FRP (undeliverable up to {:.1f} MW), "
                              "data-driven {:.0f}% (undeliverable {:.2e} MW); violation lower in {}/{}, RT cost lower "
                              "in {}/{}",
                              100 * proxy.cheap_share, proxy.worst_violating, 100 * dd.cheap_share,
                              dd.worst_violating, better_violation, n, better_cost, n)};
}

// ---------------------------------------------------------------------------

// Post-deployment flows recomputed from scratch with a DC solve of the
// injections the deployment implies.
double independent_excess(const FmmModel& m, const std::vector<double>& x, const PowerSystem& sys, long& checked) {
    double worst = 0.0;
    for (int s = 0; s < static_cast<int>(m.deployment.size()); ++s) {
        const Scenario& dep = m.deployment[s];
        for (int t = 0; t + 1 < m.length(); ++t) {
            const int sign = m.event_sign(s, t);
            if (sign == 0) continue;
            std::vector<double> inj(sys.num_buses(), 0.0);
            for (int g = 0; g < sys.num_generators(); ++g) {
                inj[sys.generators[g].bus] += x[m.vars.p[g][t]] + sign * x[m.aux[s][g][t]];
            }
            for (const auto& unit : sys.solar_units) inj[unit.bus] += dep.solar[t + 1][unit.id];
            const double slack = x[m.vars.shortfall[t]] - x[m.vars.surplus[t]];
            for (int n = 0; n < sys.num_buses(); ++n) inj[n] += (slack - dep.load[t + 1]) * sys.load_participation[n];
            const std::vector<double> flows = dc_power_flow(sys, inj);
            for (int k = 0; k < sys.num_lines(); ++k) {
                worst = std::max(worst, std::abs(flows[k]) - sys.lines[k].rating);
                ++checked;
            }
        }
    }
    return worst;
}

Outcome cut_loop_convergence(const CaseStudy& cs) {
    if (!cs.error.empty()) return {false, "pipeline failed: " + cs.error};
    const ExperimentConfig& c = cs.config;
    const ScenarioSet dep = read_scenarios_csv(c.output_dir / "scenarios_deployment.csv", c.uncertainty);
    const RampResponseFactors factors = read_factors_csv(c.output_dir / "learner" / "factors.csv",
                                                         cs.toy.sys.num_generators(), kIntervalsPerDay, dep.size());
    const Scenario forecast = forecast_scenario(cs.toy.profile, ScenarioKind::deployment);
    const ProxyEnvelope env = proxy_envelopes(cs.toy.profile, cs.toy.sys, c.uncertainty);
    const FmmInputs in{&cs.toy.sys, &cs.toy.ptdf, &cs.da};
    int max_rounds = 0, total_cuts = 0, converged = 0;
    long checked = 0;
    double worst = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        FmmModel m = build_fmm_datadriven(in, forecast, env, hourly_horizon(h, {}), factors, dep, c.fmm);
        const CutLoopResult r = solve_with_cuts(m, c.fmm);
        max_rounds = std::max(max_rounds, r.rounds);
        total_cuts += static_cast<int>(r.cuts.size());
        if (!r.converged) continue;
        ++converged;
        tally.add("cut loop", r.worst_check);
        worst = std::max(worst, independent_excess(m, r.solution.values, cs.toy.sys, checked));
    }
    // The rolling day the pipeline cleared.
    const CsvTable summary = CsvTable::read(c.output_dir / "fmm" / "datadriven" / "summary.csv");
    int day_rounds = 0, day_converged = 0;
    for (std::size_t r = 0; r < summary.rows(); ++r) {
        day_rounds = std::max(day_rounds, static_cast<int>(summary.integer(r, "rounds")));
        day_converged += static_cast<int>(summary.integer(r, "converged"));
    }
    const bool pass = converged == 24 && max_rounds <= 10 && worst <= 1e-4 && day_converged == 24 && day_rounds <= 10;
    return {pass, fmt::format("24 hours: at most {} rounds ({} cuts), rolling day at most {} rounds; {} post-deployment "
                              "flows rechecked, worst excess {:.2e} MW",
                              max_rounds, total_cuts, day_rounds, checked, worst)};
}

// ---------------------------------------------------------------------------

// One unit switching state between intervals 3 and 4, a second unit serving
// the load. Maximizes the award in `probe` and returns its value.
double max_award(bool shutdown, bool upward, double& other) {
    GenerationResource unit = test::make_generator(0, 20, {{80, 10}}, 30);
    unit.ramp_startup = 50;
    unit.ramp_shutdown = 40;
    const PowerSystem sys = test::make_system(1, {}, {unit, test::make_generator(0, 0, {{300, 50}}, 300)});
    const PtdfMatrix ptdf = compute_ptdf(sys);
    DaCommitments da;
    da.u = {std::vector<int>(24, shutdown ? 0 : 1), std::vector<int>(24, 1)};
    da.u[0][0] = shutdown ? 1 : 0;
    da.p.assign(2, std::vector<double>(24, 0.0));
    const ForecastProfile p = test::flat_profile(sys, 100.0);
    const Scenario forecast = forecast_scenario(p, ScenarioKind::deployment);
    const ProxyEnvelope env = proxy_envelopes(p, sys, sigma15(0.0));
    FmmModel m = build_fmm_proxy({&sys, &ptdf, &da}, forecast, env, hourly_horizon(0, {}));
    const int probe = upward ? m.ur[0][3] : m.dr[0][3];
    m.model.set_objective(probe, -1000.0);
    const MilpSolution sol = solve(m.model, tight());
    if (!sol.optimal()) return -1.0;
    tally.add("switching-unit awards", check_solution(m.model, sol, 0.0).worst());
    other = sol.value(upward ? m.dr[0][3] : m.ur[0][3]);
    return sol.value(probe);
}

Outcome commitment_aware_bounds() {
    double ur_at_shutdown = 0.0, dr_at_startup = 0.0;
    const double dr_max = max_award(true, false, ur_at_shutdown);
    double unused = 0.0;
    const double ur_when_shutting = max_award(true, true, unused);
    const double ur_max = max_award(false, true, dr_at_startup);
    const double dr_when_starting = max_award(false, false, unused);
    const bool pass = std::abs(dr_max - 40.0) <= 1e-6 && std::abs(ur_when_shutting) <= 1e-9 &&
                      std::abs(ur_at_shutdown) <= 1e-9 && std::abs(ur_max - 50.0) <= 1e-6 &&
                      std::abs(dr_when_starting) <= 1e-9 && std::abs(dr_at_startup) <= 1e-9;
    return {pass, fmt::format("shutdown: max dr {:.3f} (R_SD 40), max ur {:.3g}; startup: max ur {:.3f} (R_SU 50), "
                              "max dr {:.3g}",
                              dr_max, ur_when_shutting, ur_max, dr_when_starting)};
}

// ---------------------------------------------------------------------------

Outcome proxy_requirement_formulas() {
    PowerSystem sys = test::make_system(1, {}, {test::make_generator(0, 10, {{90, 20}}, 10)});
    sys.solar_units.push_back({0, 0, 500.0, 1.0});
    const UncertaintyConfig cfg = sigma15(0.025);
    std::vector<std::string> mismatches;
    auto expect = [&](const std::string& label, const std::vector<double>& load, const std::vector<double>& solar,
                      double up0, double down0) {
        const ForecastProfile p = make_profile(label, load, solar, sys);
        const FrpRequirements r =
            compute_frp_requirements(proxy_envelopes(p, sys, cfg), forecast_scenario(p, ScenarioKind::deployment));
        if (std::abs(r.up[0] - up0) > 1e-9 || std::abs(r.down[0] - down0) > 1e-9) {
            mismatches.push_back(fmt::format("{}: got {}/{} expected {}/{}", label, r.up[0], r.down[0], up0, down0));
        }
    };
    std::vector<double> flat(kIntervalsPerDay, 1000.0), zero(kIntervalsPerDay, 0.0), ramp(kIntervalsPerDay);
    for (int t = 0; t < kIntervalsPerDay; ++t) ramp[t] = 1000.0 + 10.0 * t;
    std::vector<double> solar_drop(kIntervalsPerDay, 100.0);
    solar_drop[0] = 200.0;
    // 1.96 * 2.5% = 4.9% of the t+1 value on each side.
    expect("flat", flat, zero, 49.0, 49.0);
    expect("ramp", ramp, zero, 1010.0 * 1.049 - 1000.0, 1000.0 - 1010.0 * 0.951);
    expect("solar drop", flat, solar_drop, 1049.0 - 95.1 - 800.0, 0.0);

    std::vector<double> wave(kIntervalsPerDay), sun(kIntervalsPerDay);
    for (int t = 0; t < kIntervalsPerDay; ++t) {
        wave[t] = 900.0 + 200.0 * std::sin(t / 15.0);
        sun[t] = 300.0 + 100.0 * std::cos(t / 11.0);
    }
    UncertaintyConfig sample_cfg;
    sample_cfg.seed = 8;
    const ForecastProfile p = make_profile("coverage", wave, sun, sys);
    const ProxyEnvelope env = proxy_envelopes(p, sys, sample_cfg);
    const ScenarioSet s = sample_scenarios(p, sys, sample_cfg, 10000, ScenarioKind::training);
    long inside = 0, total = 0;
    for (const auto& sc : s.scenarios) {
        for (int t = 0; t < kIntervalsPerDay; t += 5) {
            inside += sc.load[t] >= env.load_min[t] && sc.load[t] <= env.load_max[t] ? 1 : 0;
            ++total;
        }
    }
    const double coverage = static_cast<double>(inside) / total;

    const ForecastProfile level = test::flat_profile(sys, 1000.0, 0.0);
    const ScenarioSet agg = sample_scenarios(level, sys, sample_cfg, 10000, ScenarioKind::out_of_sample);
    double sum = 0.0, sq = 0.0;
    for (const auto& sc : agg.scenarios) {
        double e = 0.0;
        for (int t = 40; t < 44; ++t) e += sc.load[t] - 1000.0;
        sum += e;
        sq += e * e;
    }
    const double sd = std::sqrt(sq / agg.size() - std::pow(sum / agg.size(), 2));
    const double ratio = sd / (sample_cfg.sigma_15min_frac() * 1000.0);

    const bool pass = mismatches.empty() && coverage >= 0.93 && coverage <= 0.97 && std::abs(ratio - 2.0) <= 0.1;
    std::string detail = fmt::format("3 hand-computed profiles {}, envelope coverage {:.2f}%, hourly/15-min sd ratio {:.3f}",
                                     mismatches.empty() ? "match" : "differ", 100 * coverage, ratio);
    for (const auto& m : mismatches) detail += "; " + m;
    return {pass, detail};
}

// ---------------------------------------------------------------------------

Outcome learner_verification(const CaseStudy& cs) {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> width(1, 8), depth(1, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst_grad = 0.0;
    for (int c = 0; c < 10; ++c) {
        std::vector<int> hidden(depth(rng));
        for (int& h : hidden) h = width(rng);
        const int dim = width(rng);
        const Mlp model(dim, hidden, 500 + c);
        Eigen::MatrixXd x(dim, 9);
        Eigen::VectorXd y(9);
        for (int i = 0; i < 9; ++i) {
            for (int k = 0; k < dim; ++k) x(k, i) = normal(rng);
            y(i) = normal(rng);
        }
        worst_grad = std::max(worst_grad, gradient_check(model, x, y));
    }

    auto linear = [&](int n) {
        Eigen::MatrixXd x(6, n);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < 6; ++k) x(k, i) = 100.0 + 20.0 * normal(rng);
            y(i) = 0.01 * (x(0, i) - 100.0) - 0.015 * (x(3, i) - 100.0) + 0.05 * (x(5, i) - 100.0) / 20.0;
        }
        return std::make_pair(x, y);
    };
    const auto [tx, ty] = linear(2000);
    const auto [vx, vy] = linear(500);
    MlpConfig cfg;
    cfg.hidden = {16, 8};
    cfg.epochs = 150;
    cfg.learning_rate = 5e-3;
    Mlp model(6, cfg.hidden, 21);
    fit(model, tx, ty, vx, vy, cfg);
    const Eigen::VectorXd pred = model.predict(vx);
    const double r2 = 1.0 - (pred - vy).squaredNorm() / (vy.array() - vy.mean()).square().sum();

    long stored = 0, outside = 0;
    if (cs.error.empty()) {
        const ScenarioSet dep =
            read_scenarios_csv(cs.config.output_dir / "scenarios_deployment.csv", cs.config.uncertainty);
        const RampResponseFactors f = read_factors_csv(cs.config.output_dir / "learner" / "factors.csv",
                                                       cs.toy.sys.num_generators(), kIntervalsPerDay, dep.size());
        for (const auto& g : f.zeta) {
            for (const auto& t : g) {
                for (double z : t) {
                    ++stored;
                    outside += z < -1.0 || z > 1.0 ? 1 : 0;
                }
            }
        }
    }
    const int dim = feature_dimension(3);
    const bool pass = worst_grad <= 1e-4 && r2 >= 0.95 && stored > 0 && outside == 0 && dim == 70;
    return {pass, fmt::format("gradient check worst {:.2e}, linear test R^2 {:.4f}, {} stored factors with {} outside "
                              "[-1, 1], feature dimension {}",
                              worst_grad, r2, stored, outside, dim)};
}

// ---------------------------------------------------------------------------

Outcome validation_caps(const CaseStudy& cs) {
    if (!cs.error.empty()) return {false, "pipeline failed: " + cs.error};
    const double voll = cs.config.fmm.voll;
    long solutions = 0, identity_breaks = 0;
    double worst_cap = 0.0;
    for (FmmPolicy p : {FmmPolicy::proxy, FmmPolicy::datadriven}) {
        const CsvTable t = CsvTable::read(cs.config.output_dir / "validation" / (to_string(p) + "_results.csv"));
        for (std::size_t r = 0; r < t.rows(); ++r) {
            ++solutions;
            worst_cap = std::max(worst_cap, t.number(r, "worst_cap_excess"));
            const double excl = t.number(r, "rt_cost_excl_violation");
            const double viol = t.number(r, "total_violation_mwh");
            if (t.number(r, "total_cost") != excl + 10000.0 * viol) ++identity_breaks;
        }
    }
    const bool pass = voll == 10000.0 && solutions == 200 && worst_cap <= 1e-6 && identity_breaks == 0;
    return {pass, fmt::format("{} validation days rechecked, worst award-cap excess {:.2e} MW, {} accounting mismatches",
                              solutions, worst_cap, identity_breaks)};
}

// ---------------------------------------------------------------------------

Outcome checker_soundness(const CaseStudy& cs) {
    if (cs.error.empty()) {
        // The day-ahead solution and everything the pipeline recorded.
        DaOptions dao = cs.config.da;
        DaModel da = build_da_model(cs.toy.sys, &cs.toy.ptdf, cs.toy.profile, dao);
        const MilpSolution sol = solve(da.model, dao.solve);
        if (sol.optimal()) tally.add("day-ahead", check_solution(da.model, sol, 0.0).worst());
        const fs::path out = cs.config.output_dir;
        for (FmmPolicy p : {FmmPolicy::proxy, FmmPolicy::datadriven}) {
            const CsvTable summary = CsvTable::read(out / "fmm" / to_string(p) / "summary.csv");
            for (std::size_t r = 0; r < summary.rows(); ++r) {
                tally.add(to_string(p) + " FMM", summary.number(r, "worst_check"),
                          summary.integer(r, "rounds"));
            }
            const CsvTable v = CsvTable::read(out / "validation" / (to_string(p) + "_results.csv"));
            for (std::size_t r = 0; r < v.rows(); ++r) {
                tally.add(to_string(p) + " validation", v.number(r, "worst_check"), kHoursPerDay);
            }
        }
        const CsvTable training = CsvTable::read(out / "learner" / "training_check.csv");
        tally.add("training FMMs", training.number(0, "worst_check"), training.integer(0, "days") * kHoursPerDay);
    }
    const bool pass = cs.error.empty() && tally.worst <= 1e-6;
    return {pass, fmt::format("{} solutions checked, worst violation {:.2e} ({}); solutions recorded by the pipeline "
                              "report only violations above 1e-6",
                              tally.solutions, tally.worst, tally.where)};
}

// ---------------------------------------------------------------------------

std::string long_run() {
    ExperimentConfig c = load_config(test::data_dir() / "ieee118" / "config.json");
    c.output_dir = test::scratch_dir("acceptance_ieee118");
    run_pipeline(c, [](const std::string& msg) { std::fprintf(stderr, "[ieee118] %s\n", msg.c_str()); });
    const auto report = nlohmann::json::parse(slurp(c.output_dir / "report.json"));
    const auto& p = report["proxy"];
    const auto& d = report["datadriven"];
    const double fmm_increase = (d["fmm_cost"].get<double>() / p["fmm_cost"].get<double>() - 1.0) * 100.0;
    return fmt::format("avg violation {:.2f} -> {:.2f} MWh, avg RT cost {:.0f} -> {:.0f}, avg FS commitments {:.1f} -> "
                       "{:.1f}, FMM cost change {:+.2f}%",
                       p["avg_violation_mwh"].get<double>(), d["avg_violation_mwh"].get<double>(),
                       p["avg_rt_cost_excl_violation"].get<double>(), d["avg_rt_cost_excl_violation"].get<double>(),
                       p["avg_fs_commitments"].get<double>(), d["avg_fs_commitments"].get<double>(), fmm_increase);
}

}  // namespace

int main() {
    std::map<int, std::pair<std::string, Outcome>> results;
    auto record = [&](int n, const std::string& title, auto&& body) {
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        results[n] = {title, o};
        std::fprintf(stderr, "criterion %d evaluated\n", n);
    };

    const CaseStudy cs = run_case_study();
    record(2, "oracle equivalence on 20 random tiny UC instances", oracle_equivalence);
    record(3, "data-driven FMM objective never below proxy", policy_cost_ordering);
    record(4, "bottleneck case study", [&] { return bottleneck_case_study(cs); });
    record(5, "cut loop convergence and deliverability", [&] { return cut_loop_convergence(cs); });
    record(6, "commitment-aware FRP bounds", commitment_aware_bounds);
    record(7, "proxy requirement formulas and envelope statistics", proxy_requirement_formulas);
    record(8, "learner verification", [&] { return learner_verification(cs); });
    record(9, "validation award caps and cost accounting", [&] { return validation_caps(cs); });
    record(1, "constraint checker soundness", [&] { return checker_soundness(cs); });

    bool all = true;
    for (const auto& [n, entry] : results) {
        const auto& [title, o] = entry;
        all = all && o.pass;
        std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", n, title.c_str(), o.detail.c_str());
    }
    if (std::getenv("FRP_ACCEPTANCE_LONG") != nullptr) {
        try {
            std::printf("INFO criterion 10 (optional, not gating): %s\n", long_run().c_str());
        } catch (const std::exception& e) {
            std::printf("INFO criterion 10 (optional, not gating): failed: %s\n", e.what());
        }
    } else {
        std::printf("SKIP criterion 10 (optional, not gating): set FRP_ACCEPTANCE_LONG=1 for the 118-bus run\n");
    }
    std::fflush(stdout);
    return all ? 0 : 1;
}

#include "frp/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "frp/csv.hpp"

namespace frp {

FmmHorizon hourly_horizon(int hour, std::vector<UnitInitialState> initial) {
    FmmHorizon h;
    h.start = hour * kIntervalsPerHour;
    h.initial = std::move(initial);
    return h;
}

std::vector<UnitInitialState> da_initial_state(const DaCommitments& da) {
    std::vector<UnitInitialState> out(da.u.size());
    for (std::size_t g = 0; g < da.u.size(); ++g) {
        out[g].on = da.u[g][0] == 1;
        out[g].power = out[g].on ? da.p[g][0] : 0.0;
        out[g].intervals_in_state = 1000;
    }
    return out;
}

Scenario horizon_slice(const Scenario& day, const FmmHorizon& horizon) {
    Scenario out;
    out.kind = day.kind;
    out.id = day.id;
    out.seed = day.seed;
    out.quantile_z = day.quantile_z;
    for (int t = 0; t < horizon.length; ++t) {
        const int g = std::min(horizon.global(t), day.num_intervals() - 1);
        out.load.push_back(day.load[g]);
        out.solar.push_back(day.solar[g]);
    }
    return out;
}

ProxyEnvelope horizon_slice(const ProxyEnvelope& day, const FmmHorizon& horizon) {
    ProxyEnvelope out;
    const int n = static_cast<int>(day.load_min.size());
    for (int t = 0; t < horizon.length; ++t) {
        const int g = std::min(horizon.global(t), n - 1);
        out.load_min.push_back(day.load_min[g]);
        out.load_max.push_back(day.load_max[g]);
        out.solar_min.push_back(day.solar_min[g]);
        out.solar_max.push_back(day.solar_max[g]);
    }
    return out;
}

FrpRequirements compute_frp_requirements(const ProxyEnvelope& env, const Scenario& forecast) {
    const int n = forecast.num_intervals();
    if (n < 2) throw std::invalid_argument("compute_frp_requirements: at least two intervals required");
    if (static_cast<int>(env.load_min.size()) != n || static_cast<int>(env.load_max.size()) != n) {
        throw std::invalid_argument("compute_frp_requirements: envelope length mismatch");
    }
    FrpRequirements req;
    for (int t = 0; t + 1 < n; ++t) {
        const double now = forecast.netload(t);
        req.up.push_back(std::max(env.load_max[t + 1] - env.total_solar_min(t + 1) - now, 0.0));
        req.down.push_back(std::max(now - (env.load_min[t + 1] - env.total_solar_max(t + 1)), 0.0));
    }
    return req;
}

std::vector<double> delta_netload(const Scenario& forecast, const Scenario& deployment) {
    const int n = forecast.num_intervals();
    if (deployment.num_intervals() != n) throw std::invalid_argument("delta_netload: length mismatch");
    std::vector<double> out;
    for (int t = 0; t + 1 < n; ++t) out.push_back(deployment.netload(t + 1) - forecast.netload(t));
    return out;
}

std::string to_string(Direction direction) { return direction == Direction::up ? "up" : "down"; }

std::string to_string(FmmPolicy policy) {
    switch (policy) {
        case FmmPolicy::proxy:
            return "proxy";
        case FmmPolicy::training:
            return "training";
        case FmmPolicy::datadriven:
            return "datadriven";
    }
    return "unknown";
}

int FmmModel::event_sign(int s, int t) const {
    const double d = delta_nl[s][t];
    return d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
}

namespace {

FmmModel base_model(const FmmInputs& in, const Scenario& day, const FmmHorizon& horizon, const FmmOptions& options) {
    if (in.system == nullptr || in.da == nullptr) throw std::invalid_argument("FMM inputs need a system and DA commitments");
    const PowerSystem& sys = *in.system;
    const int G = sys.num_generators();
    if (static_cast<int>(in.da->u.size()) != G) throw std::invalid_argument("DA commitments do not match the system");
    if (horizon.length < horizon.binding || horizon.binding < 1) throw std::invalid_argument("invalid FMM horizon");

    FmmModel m;
    m.forecast = horizon_slice(day, horizon);
    UcProblem& pb = m.problem;
    pb.system = in.system;
    pb.ptdf = in.ptdf;
    pb.intervals = horizon.length;
    pb.interval_hours = kIntervalHours;
    pb.system_load = m.forecast.load;
    pb.solar = m.forecast.solar;
    pb.initial = horizon.initial;
    pb.voll = options.voll;
    pb.rule.resize(G);
    pb.reference.assign(G, std::vector<int>(horizon.length));
    for (int g = 0; g < G; ++g) {
        pb.rule[g] = sys.generators[g].fast_start ? CommitmentRule::at_least : CommitmentRule::fixed;
        for (int t = 0; t < horizon.length; ++t) pb.reference[g][t] = in.da->at_interval(g, horizon.global(t));
    }
    for (int g = 0; g < G && !pb.initial.empty(); ++g) {
        const auto& init = pb.initial[g];
        const auto& gen = sys.generators[g];
        if (init.on && (init.power < gen.p_min - 1e-6 || init.power > gen.p_max + 1e-6)) {
            throw std::invalid_argument(fmt::format("FMM hour {}: initial output of {} outside its limits",
                                                    horizon.hour(), gen.name));
        }
    }
    m.vars = add_uc_formulation(m.model, pb);
    return m;
}

void add_proxy_frp(FmmModel& m, const ProxyEnvelope& envelope_day, const FmmHorizon& horizon,
                   const FmmOptions& options) {
    const PowerSystem& sys = *m.problem.system;
    const int G = sys.num_generators();
    const int T = m.length();
    const UcVariables& x = m.vars;
    MilpModel& model = m.model;
    m.requirements = compute_frp_requirements(horizon_slice(envelope_day, horizon), m.forecast);
    m.ur.assign(G, std::vector<int>(T - 1));
    m.dr = m.ur;

    for (int g = 0; g < G; ++g) {
        const GenerationResource& gen = sys.generators[g];
        const double ramp = m.problem.ramp_per_interval(g);
        for (int t = 0; t + 1 < T; ++t) {
            const std::string idx = fmt::format("[{},{}]", g, t);
            const int ur = m.ur[g][t] = model.add_variable("ur" + idx, VarKind::continuous, 0.0, kInfinity,
                                                           gen.frp_up_cost);
            const int dr = m.dr[g][t] = model.add_variable("dr" + idx, VarKind::continuous, 0.0, kInfinity,
                                                           gen.frp_down_cost);
            model.add_constraint("frp_capacity_up" + idx,
                                 {{x.p[g][t], 1.0}, {ur, 1.0}, {x.u[g][t], -gen.p_max}, {x.v[g][t + 1], -gen.p_max}},
                                 Sense::less_equal, 0.0);
            model.add_constraint(
                "frp_capacity_down" + idx,
                {{x.p[g][t], 1.0}, {dr, -1.0}, {x.u[g][t], -gen.p_min}, {x.w[g][t + 1], gen.ramp_shutdown}},
                Sense::greater_equal, 0.0);
            model.add_constraint("frp_ramp_up" + idx,
                                 {{ur, 1.0}, {x.u[g][t], -ramp}, {x.v[g][t + 1], -gen.ramp_startup}},
                                 Sense::less_equal, 0.0);
            model.add_constraint("frp_ramp_down" + idx,
                                 {{dr, 1.0}, {x.u[g][t + 1], -ramp}, {x.w[g][t + 1], -gen.ramp_shutdown}},
                                 Sense::less_equal, 0.0);
            model.add_constraint("frp_online_up" + idx, {{ur, 1.0}, {x.u[g][t + 1], -gen.p_max}}, Sense::less_equal,
                                 0.0);
            model.add_constraint("frp_online_down" + idx, {{dr, 1.0}, {x.u[g][t], -gen.p_max}}, Sense::less_equal,
                                 0.0);
            model.add_constraint("award_covers_rise" + idx, {{x.p[g][t + 1], 1.0}, {x.p[g][t], -1.0}, {ur, -1.0}},
                                 Sense::less_equal, 0.0);
            model.add_constraint("award_covers_fall" + idx, {{x.p[g][t], 1.0}, {x.p[g][t + 1], -1.0}, {dr, -1.0}},
                                 Sense::less_equal, 0.0);
        }
    }
    for (int t = 0; t + 1 < T; ++t) {
        std::vector<Term> up, down;
        for (int g = 0; g < G; ++g) {
            up.push_back({m.ur[g][t], 1.0});
            down.push_back({m.dr[g][t], 1.0});
        }
        if (options.frp_shortage_penalty > 0.0) {
            up.push_back({model.add_variable(fmt::format("frp_short_up[{}]", t), VarKind::continuous, 0.0, kInfinity,
                                             options.frp_shortage_penalty),
                          1.0});
            down.push_back({model.add_variable(fmt::format("frp_short_down[{}]", t), VarKind::continuous, 0.0,
                                               kInfinity, options.frp_shortage_penalty),
                            1.0});
        }
        model.add_constraint(fmt::format("requirement_up[{}]", t), std::move(up), Sense::greater_equal,
                             m.requirements.up[t]);
        model.add_constraint(fmt::format("requirement_down[{}]", t), std::move(down), Sense::greater_equal,
                             m.requirements.down[t]);
    }
}

double evaluate(const FlowExpression& e, const std::vector<double>& values) {
    double v = e.constant;
    for (const Term& t : e.terms) v += t.coef * values[t.var];
    return v;
}

double binding_cost(const FmmModel& m, const std::vector<double>& values, int binding, double* violation_mwh) {
    double cost = 0.0;
    double violation = 0.0;
    const PowerSystem& sys = *m.problem.system;
    for (int t = 0; t < binding; ++t) {
        const IntervalCost c = interval_cost(m.problem, m.vars, values, t);
        cost += c.operating + m.problem.voll * c.violation_mwh;
        violation += c.violation_mwh;
        if (!m.has_frp() || t + 1 >= m.length()) continue;
        for (int g = 0; g < sys.num_generators(); ++g) {
            cost += sys.generators[g].frp_up_cost * values[m.ur[g][t]] +
                    sys.generators[g].frp_down_cost * values[m.dr[g][t]];
        }
    }
    if (violation_mwh != nullptr) *violation_mwh = violation;
    return cost;
}

}  // namespace

FmmModel build_fmm_proxy(const FmmInputs& in, const Scenario& forecast_day, const ProxyEnvelope& envelope_day,
                         const FmmHorizon& horizon, const FmmOptions& options) {
    FmmModel m = base_model(in, forecast_day, horizon, options);
    add_proxy_frp(m, envelope_day, horizon, options);
    return m;
}

FmmModel build_fmm_training(const FmmInputs& in, const Scenario& training_day, const FmmHorizon& horizon,
                            const FmmOptions& options) {
    if (training_day.kind != ScenarioKind::training) {
        throw std::invalid_argument("build_fmm_training expects a training scenario");
    }
    return base_model(in, training_day, horizon, options);
}

FmmModel build_fmm_datadriven(const FmmInputs& in, const Scenario& forecast_day, const ProxyEnvelope& envelope_day,
                              const FmmHorizon& horizon, const RampResponseFactors& factors,
                              const ScenarioSet& deployment, const FmmOptions& options) {
    const PowerSystem& sys = *in.system;
    const int G = sys.num_generators();
    const int S = deployment.size();
    if (S < 1) throw std::invalid_argument("build_fmm_datadriven: no deployment scenarios");
    if (static_cast<int>(factors.zeta.size()) != G || factors.num_scenarios() != S) {
        throw std::invalid_argument(fmt::format("response factors have shape {}x?x{}, expected {} generators and {} "
                                                "scenarios",
                                                factors.zeta.size(), factors.num_scenarios(), G, S));
    }
    for (const auto& row : factors.zeta) {
        if (static_cast<int>(row.size()) < kIntervalsPerDay) {
            throw std::invalid_argument("response factors do not cover the day");
        }
    }

    FmmModel m = build_fmm_proxy(in, forecast_day, envelope_day, horizon, options);
    const int T = m.length();
    MilpModel& model = m.model;
    m.aux.assign(S, std::vector<std::vector<int>>(G, std::vector<int>(T - 1, -1)));
    for (int s = 0; s < S; ++s) {
        const Scenario& dep = deployment.scenarios[s];
        if (dep.kind != ScenarioKind::deployment) throw std::invalid_argument("deployment set has a non-deployment scenario");
        m.deployment.push_back(horizon_slice(dep, horizon));
        m.delta_nl.push_back(delta_netload(m.forecast, m.deployment.back()));
        for (int t = 0; t + 1 < T; ++t) {
            const int sign = m.event_sign(s, t);
            if (sign == 0) continue;
            const bool up = sign > 0;
            const char* dir = up ? "up" : "down";
            std::vector<Term> coverage;
            for (int g = 0; g < G; ++g) {
                const GenerationResource& gen = sys.generators[g];
                double lower = 0.0;
                const bool committed = m.problem.reference[g][t] == 1 && m.problem.reference[g][t + 1] == 1;
                if (!gen.fast_start && committed && factors.has_model[g]) {
                    const double z = factors.zeta[g][horizon.global(t)][s] * (up ? 1.0 : -1.0);
                    if (z > options.zeta_min) {
                        const double ramp = m.problem.ramp_per_interval(g);
                        lower = std::min({z * ramp, ramp, gen.p_max - gen.p_min});
                    }
                }
                const int a = m.aux[s][g][t] = model.add_variable(fmt::format("aux_{}[{},{},{}]", dir, g, t, s),
                                                                  VarKind::continuous, lower, kInfinity);
                model.add_constraint(fmt::format("aux_within_award_{}[{},{},{}]", dir, g, t, s),
                                     {{a, 1.0}, {up ? m.ur[g][t] : m.dr[g][t], -1.0}}, Sense::less_equal, 0.0);
                coverage.push_back({a, 1.0});
            }
            if (options.frp_shortage_penalty > 0.0) {
                coverage.push_back({model.add_variable(fmt::format("aux_short_{}[{},{}]", dir, t, s),
                                                       VarKind::continuous, 0.0, kInfinity,
                                                       options.frp_shortage_penalty),
                                    1.0});
            }
            model.add_constraint(fmt::format("deployment_coverage_{}[{},{}]", dir, t, s), std::move(coverage),
                                 Sense::greater_equal, std::abs(m.delta_nl[s][t]));
        }
    }
    return m;
}

FlowExpression post_deployment_expression(const FmmModel& m, int k, int t, int s) {
    const PowerSystem& sys = *m.problem.system;
    const PtdfMatrix& ptdf = *m.problem.ptdf;
    FlowExpression e = line_flow(m.problem, m.vars, k, t);
    const int sign = m.event_sign(s, t);
    for (int g = 0; g < sys.num_generators() && sign != 0; ++g) {
        const double f = ptdf(k, sys.generators[g].bus);
        if (f != 0.0) e.terms.push_back({m.aux[s][g][t], sign * f});
    }
    const Scenario& dep = m.deployment[s];
    for (const SolarUnit& unit : sys.solar_units) {
        e.constant += (dep.solar[t + 1][unit.id] - m.forecast.solar[t][unit.id]) * ptdf(k, unit.bus);
    }
    const double load_change = dep.load[t + 1] - m.forecast.load[t];
    for (int n = 0; n < sys.num_buses(); ++n) {
        e.constant -= load_change * sys.load_participation[n] * ptdf(k, n);
    }
    return e;
}

std::vector<std::vector<double>> post_deployment_flows(const FmmModel& m, const std::vector<double>& values, int s,
                                                       Direction direction) {
    const int K = m.problem.system->num_lines();
    const int T = m.length();
    const int wanted = direction == Direction::up ? 1 : -1;
    std::vector<std::vector<double>> flows(K, std::vector<double>(T - 1));
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t + 1 < T; ++t) {
            FlowExpression e = post_deployment_expression(m, k, t, s);
            if (m.event_sign(s, t) != wanted) {
                std::erase_if(e.terms, [&](const Term& term) {
                    for (const auto& row : m.aux[s]) {
                        if (row[t] == term.var) return true;
                    }
                    return false;
                });
            }
            flows[k][t] = evaluate(e, values);
        }
    }
    return flows;
}

double worst_post_deployment_excess(const FmmModel& m, const std::vector<double>& values) {
    if (m.problem.ptdf == nullptr) return 0.0;
    double worst = 0.0;
    const PowerSystem& sys = *m.problem.system;
    for (int s = 0; s < static_cast<int>(m.deployment.size()); ++s) {
        for (int t = 0; t + 1 < m.length(); ++t) {
            if (m.event_sign(s, t) == 0) continue;
            for (int k = 0; k < sys.num_lines(); ++k) {
                const double flow = evaluate(post_deployment_expression(m, k, t, s), values);
                worst = std::max(worst, std::abs(flow) - sys.lines[k].rating);
            }
        }
    }
    return worst;
}

CutLoopResult solve_with_cuts(FmmModel& m, const FmmOptions& options) {
    CutLoopResult out;
    const PowerSystem& sys = *m.problem.system;
    std::set<std::tuple<int, int, int>> added;
    for (int round = 1; round <= options.max_rounds; ++round) {
        out.rounds = round;
        out.solution = solve(m.model, options.solve);
        if (out.solution.values.empty()) {
            out.diagnostics = fmt::format("round {}: solver returned {} ({})", round, to_string(out.solution.status),
                                          out.solution.diagnostics);
            return out;
        }
        if (options.verify) out.worst_check = std::max(out.worst_check, check_solution(m.model, out.solution).worst());
        if (m.problem.ptdf == nullptr) {
            out.converged = true;
            return out;
        }
        int new_cuts = 0;
        for (int s = 0; s < static_cast<int>(m.deployment.size()); ++s) {
            for (int t = 0; t + 1 < m.length(); ++t) {
                const int sign = m.event_sign(s, t);
                if (sign == 0) continue;
                for (int k = 0; k < sys.num_lines(); ++k) {
                    FlowExpression e = post_deployment_expression(m, k, t, s);
                    const double flow = evaluate(e, out.solution.values);
                    const double rating = sys.lines[k].rating;
                    if (std::abs(flow) <= rating + options.cut_tolerance) continue;
                    if (!added.insert({k, t, s}).second) continue;
                    const Direction dir = sign > 0 ? Direction::up : Direction::down;
                    const std::string idx = fmt::format("_{}[{},{},{}]", to_string(dir), k, t, s);
                    m.model.add_constraint("post_deployment_max" + idx, e.terms, Sense::less_equal,
                                           rating - e.constant);
                    m.model.add_constraint("post_deployment_min" + idx, std::move(e.terms), Sense::greater_equal,
                                           -rating - e.constant);
                    out.cuts.push_back({k, t, s, dir, round, flow});
                    ++new_cuts;
                }
            }
        }
        if (new_cuts == 0) {
            out.converged = true;
            return out;
        }
    }
    out.diagnostics = fmt::format("post-deployment violations remain after {} rounds", options.max_rounds);
    return out;
}

FmmAwards extract_awards(const FmmModel& m, const std::vector<double>& values, int hour) {
    const int G = m.problem.system->num_generators();
    const int T = m.length();
    FmmAwards a;
    a.hour = hour;
    a.u.assign(G, std::vector<int>(T));
    a.p.assign(G, std::vector<double>(T));
    a.ur = a.dr = a.p;
    for (int g = 0; g < G; ++g) {
        for (int t = 0; t < T; ++t) {
            a.u[g][t] = values[m.vars.u[g][t]] > 0.5 ? 1 : 0;
            a.p[g][t] = values[m.vars.p[g][t]];
            if (m.has_frp() && t + 1 < T) {
                // Clip solver noise so awards are exactly nonnegative.
                a.ur[g][t] = std::max(0.0, values[m.ur[g][t]]);
                a.dr[g][t] = std::max(0.0, values[m.dr[g][t]]);
            }
        }
    }
    return a;
}

FmmDayResult run_fmm_day(const FmmInputs& in, FmmPolicy policy, const FmmDayData& data, const FmmOptions& options) {
    if (data.day == nullptr) throw std::invalid_argument("run_fmm_day: no series to balance");
    if (policy != FmmPolicy::training && data.envelope == nullptr) {
        throw std::invalid_argument("run_fmm_day: proxy envelope required");
    }
    if (policy == FmmPolicy::datadriven && (data.factors == nullptr || data.deployment == nullptr)) {
        throw std::invalid_argument("run_fmm_day: response factors and deployment scenarios required");
    }
    FmmDayResult day;
    day.policy = policy;
    std::vector<UnitInitialState> state = da_initial_state(*in.da);
    for (int hour = 0; hour < kHoursPerDay; ++hour) {
        const FmmHorizon horizon = hourly_horizon(hour, state);
        FmmModel m;
        switch (policy) {
            case FmmPolicy::proxy:
                m = build_fmm_proxy(in, *data.day, *data.envelope, horizon, options);
                break;
            case FmmPolicy::training:
                m = build_fmm_training(in, *data.day, horizon, options);
                break;
            case FmmPolicy::datadriven:
                m = build_fmm_datadriven(in, *data.day, *data.envelope, horizon, *data.factors, *data.deployment,
                                         options);
                break;
        }
        FmmHourResult r;
        CutLoopResult loop;
        if (policy == FmmPolicy::datadriven) {
            loop = solve_with_cuts(m, options);
        } else {
            loop.solution = solve(m.model, options.solve);
            loop.converged = !loop.solution.values.empty();
            if (options.verify && loop.converged) loop.worst_check = check_solution(m.model, loop.solution).worst();
            if (!loop.converged) loop.diagnostics = to_string(loop.solution.status) + " (" + loop.solution.diagnostics + ")";
        }
        if (loop.solution.values.empty()) {
            throw std::runtime_error(
                fmt::format("{} FMM hour {} failed: {}", to_string(policy), hour, loop.diagnostics));
        }
        const std::vector<double>& x = loop.solution.values;
        r.awards = extract_awards(m, x, hour);
        r.objective = loop.solution.objective;
        r.binding_cost = binding_cost(m, x, horizon.binding, &r.violation_mwh);
        r.requirement_up = m.requirements.up;
        r.requirement_down = m.requirements.down;
        r.cuts = std::move(loop.cuts);
        r.rounds = loop.rounds == 0 ? 1 : loop.rounds;
        r.converged = loop.converged;
        r.worst_check = loop.worst_check;

        day.total_objective += r.objective;
        day.total_binding_cost += r.binding_cost;
        day.worst_check = std::max(day.worst_check, r.worst_check);
        day.converged = day.converged && r.converged;
        state = state_after(m.problem, m.vars, x, horizon.binding - 1);
        day.hours.push_back(std::move(r));
    }
    return day;
}

void write_awards_csv(const FmmAwards& a, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "g,t,p,u,ur,dr\n";
    for (std::size_t g = 0; g < a.u.size(); ++g) {
        for (std::size_t t = 0; t < a.u[g].size(); ++t) {
            out << g << ',' << t << ',' << exact(a.p[g][t]) << ',' << a.u[g][t] << ',' << exact(a.ur[g][t]) << ','
                << exact(a.dr[g][t]) << '\n';
        }
    }
    write_text_file(path, out.str());
}

FmmAwards read_awards_csv(const std::filesystem::path& path, int hour, int num_generators) {
    const CsvTable table = CsvTable::read(path);
    FmmAwards a;
    a.hour = hour;
    a.u.assign(num_generators, std::vector<int>(kFmmLength, 0));
    a.p.assign(num_generators, std::vector<double>(kFmmLength, 0.0));
    a.ur = a.dr = a.p;
    std::size_t expected = static_cast<std::size_t>(num_generators) * kFmmLength;
    if (table.rows() != expected) {
        throw DataError(fmt::format("{}: expected {} rows, found {}", path.string(), expected, table.rows()));
    }
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const long long g = table.integer(r, "g");
        const long long t = table.integer(r, "t");
        if (g < 0 || g >= num_generators || t < 0 || t >= kFmmLength) {
            throw DataError(fmt::format("{}: row {}: index out of range", path.string(), r + 2));
        }
        a.p[g][t] = table.number(r, "p");
        a.u[g][t] = table.integer(r, "u") != 0 ? 1 : 0;
        a.ur[g][t] = table.number(r, "ur");
        a.dr[g][t] = table.number(r, "dr");
    }
    return a;
}

void write_cuts_csv(const FmmDayResult& day, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "hour,k,t,s,direction,round,flow\n";
    for (std::size_t h = 0; h < day.hours.size(); ++h) {
        for (const auto& c : day.hours[h].cuts) {
            out << h << ',' << c.line << ',' << c.t << ',' << c.s << ',' << to_string(c.direction) << ',' << c.round
                << ',' << exact(c.flow) << '\n';
        }
    }
    write_text_file(path, out.str());
}

}  // namespace frp

#include "frp/uc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace frp {

double UcProblem::ramp_per_interval(int g) const {
    return system->generators[g].ramp_15 * (interval_hours / 0.25);
}

int UcProblem::min_up_intervals(int g) const {
    return std::max(1, static_cast<int>(std::ceil(system->generators[g].min_up * 0.25 / interval_hours - 1e-9)));
}

int UcProblem::min_down_intervals(int g) const {
    return std::max(1, static_cast<int>(std::ceil(system->generators[g].min_down * 0.25 / interval_hours - 1e-9)));
}

namespace {

void check_problem(const UcProblem& pb) {
    if (pb.system == nullptr) throw std::invalid_argument("UcProblem: system missing");
    const int T = pb.intervals;
    const int G = pb.system->num_generators();
    if (T < 1) throw std::invalid_argument("UcProblem: at least one interval required");
    if (static_cast<int>(pb.system_load.size()) != T || static_cast<int>(pb.solar.size()) != T) {
        throw std::invalid_argument("UcProblem: load/solar series length mismatch");
    }
    if (!pb.initial.empty() && static_cast<int>(pb.initial.size()) != G) {
        throw std::invalid_argument("UcProblem: initial state size mismatch");
    }
    if (!pb.rule.empty()) {
        if (static_cast<int>(pb.rule.size()) != G || static_cast<int>(pb.reference.size()) != G) {
            throw std::invalid_argument("UcProblem: commitment rule/reference size mismatch");
        }
        for (const auto& r : pb.reference) {
            if (static_cast<int>(r.size()) != T) throw std::invalid_argument("UcProblem: reference length mismatch");
        }
    }
    for (const auto* caps : {&pb.ramp_up_cap, &pb.ramp_down_cap}) {
        if (!caps->empty() && static_cast<int>(caps->size()) != G) {
            throw std::invalid_argument("UcProblem: ramp cap size mismatch");
        }
    }
    if (pb.ptdf != nullptr && (pb.ptdf->num_lines() != pb.system->num_lines() ||
                               pb.ptdf->num_buses() != pb.system->num_buses())) {
        throw std::invalid_argument("UcProblem: PTDF dimensions do not match the system");
    }
}

double cap_or(const std::vector<std::vector<double>>& caps, int g, int t, double fallback) {
    if (caps.empty() || caps[g].empty()) return fallback;
    const double c = caps[g][t];
    return c < 0.0 ? fallback : std::min(c, fallback);
}

}  // namespace

UcVariables add_uc_formulation(MilpModel& model, const UcProblem& pb) {
    check_problem(pb);
    const PowerSystem& sys = *pb.system;
    const int T = pb.intervals;
    const int G = sys.num_generators();
    const bool chained = !pb.initial.empty();
    const std::string& tag = pb.tag;

    UcVariables x;
    x.u.assign(G, std::vector<int>(T));
    x.v = x.w = x.p = x.u;
    x.block.assign(G, std::vector<std::vector<int>>(T));

    for (int g = 0; g < G; ++g) {
        const GenerationResource& gen = sys.generators[g];
        const CommitmentRule rule = pb.rule.empty() ? CommitmentRule::free : pb.rule[g];
        for (int t = 0; t < T; ++t) {
            const std::string idx = fmt::format("{}[{},{}]", tag, g, t);
            double lo = 0.0, hi = 1.0;
            if (rule == CommitmentRule::fixed) lo = hi = pb.reference[g][t];
            if (rule == CommitmentRule::at_least) lo = pb.reference[g][t];
            x.u[g][t] = model.add_variable("u" + idx, VarKind::binary, lo, hi, gen.no_load_cost);
            const bool no_transition = !chained && t == 0;
            x.v[g][t] = model.add_variable("v" + idx, VarKind::continuous, 0.0, no_transition ? 0.0 : 1.0,
                                           gen.startup_cost);
            x.w[g][t] = model.add_variable("w" + idx, VarKind::continuous, 0.0, no_transition ? 0.0 : 1.0,
                                           gen.shutdown_cost);
            x.p[g][t] = model.add_variable("p" + idx, VarKind::continuous, 0.0, gen.p_max);
            for (std::size_t e = 0; e < gen.cost_blocks.size(); ++e) {
                const CostBlock& b = gen.cost_blocks[e];
                x.block[g][t].push_back(model.add_variable(fmt::format("pb{}[{},{},{}]", tag, g, t, e),
                                                           VarKind::continuous, 0.0, b.width,
                                                           b.slope * pb.interval_hours));
            }
        }
    }
    for (int t = 0; t < T; ++t) {
        const double penalty = pb.voll * pb.interval_hours;
        x.shortfall.push_back(
            model.add_variable(fmt::format("shortfall{}[{}]", tag, t), VarKind::continuous, 0.0, kInfinity, penalty));
        x.surplus.push_back(
            model.add_variable(fmt::format("surplus{}[{}]", tag, t), VarKind::continuous, 0.0, kInfinity, penalty));
    }

    for (int g = 0; g < G; ++g) {
        const GenerationResource& gen = sys.generators[g];
        const CommitmentRule rule = pb.rule.empty() ? CommitmentRule::free : pb.rule[g];
        const double ramp = pb.ramp_per_interval(g);
        for (int t = 0; t < T; ++t) {
            const std::string idx = fmt::format("{}[{},{}]", tag, g, t);
            // Output composition and block limits.
            std::vector<Term> composition{{x.p[g][t], 1.0}, {x.u[g][t], -gen.p_min}};
            for (std::size_t e = 0; e < gen.cost_blocks.size(); ++e) {
                const int b = x.block[g][t][e];
                composition.push_back({b, -1.0});
                model.add_constraint(fmt::format("block_limit{}[{},{},{}]", tag, g, t, e),
                                     {{b, 1.0}, {x.u[g][t], -gen.cost_blocks[e].width}}, Sense::less_equal, 0.0);
            }
            model.add_constraint("output" + idx, std::move(composition), Sense::equal, 0.0);

            // Startup/shutdown logic and ramping into t.
            const double up_cap = cap_or(pb.ramp_up_cap, g, t, ramp);
            const double down_cap = cap_or(pb.ramp_down_cap, g, t, ramp);
            if (t > 0) {
                model.add_constraint("transition" + idx,
                                     {{x.v[g][t], 1.0}, {x.w[g][t], -1.0}, {x.u[g][t], -1.0}, {x.u[g][t - 1], 1.0}},
                                     Sense::equal, 0.0);
                model.add_constraint("ramp_up" + idx,
                                     {{x.p[g][t], 1.0},
                                      {x.p[g][t - 1], -1.0},
                                      {x.u[g][t - 1], -up_cap},
                                      {x.v[g][t], -gen.ramp_startup}},
                                     Sense::less_equal, 0.0);
                model.add_constraint("ramp_down" + idx,
                                     {{x.p[g][t - 1], 1.0},
                                      {x.p[g][t], -1.0},
                                      {x.u[g][t], -down_cap},
                                      {x.w[g][t], -gen.ramp_shutdown}},
                                     Sense::less_equal, 0.0);
            } else if (chained) {
                const UnitInitialState& init = pb.initial[g];
                const double u0 = init.on ? 1.0 : 0.0;
                const double p0 = init.on ? init.power : 0.0;
                model.add_constraint("transition" + idx, {{x.v[g][t], 1.0}, {x.w[g][t], -1.0}, {x.u[g][t], -1.0}},
                                     Sense::equal, -u0);
                model.add_constraint("ramp_up" + idx, {{x.p[g][t], 1.0}, {x.v[g][t], -gen.ramp_startup}},
                                     Sense::less_equal, p0 + up_cap * u0);
                model.add_constraint("ramp_down" + idx,
                                     {{x.p[g][t], -1.0}, {x.u[g][t], -down_cap}, {x.w[g][t], -gen.ramp_shutdown}},
                                     Sense::less_equal, -p0);
            }
            model.add_constraint("start_or_stop" + idx, {{x.v[g][t], 1.0}, {x.w[g][t], 1.0}}, Sense::less_equal, 1.0);

            // Minimum up/down times: windows truncated at the horizon start,
            // history enters through the carry-over below.
            const int window_up = rule == CommitmentRule::fixed ? 1 : pb.min_up_intervals(g);
            const int window_down = rule == CommitmentRule::fixed ? 1 : pb.min_down_intervals(g);
            std::vector<Term> up_terms{{x.u[g][t], -1.0}};
            for (int s = std::max(0, t - window_up + 1); s <= t; ++s) up_terms.push_back({x.v[g][s], 1.0});
            model.add_constraint("min_up" + idx, std::move(up_terms), Sense::less_equal, 0.0);
            std::vector<Term> down_terms{{x.u[g][t], 1.0}};
            for (int s = std::max(0, t - window_down + 1); s <= t; ++s) down_terms.push_back({x.w[g][s], 1.0});
            model.add_constraint("min_down" + idx, std::move(down_terms), Sense::less_equal, 1.0);
        }

        if (chained && rule != CommitmentRule::fixed) {
            const UnitInitialState& init = pb.initial[g];
            const int remaining =
                init.on ? pb.min_up_intervals(g) - init.intervals_in_state : pb.min_down_intervals(g) - init.intervals_in_state;
            for (int t = 0; t < std::min(remaining, T); ++t) {
                // A reference that forces the unit on overrides leftover down time.
                if (!init.on && rule == CommitmentRule::at_least && pb.reference[g][t] == 1) continue;
                model.add_constraint(fmt::format("carry_over{}[{},{}]", tag, g, t), {{x.u[g][t], 1.0}}, Sense::equal,
                                     init.on ? 1.0 : 0.0);
            }
        }
    }

    for (int t = 0; t < T; ++t) {
        std::vector<Term> balance;
        for (int g = 0; g < G; ++g) balance.push_back({x.p[g][t], 1.0});
        balance.push_back({x.shortfall[t], 1.0});
        balance.push_back({x.surplus[t], -1.0});
        double solar = 0.0;
        for (double s : pb.solar[t]) solar += s;
        model.add_constraint(fmt::format("balance{}[{}]", tag, t), std::move(balance), Sense::equal,
                             pb.system_load[t] - solar);

        if (!pb.reserve_requirement.empty() && pb.reserve_requirement[t] > 0.0) {
            std::vector<Term> reserve;
            for (int g = 0; g < G; ++g) {
                reserve.push_back({x.u[g][t], sys.generators[g].p_max});
                reserve.push_back({x.p[g][t], -1.0});
            }
            model.add_constraint(fmt::format("reserve{}[{}]", tag, t), std::move(reserve), Sense::greater_equal,
                                 pb.reserve_requirement[t]);
        }

        if (pb.ptdf != nullptr) {
            for (int k = 0; k < sys.num_lines(); ++k) {
                FlowExpression flow = line_flow(pb, x, k, t);
                const double rating = sys.lines[k].rating;
                model.add_constraint(fmt::format("flow_max{}[{},{}]", tag, k, t), flow.terms, Sense::less_equal,
                                     rating - flow.constant);
                model.add_constraint(fmt::format("flow_min{}[{},{}]", tag, k, t), std::move(flow.terms),
                                     Sense::greater_equal, -rating - flow.constant);
            }
        }
    }
    return x;
}

FlowExpression line_flow(const UcProblem& pb, const UcVariables& vars, int k, int t) {
    const PowerSystem& sys = *pb.system;
    const PtdfMatrix& ptdf = *pb.ptdf;
    FlowExpression flow;
    for (int g = 0; g < sys.num_generators(); ++g) {
        const double f = ptdf(k, sys.generators[g].bus);
        if (f != 0.0) flow.terms.push_back({vars.p[g][t], f});
    }
    double slack_factor = 0.0;
    for (int n = 0; n < sys.num_buses(); ++n) {
        slack_factor += ptdf(k, n) * sys.load_participation[n];
        flow.constant -= ptdf(k, n) * pb.nodal_load(t, n);
    }
    for (const auto& unit : sys.solar_units) flow.constant += ptdf(k, unit.bus) * pb.solar[t][unit.id];
    if (slack_factor != 0.0) {
        flow.terms.push_back({vars.shortfall[t], slack_factor});
        flow.terms.push_back({vars.surplus[t], -slack_factor});
    }
    return flow;
}

IntervalCost interval_cost(const UcProblem& pb, const UcVariables& vars, const std::vector<double>& x, int t) {
    IntervalCost cost;
    for (int g = 0; g < pb.system->num_generators(); ++g) {
        const GenerationResource& gen = pb.system->generators[g];
        cost.operating += gen.no_load_cost * x[vars.u[g][t]] + gen.startup_cost * x[vars.v[g][t]] +
                          gen.shutdown_cost * x[vars.w[g][t]];
        for (std::size_t e = 0; e < gen.cost_blocks.size(); ++e) {
            cost.operating += gen.cost_blocks[e].slope * pb.interval_hours * x[vars.block[g][t][e]];
        }
    }
    cost.violation_mwh = (x[vars.shortfall[t]] + x[vars.surplus[t]]) * pb.interval_hours;
    return cost;
}

std::vector<UnitInitialState> state_after(const UcProblem& pb, const UcVariables& vars, const std::vector<double>& x,
                                          int t) {
    const int G = pb.system->num_generators();
    std::vector<UnitInitialState> out(G);
    for (int g = 0; g < G; ++g) {
        const bool on = x[vars.u[g][t]] > 0.5;
        int count = 0;
        int s = t;
        while (s >= 0 && (x[vars.u[g][s]] > 0.5) == on) {
            ++count;
            --s;
        }
        if (s < 0 && !pb.initial.empty() && pb.initial[g].on == on) count += pb.initial[g].intervals_in_state;
        if (s < 0 && pb.initial.empty()) count += 1000;
        out[g].on = on;
        out[g].power = on ? x[vars.p[g][t]] : 0.0;
        out[g].intervals_in_state = std::min(count, 1000);
    }
    return out;
}

}  // namespace frp

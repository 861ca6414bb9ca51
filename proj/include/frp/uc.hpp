#pragma once

#include <string>
#include <vector>

#include "frp/milp.hpp"
#include "frp/system.hpp"

namespace frp {

inline constexpr double kDefaultVoll = 10000.0;  // $/MW of power-balance violation

/// How a unit's commitment relates to its reference (day-ahead) schedule.
enum class CommitmentRule {
    free,      // u is a decision
    fixed,     // u == reference
    at_least,  // u >= reference
};

struct UnitInitialState {
    bool on = false;
    double power = 0.0;
    int intervals_in_state = 1000;  // consecutive intervals spent in the current state
};

/// Data for one multi-interval commitment/dispatch problem on a DC network.
/// Interval t of the problem covers `interval_hours`; ramp limits scale
/// linearly from the 15-min values.
struct UcProblem {
    const PowerSystem* system = nullptr;
    const PtdfMatrix* ptdf = nullptr;  // nullptr skips transmission limits
    int intervals = 0;
    double interval_hours = 0.25;
    std::vector<double> system_load;         // [t] MW
    std::vector<std::vector<double>> solar;  // [t][unit] MW
    /// Empty means a free start: no startup/ramp coupling into the first interval.
    std::vector<UnitInitialState> initial;
    std::vector<CommitmentRule> rule;                // [g]; empty means all free
    std::vector<std::vector<int>> reference;         // [g][t]; required unless all free
    std::vector<std::vector<double>> ramp_up_cap;    // [g][t] tightens the ramp into t; negative keeps default
    std::vector<std::vector<double>> ramp_down_cap;  // [g][t]
    std::vector<double> reserve_requirement;         // [t]; optional spinning reserve
    double voll = kDefaultVoll;
    std::string tag;  // prefix added to every name, keeps builders composable

    double nodal_load(int t, int bus) const { return system_load[t] * system->load_participation[bus]; }
    double ramp_per_interval(int g) const;
    int min_up_intervals(int g) const;
    int min_down_intervals(int g) const;
};

/// Variable handles created by add_uc_formulation, indexed [g][t].
struct UcVariables {
    std::vector<std::vector<int>> u, v, w, p;
    std::vector<std::vector<std::vector<int>>> block;  // [g][t][e]
    std::vector<int> shortfall;                       // [t] unserved load
    std::vector<int> surplus;                         // [t] spilled generation
};

/// Adds the commitment, dispatch, ramping, balance and transmission
/// constraints plus their objective terms:
///   cost = sum F*u + slope*hours*block + SU*v + SD*w + VOLL*hours*(shortfall+surplus).
/// Balance slack is spread over buses by load participation in flow rows.
UcVariables add_uc_formulation(MilpModel& model, const UcProblem& problem);

/// Linear flow expression of line k at interval t: sum(terms) + constant.
struct FlowExpression {
    std::vector<Term> terms;
    double constant = 0.0;
};

FlowExpression line_flow(const UcProblem& problem, const UcVariables& vars, int line, int t);

/// Evaluates the operating cost of interval t for a solution, split into the
/// part without violation and the violation itself (MWh).
struct IntervalCost {
    double operating = 0.0;      // $ excluding violation penalty
    double violation_mwh = 0.0;  // (shortfall + surplus) * hours
};

IntervalCost interval_cost(const UcProblem& problem, const UcVariables& vars, const std::vector<double>& values,
                           int t);

/// State after interval t, for chaining the next horizon.
std::vector<UnitInitialState> state_after(const UcProblem& problem, const UcVariables& vars,
                                          const std::vector<double>& values, int t);

}  // namespace frp

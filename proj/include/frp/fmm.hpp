#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "frp/da.hpp"
#include "frp/milp.hpp"
#include "frp/scenario.hpp"
#include "frp/uc.hpp"

namespace frp {

inline constexpr int kFmmLength = 7;
inline constexpr int kFmmBinding = 4;
inline constexpr double kDefaultZetaMin = 0.05;

/// One trading-hour FMM window. Interval t of the window maps to the day's
/// interval start + t; positions past the end of the day repeat the last one.
struct FmmHorizon {
    int start = 0;
    int length = kFmmLength;
    int binding = kFmmBinding;
    std::vector<UnitInitialState> initial;  // empty means a free start

    int global(int t) const { return std::min(start + t, kIntervalsPerDay - 1); }
    int hour() const { return start / kIntervalsPerHour; }
};

FmmHorizon hourly_horizon(int hour, std::vector<UnitInitialState> initial);

/// Initial state handed to the first hour of the day: the DA hour-0 schedule,
/// with long histories so no min up/down carry-over binds.
std::vector<UnitInitialState> da_initial_state(const DaCommitments& da);

Scenario horizon_slice(const Scenario& day, const FmmHorizon& horizon);
ProxyEnvelope horizon_slice(const ProxyEnvelope& day, const FmmHorizon& horizon);

/// Proxy requirements for t = 0 .. n-2 of the given series.
struct FrpRequirements {
    std::vector<double> up;
    std::vector<double> down;
};

FrpRequirements compute_frp_requirements(const ProxyEnvelope& envelope, const Scenario& forecast);

/// Netload of the deployment scenario at t+1 minus the forecast netload at t,
/// for t = 0 .. n-2. Positive values are upward events, negative downward.
std::vector<double> delta_netload(const Scenario& forecast, const Scenario& deployment);

/// Predicted normalized response zeta[g][t][s] over the whole day. Rows of
/// units without a model stay zero.
struct RampResponseFactors {
    std::vector<std::vector<std::vector<double>>> zeta;
    std::vector<bool> has_model;  // [g]

    int num_scenarios() const { return zeta.empty() || zeta[0].empty() ? 0 : static_cast<int>(zeta[0][0].size()); }
};

enum class Direction { up, down };
std::string to_string(Direction direction);

struct PostDeploymentCut {
    int line = 0;
    int t = 0;  // window interval
    int s = 0;
    Direction direction = Direction::up;
    int round = 0;
    double flow = 0.0;  // violating flow that triggered the cut
};

struct FmmOptions {
    double zeta_min = kDefaultZetaMin;
    double cut_tolerance = 1e-4;  // MW
    int max_rounds = 10;
    double voll = kDefaultVoll;
    /// Penalty ($/MW) on shortfalls of the requirement coverage rows; zero keeps them hard.
    double frp_shortage_penalty = 0.0;
    /// Re-checks every solution arithmetically and records the worst violation.
    bool verify = true;
    SolveOptions solve;
};

struct FmmInputs {
    const PowerSystem* system = nullptr;
    const PtdfMatrix* ptdf = nullptr;
    const DaCommitments* da = nullptr;
};

struct FmmModel {
    MilpModel model;
    UcProblem problem;
    UcVariables vars;
    Scenario forecast;  // window series the energy schedule balances
    FrpRequirements requirements;
    std::vector<std::vector<int>> ur, dr;  // [g][t], t < length-1; empty for training
    std::vector<Scenario> deployment;       // window series per scenario
    std::vector<std::vector<double>> delta_nl;         // [s][t]
    std::vector<std::vector<std::vector<int>>> aux;    // [s][g][t], -1 where absent

    int length() const { return problem.intervals; }
    bool has_frp() const { return !ur.empty(); }
    /// +1 upward, -1 downward, 0 no event.
    int event_sign(int s, int t) const;
};

FmmModel build_fmm_proxy(const FmmInputs& in, const Scenario& forecast_day, const ProxyEnvelope& envelope_day,
                         const FmmHorizon& horizon, const FmmOptions& options = {});

/// Energy-only FMM balancing a training scenario.
FmmModel build_fmm_training(const FmmInputs& in, const Scenario& training_day, const FmmHorizon& horizon,
                            const FmmOptions& options = {});

/// Proxy model plus response auxiliaries for every deployment scenario. The
/// post-deployment flow limits are left to solve_with_cuts.
FmmModel build_fmm_datadriven(const FmmInputs& in, const Scenario& forecast_day, const ProxyEnvelope& envelope_day,
                              const FmmHorizon& horizon, const RampResponseFactors& factors,
                              const ScenarioSet& deployment, const FmmOptions& options = {});

/// Post-deployment flow of line k at t for scenario s as an expression.
/// Upward events add the upward auxiliaries at their buses, downward events
/// subtract the downward ones.
FlowExpression post_deployment_expression(const FmmModel& model, int line, int t, int s);

/// Flows [k][t] after deploying scenario s in `direction`. Intervals whose
/// event has the other sign are evaluated with zero auxiliaries.
std::vector<std::vector<double>> post_deployment_flows(const FmmModel& model, const std::vector<double>& values,
                                                       int s, Direction direction);

struct CutLoopResult {
    MilpSolution solution;
    std::vector<PostDeploymentCut> cuts;
    int rounds = 0;
    bool converged = false;
    std::string diagnostics;
    double worst_check = 0.0;
};

/// Solves, then repeatedly adds the two-sided post-deployment limits of every
/// (line, t, s) whose flow exceeds the rating by more than the tolerance.
CutLoopResult solve_with_cuts(FmmModel& model, const FmmOptions& options = {});

/// Largest post-deployment rating excess over all (k, t, s) of a solution.
double worst_post_deployment_excess(const FmmModel& model, const std::vector<double>& values);

/// Schedule and awards of one trading hour, indexed [g][t] over the window.
/// Awards of the last window interval are zero.
struct FmmAwards {
    int hour = 0;
    std::vector<std::vector<int>> u;
    std::vector<std::vector<double>> p, ur, dr;
};

FmmAwards extract_awards(const FmmModel& model, const std::vector<double>& values, int hour);

enum class FmmPolicy { proxy, training, datadriven };
std::string to_string(FmmPolicy policy);

struct FmmHourResult {
    FmmAwards awards;
    double objective = 0.0;
    double binding_cost = 0.0;     // objective terms of the binding intervals
    double violation_mwh = 0.0;    // binding intervals
    std::vector<double> requirement_up, requirement_down;
    std::vector<PostDeploymentCut> cuts;
    int rounds = 1;
    bool converged = true;
    double worst_check = 0.0;
};

struct FmmDayResult {
    FmmPolicy policy = FmmPolicy::proxy;
    std::vector<FmmHourResult> hours;
    double total_objective = 0.0;
    double total_binding_cost = 0.0;
    double worst_check = 0.0;
    bool converged = true;
};

/// Data the rolling day needs beyond the network: the series to balance and,
/// depending on the policy, the proxy envelope, response factors and
/// deployment scenarios.
struct FmmDayData {
    const Scenario* day = nullptr;
    const ProxyEnvelope* envelope = nullptr;
    const RampResponseFactors* factors = nullptr;
    const ScenarioSet* deployment = nullptr;
};

/// Runs the 24 hourly FMMs in sequence, each starting from the state the
/// previous hour reaches at its last binding interval.
FmmDayResult run_fmm_day(const FmmInputs& in, FmmPolicy policy, const FmmDayData& data,
                         const FmmOptions& options = {});

/// Per-hour awards CSV (g,t,p,u,ur,dr) and cut log (hour,k,t,s,direction,round).
void write_awards_csv(const FmmAwards& awards, const std::filesystem::path& path);
FmmAwards read_awards_csv(const std::filesystem::path& path, int hour, int num_generators);
void write_cuts_csv(const FmmDayResult& day, const std::filesystem::path& path);

}  // namespace frp

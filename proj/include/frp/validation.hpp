#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "frp/fmm.hpp"

namespace frp {

struct ValidationOptions {
    double voll = kDefaultVoll;
    bool verify = true;
    SolveOptions solve;
};

/// Outcome of one out-of-sample day under one policy. Costs and counts cover
/// binding intervals only.
struct ScenarioResult {
    int scenario_id = 0;
    double rt_cost_excl_violation = 0.0;  // $
    double total_violation = 0.0;         // MWh
    int fs_commitments = 0;               // (fast-start unit, interval) pairs online
    double total_cost = 0.0;              // excl + VOLL * violation
    std::vector<double> interval_cost;    // [t] $ excluding violation
    std::vector<double> interval_violation;  // [t] MWh
    double worst_check = 0.0;       // largest constraint violation found by check_solution
    double worst_cap_excess = 0.0;  // largest breach of the award caps on must-run moves
};

/// Rolls 24 seven-interval RTUCs over the realized scenario. Must-run moves
/// into t are capped by the awards held at t-1; fast-start units may be
/// committed on top of the DA schedule.
ScenarioResult run_rtuc_validation(const FmmInputs& in, const std::vector<FmmAwards>& awards, const Scenario& realized,
                                   const ValidationOptions& options = {});

struct PolicyStats {
    double avg_cost = 0.0, sum_cost = 0.0, max_cost = 0.0;
    double avg_violation = 0.0, sum_violation = 0.0, max_violation = 0.0;
    double avg_fs = 0.0, sum_fs = 0.0, max_fs = 0.0;
    double avg_total = 0.0, sum_total = 0.0, max_total = 0.0;
};

struct IntervalQuartiles {
    int t = 0;
    double q1 = 0.0, median = 0.0, q3 = 0.0;  // proxy minus data-driven cost, $
};

struct MetricsReport {
    std::vector<ScenarioResult> proxy, datadriven;
    PolicyStats proxy_stats, datadriven_stats;
    int scenarios = 0;
    int improved_cost = 0;       // data-driven strictly cheaper, excluding violation
    int improved_violation = 0;  // strictly less violation
    int improved_fs = 0;         // strictly fewer fast-start commitments
    int improved_total = 0;
    std::vector<IntervalQuartiles> intervals;
    double fmm_cost_proxy = 0.0;
    double fmm_cost_datadriven = 0.0;
};

PolicyStats policy_stats(const std::vector<ScenarioResult>& results);

/// Pairs results scenario by scenario. Throws std::invalid_argument on empty
/// or mismatched lists.
MetricsReport aggregate_metrics(const std::vector<ScenarioResult>& proxy, const std::vector<ScenarioResult>& datadriven);

struct ComparisonRow {
    std::string table;
    std::string metric;
    double proxy = 0.0;
    double datadriven = 0.0;
    double difference = 0.0;  // data-driven minus proxy
};

std::vector<ComparisonRow> compare_policies(const MetricsReport& report);

/// Writes table_improvements.csv, table_violations.csv, table_costs.csv,
/// table_fs_commitments.csv and interval_quartiles.csv.
void emit_tables(const MetricsReport& report, const std::filesystem::path& dir);

void write_results_csv(const std::vector<ScenarioResult>& results, const std::filesystem::path& path);

}  // namespace frp

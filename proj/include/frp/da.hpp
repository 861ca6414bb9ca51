#pragma once

#include <filesystem>
#include <vector>

#include "frp/milp.hpp"
#include "frp/scenario.hpp"
#include "frp/uc.hpp"

namespace frp {

/// Hourly day-ahead commitments, indexed [g][hour].
struct DaCommitments {
    std::vector<std::vector<int>> u;
    std::vector<std::vector<double>> p;  // diagnostic only
    double objective = 0.0;

    int num_hours() const { return u.empty() ? 0 : static_cast<int>(u[0].size()); }
    /// Commitment inherited by a 15-min interval from its containing hour.
    int at_interval(int g, int interval) const { return u[g][interval / kIntervalsPerHour]; }
};

struct DaOptions {
    double reserve_fraction = 0.0;  // optional spinning reserve as a fraction of hourly load
    double voll = kDefaultVoll;
    SolveOptions solve;
};

struct DaModel {
    MilpModel model;
    UcProblem problem;
    UcVariables vars;
};

DaModel build_da_model(const PowerSystem& system, const PtdfMatrix* ptdf, const ForecastProfile& profile,
                       const DaOptions& options = {});

/// Builds and solves the day-ahead model. Throws std::runtime_error when the
/// solver does not return a usable solution.
DaCommitments run_da(const PowerSystem& system, const PtdfMatrix* ptdf, const ForecastProfile& profile,
                     const DaOptions& options = {});

/// CSV with columns generator,hour,u,p.
void write_da_csv(const DaCommitments& da, const std::filesystem::path& path);
DaCommitments read_da_csv(const std::filesystem::path& path, int num_generators);

}  // namespace frp

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "frp/system.hpp"

namespace frp {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kIntervalsPerDay = 96;
inline constexpr int kIntervalsPerHour = 4;
inline constexpr double kIntervalHours = 0.25;

/// Day-ahead (hourly) and real-time (15-min) forecasts. Solar values are per
/// unit, indexed [interval][unit].
struct ForecastProfile {
    std::string label;
    std::vector<double> hourly_load;
    std::vector<std::vector<double>> hourly_solar;
    std::vector<double> load;
    std::vector<std::vector<double>> solar;

    int num_intervals() const { return static_cast<int>(load.size()); }
    double total_solar(int t) const;
    double netload(int t) const { return load[t] - total_solar(t); }
    double hourly_total_solar(int h) const;
};

struct UncertaintyConfig {
    double sigma_hourly_frac = 0.05;
    double confidence_z = 1.96;
    double truncation = 3.0;  // in standard deviations
    std::uint64_t seed = 1;

    /// Four independent 15-min errors aggregate to one hourly error, so the
    /// 15-min standard deviation is half the hourly one.
    double sigma_15min_frac() const { return sigma_hourly_frac / 2.0; }
};

enum class ScenarioKind { training, deployment, out_of_sample };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& text);

/// One realization of system load and per-unit solar over the day. Nodal loads
/// are the system load disaggregated by the fixed participation factors.
struct Scenario {
    ScenarioKind kind = ScenarioKind::training;
    int id = 0;
    std::uint64_t seed = 0;
    double quantile_z = 0.0;  // deployment scenarios only
    std::vector<double> load;
    std::vector<std::vector<double>> solar;

    int num_intervals() const { return static_cast<int>(load.size()); }
    double total_solar(int t) const;
    double netload(int t) const { return load[t] - total_solar(t); }
    double nodal_load(int t, int bus, const PowerSystem& system) const {
        return load[t] * system.load_participation[bus];
    }
};

struct ScenarioSet {
    ScenarioKind kind = ScenarioKind::training;
    UncertaintyConfig config;
    std::vector<Scenario> scenarios;

    int size() const { return static_cast<int>(scenarios.size()); }
};

struct ProxyEnvelope {
    std::vector<double> load_min;
    std::vector<double> load_max;
    std::vector<std::vector<double>> solar_min;  // [t][unit]
    std::vector<std::vector<double>> solar_max;

    double total_solar_min(int t) const;
    double total_solar_max(int t) const;
};

/// Reads the hourly (24 rows) and 15-min (96 rows) CSV profiles with columns
/// interval_index,load_mw,solar_total_mw. Total solar is split across units
/// by their shares.
ForecastProfile load_profiles(const std::filesystem::path& hourly_csv, const std::filesystem::path& quarter_csv,
                              const PowerSystem& system);

/// Builds a profile from in-memory 15-min series; hourly values are the
/// averages of the four sub-intervals.
ForecastProfile make_profile(const std::string& label, const std::vector<double>& load,
                             const std::vector<double>& total_solar, const PowerSystem& system);

void write_profiles(const ForecastProfile& profile, const std::filesystem::path& hourly_csv,
                    const std::filesystem::path& quarter_csv);

/// The forecast itself as a scenario, useful as a zero-noise reference.
Scenario forecast_scenario(const ForecastProfile& profile, ScenarioKind kind);

/// Monte Carlo sampling of independent truncated Gaussian errors per interval
/// and per quantity. Scenario i draws from its own stream derived from
/// (cfg.seed, kind, i), so results do not depend on evaluation order.
ScenarioSet sample_scenarios(const ForecastProfile& profile, const PowerSystem& system, const UncertaintyConfig& cfg,
                             int count, ScenarioKind kind);

/// Standard-normal quantiles used for S deployment scenarios, ordered from
/// the largest upward deviation to the largest downward one. The outermost
/// pair is +-outer_z (the envelope's confidence z); further pairs move inward
/// to the 20% tail.
std::vector<double> deployment_quantiles(int count, double outer_z = 1.96);

/// Deterministic deployment scenarios at symmetric quantiles: load shifted by
/// +z*sigma and solar by -z*sigma, clamped to [0, capacity].
ScenarioSet select_deployment_scenarios(const ForecastProfile& profile, const PowerSystem& system,
                                        const UncertaintyConfig& cfg, int count);

ProxyEnvelope proxy_envelopes(const ForecastProfile& profile, const PowerSystem& system, const UncertaintyConfig& cfg);

/// Long-format audit CSV: kind,scenario_id,seed,quantile_z,interval,entity,value
/// where entity is "load" or "solar<i>". Values are written round-trip exact.
void write_scenarios_csv(const ScenarioSet& set, const std::filesystem::path& path);
ScenarioSet read_scenarios_csv(const std::filesystem::path& path, const UncertaintyConfig& cfg);

}  // namespace frp

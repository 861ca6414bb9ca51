#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace frp {

/// Raised when a system or profile file cannot be turned into a valid model.
/// The message carries the offending location, e.g. "generators[3].bus".
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Bus {
    int id = 0;
    std::string name;
};

struct TransmissionLine {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.0;  // per unit
    double rating = 0.0;     // MW
};

struct CostBlock {
    double width = 0.0;  // MW
    double slope = 0.0;  // $/MWh
};

struct GenerationResource {
    int id = 0;
    std::string name;
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    std::vector<CostBlock> cost_blocks;
    double no_load_cost = 0.0;   // $ per interval committed
    double startup_cost = 0.0;   // $ per event
    double shutdown_cost = 0.0;  // $ per event
    double ramp_15 = 0.0;        // MW per 15 minutes
    double ramp_startup = 0.0;   // MW
    double ramp_shutdown = 0.0;  // MW
    int min_up = 1;              // 15-min intervals
    int min_down = 1;            // 15-min intervals
    double frp_up_cost = 0.0;    // $/MW
    double frp_down_cost = 0.0;  // $/MW
    bool fast_start = false;
};

struct SolarUnit {
    int id = 0;
    int bus = 0;
    double capacity = 0.0;  // MW
    double share = 0.0;     // fraction of total solar output
};

struct PowerSystem {
    std::string name;
    std::vector<Bus> buses;
    std::vector<TransmissionLine> lines;
    std::vector<GenerationResource> generators;
    std::vector<SolarUnit> solar_units;
    std::vector<double> load_participation;  // per bus, sums to 1
    int slack_bus = 0;

    int num_buses() const { return static_cast<int>(buses.size()); }
    int num_lines() const { return static_cast<int>(lines.size()); }
    int num_generators() const { return static_cast<int>(generators.size()); }
    int num_solar() const { return static_cast<int>(solar_units.size()); }
};

/// Dense line-by-bus shift factors for injections withdrawn at the slack bus.
class PtdfMatrix {
public:
    PtdfMatrix() = default;
    PtdfMatrix(int lines, int buses, int slack_bus);

    double operator()(int line, int bus) const { return values_[index(line, bus)]; }
    double& operator()(int line, int bus) { return values_[index(line, bus)]; }

    int num_lines() const { return lines_; }
    int num_buses() const { return buses_; }
    int slack_bus() const { return slack_bus_; }

    /// Line flows (MW) produced by a nodal injection vector.
    std::vector<double> flows(const std::vector<double>& injection) const;

private:
    std::size_t index(int line, int bus) const {
        return static_cast<std::size_t>(line) * static_cast<std::size_t>(buses_) +
               static_cast<std::size_t>(bus);
    }

    int lines_ = 0;
    int buses_ = 0;
    int slack_bus_ = 0;
    std::vector<double> values_;
};

/// Parses a JSON system file and checks every structural invariant.
/// Throws DataError naming the file location of the first problem found.
PowerSystem load_system(const std::filesystem::path& path);

/// Same as load_system but from an in-memory JSON document.
PowerSystem parse_system(const std::string& json_text);

/// Returns one human-readable description per violated invariant; empty when
/// the system is valid. Never throws.
std::vector<std::string> validate_system(const PowerSystem& system);

/// DC power flow PTDF with the system's slack bus as reference.
/// Throws DataError if the network is disconnected.
PtdfMatrix compute_ptdf(const PowerSystem& system);

/// Direct DC power flow: solves B*theta = P on the reduced network and returns
/// the line flows. Used as an independent check of PTDF-based flows.
std::vector<double> dc_power_flow(const PowerSystem& system, const std::vector<double>& injection);

/// Serializes a system back to the JSON schema accepted by load_system.
std::string system_to_json(const PowerSystem& system);

}  // namespace frp

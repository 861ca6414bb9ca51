#include "frp/system.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace frp {

namespace {

using nlohmann::json;

constexpr double kDefaultFrpCost = 0.5;
constexpr double kShareTolerance = 1e-9;
constexpr double kWidthTolerance = 1e-6;

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw DataError(fmt::format("{}: missing field '{}'", where, key));
    }
    return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) {
        throw DataError(fmt::format("{}.{}: invalid numeric field", where, key));
    }
    double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw DataError(fmt::format("{}.{}: invalid numeric field", where, key));
    }
    return x;
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) {
        throw DataError(fmt::format("{}.{}: expected an integer", where, key));
    }
    return v.get<int>();
}

const json& array(const json& obj, const std::string& key) {
    const json& v = require(obj, key, "system");
    if (!v.is_array()) {
        throw DataError(fmt::format("system.{}: expected an array", key));
    }
    return v;
}

std::vector<bool> reachable_from(const PowerSystem& system, int start) {
    const int n = system.num_buses();
    std::vector<std::vector<int>> adjacency(n);
    for (const auto& line : system.lines) {
        if (line.from_bus < 0 || line.from_bus >= n || line.to_bus < 0 || line.to_bus >= n) continue;
        adjacency[line.from_bus].push_back(line.to_bus);
        adjacency[line.to_bus].push_back(line.from_bus);
    }
    std::vector<bool> seen(n, false);
    if (start < 0 || start >= n) return seen;
    std::queue<int> frontier;
    frontier.push(start);
    seen[start] = true;
    while (!frontier.empty()) {
        int bus = frontier.front();
        frontier.pop();
        for (int next : adjacency[bus]) {
            if (!seen[next]) {
                seen[next] = true;
                frontier.push(next);
            }
        }
    }
    return seen;
}

// Reduced susceptance matrix with the slack row/column removed. `position`
// maps a bus id to its row, or -1 for the slack bus.
Eigen::MatrixXd reduced_susceptance(const PowerSystem& system, std::vector<int>& position) {
    const int n = system.num_buses();
    position.assign(n, -1);
    int row = 0;
    for (int b = 0; b < n; ++b) {
        if (b != system.slack_bus) position[b] = row++;
    }
    Eigen::MatrixXd b_matrix = Eigen::MatrixXd::Zero(n - 1, n - 1);
    for (const auto& line : system.lines) {
        const double b = 1.0 / line.reactance;
        const int f = position[line.from_bus];
        const int t = position[line.to_bus];
        if (f >= 0) b_matrix(f, f) += b;
        if (t >= 0) b_matrix(t, t) += b;
        if (f >= 0 && t >= 0) {
            b_matrix(f, t) -= b;
            b_matrix(t, f) -= b;
        }
    }
    return b_matrix;
}

void require_connected(const PowerSystem& system) {
    auto seen = reachable_from(system, system.slack_bus);
    for (int b = 0; b < system.num_buses(); ++b) {
        if (!seen[b]) {
            throw DataError(fmt::format("network is disconnected: bus {} unreachable from slack bus {}", b,
                                        system.slack_bus));
        }
    }
}

}  // namespace

PtdfMatrix::PtdfMatrix(int lines, int buses, int slack_bus)
    : lines_(lines),
      buses_(buses),
      slack_bus_(slack_bus),
      values_(static_cast<std::size_t>(lines) * static_cast<std::size_t>(buses), 0.0) {}

std::vector<double> PtdfMatrix::flows(const std::vector<double>& injection) const {
    std::vector<double> out(lines_, 0.0);
    for (int k = 0; k < lines_; ++k) {
        double f = 0.0;
        for (int n = 0; n < buses_; ++n) f += (*this)(k, n) * injection[n];
        out[k] = f;
    }
    return out;
}

PowerSystem parse_system(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(fmt::format("system: malformed JSON ({})", e.what()));
    }
    if (!doc.is_object()) throw DataError("system: top level must be an object");

    PowerSystem sys;
    sys.name = doc.value("name", std::string{});
    sys.slack_bus = integer(doc, "slack_bus", "system");

    const json& buses = array(doc, "buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string where = fmt::format("buses[{}]", i);
        Bus bus;
        bus.id = integer(buses[i], "id", where);
        bus.name = buses[i].value("name", fmt::format("bus{}", bus.id + 1));
        sys.buses.push_back(bus);
    }
    std::sort(sys.buses.begin(), sys.buses.end(), [](const Bus& a, const Bus& b) { return a.id < b.id; });
    for (int i = 0; i < sys.num_buses(); ++i) {
        if (sys.buses[i].id != i) {
            throw DataError(fmt::format("buses: ids must be contiguous 0..{}, found {}", sys.num_buses() - 1,
                                        sys.buses[i].id));
        }
    }
    auto check_bus = [&](int bus, const std::string& where) {
        if (bus < 0 || bus >= sys.num_buses()) {
            throw DataError(fmt::format("{}: unknown bus {}", where, bus));
        }
    };
    check_bus(sys.slack_bus, "system.slack_bus");

    const json& lines = array(doc, "lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string where = fmt::format("lines[{}]", i);
        TransmissionLine line;
        line.id = static_cast<int>(i);
        line.from_bus = integer(lines[i], "from", where);
        line.to_bus = integer(lines[i], "to", where);
        check_bus(line.from_bus, where + ".from");
        check_bus(line.to_bus, where + ".to");
        line.reactance = number(lines[i], "reactance", where);
        line.rating = number(lines[i], "rating", where);
        sys.lines.push_back(line);
    }

    const json& gens = array(doc, "generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string where = fmt::format("generators[{}]", i);
        const json& g = gens[i];
        GenerationResource gen;
        gen.id = static_cast<int>(i);
        gen.name = g.value("name", fmt::format("G{}", i + 1));
        gen.bus = integer(g, "bus", where);
        check_bus(gen.bus, where + ".bus");
        gen.p_min = number(g, "p_min", where);
        gen.p_max = number(g, "p_max", where);
        const json& blocks = require(g, "cost_blocks", where);
        if (!blocks.is_array()) throw DataError(where + ".cost_blocks: expected an array");
        for (std::size_t e = 0; e < blocks.size(); ++e) {
            const std::string bw = fmt::format("{}.cost_blocks[{}]", where, e);
            gen.cost_blocks.push_back({number(blocks[e], "width", bw), number(blocks[e], "slope", bw)});
        }
        gen.no_load_cost = number(g, "no_load_cost", where);
        gen.startup_cost = number(g, "startup_cost", where);
        gen.shutdown_cost = number_or(g, "shutdown_cost", where, 0.0);
        gen.ramp_15 = number(g, "ramp_15", where);
        gen.ramp_startup = number(g, "ramp_startup", where);
        gen.ramp_shutdown = number(g, "ramp_shutdown", where);
        gen.min_up = integer(g, "min_up", where);
        gen.min_down = integer(g, "min_down", where);
        gen.frp_up_cost = number_or(g, "frp_up_cost", where, kDefaultFrpCost);
        gen.frp_down_cost = number_or(g, "frp_down_cost", where, kDefaultFrpCost);
        gen.fast_start = g.value("fast_start", false);
        sys.generators.push_back(std::move(gen));
    }

    if (doc.contains("solar")) {
        const json& solar = array(doc, "solar");
        for (std::size_t i = 0; i < solar.size(); ++i) {
            const std::string where = fmt::format("solar[{}]", i);
            SolarUnit unit;
            unit.id = static_cast<int>(i);
            unit.bus = integer(solar[i], "bus", where);
            check_bus(unit.bus, where + ".bus");
            unit.capacity = number(solar[i], "capacity", where);
            unit.share = number(solar[i], "share", where);
            sys.solar_units.push_back(unit);
        }
    }

    sys.load_participation.assign(sys.num_buses(), 0.0);
    const json& part = array(doc, "participation");
    for (std::size_t i = 0; i < part.size(); ++i) {
        const std::string where = fmt::format("participation[{}]", i);
        int bus = integer(part[i], "bus", where);
        check_bus(bus, where + ".bus");
        sys.load_participation[bus] += number(part[i], "factor", where);
    }

    return sys;
}

PowerSystem load_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("{}: cannot open system file", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    PowerSystem sys;
    try {
        sys = parse_system(buffer.str());
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
    auto problems = validate_system(sys);
    if (!problems.empty()) {
        throw DataError(fmt::format("{}: {}", path.string(), problems.front()));
    }
    return sys;
}

std::vector<std::string> validate_system(const PowerSystem& system) {
    std::vector<std::string> out;
    const int n = system.num_buses();
    auto bus_ok = [n](int b) { return b >= 0 && b < n; };

    if (n == 0) out.emplace_back("system has no buses");
    for (int i = 0; i < n; ++i) {
        if (system.buses[i].id != i) {
            out.push_back(fmt::format("bus ids must be contiguous 0..{}", n - 1));
            break;
        }
    }
    if (!bus_ok(system.slack_bus)) out.push_back(fmt::format("slack bus {} does not exist", system.slack_bus));

    for (const auto& line : system.lines) {
        if (!bus_ok(line.from_bus) || !bus_ok(line.to_bus)) {
            out.push_back(fmt::format("line {}: unknown bus", line.id));
            continue;
        }
        if (line.from_bus == line.to_bus) out.push_back(fmt::format("line {}: from_bus equals to_bus", line.id));
        if (!(line.reactance > 0.0)) out.push_back(fmt::format("line {}: reactance must be positive", line.id));
        if (!(line.rating > 0.0)) out.push_back(fmt::format("line {}: rating must be positive", line.id));
    }

    for (const auto& g : system.generators) {
        const std::string& name = g.name;
        if (!bus_ok(g.bus)) out.push_back(fmt::format("generator {}: unknown bus {}", name, g.bus));
        if (!(g.p_min >= 0.0 && g.p_min <= g.p_max)) {
            out.push_back(fmt::format("generator {}: requires 0 <= p_min <= p_max", name));
        }
        double width = 0.0;
        for (const auto& block : g.cost_blocks) {
            width += block.width;
            if (block.width < 0.0) out.push_back(fmt::format("generator {}: negative block width", name));
            if (block.slope < 0.0) out.push_back(fmt::format("generator {}: negative block slope", name));
        }
        if (std::abs(width - (g.p_max - g.p_min)) > kWidthTolerance) {
            out.push_back(fmt::format("generator {}: cost block widths sum to {} but p_max - p_min is {}", name,
                                      width, g.p_max - g.p_min));
        }
        if (g.ramp_startup < g.p_min) out.push_back(fmt::format("generator {}: startup ramp below p_min", name));
        if (g.ramp_shutdown < g.p_min) out.push_back(fmt::format("generator {}: shutdown ramp below p_min", name));
        if (g.ramp_15 < 0.0) out.push_back(fmt::format("generator {}: negative 15-min ramp", name));
        if (g.min_up < 1 || g.min_down < 1) {
            out.push_back(fmt::format("generator {}: min up/down times must be >= 1", name));
        }
        if (g.no_load_cost < 0.0 || g.startup_cost < 0.0 || g.shutdown_cost < 0.0 || g.frp_up_cost < 0.0 ||
            g.frp_down_cost < 0.0) {
            out.push_back(fmt::format("generator {}: costs must be non-negative", name));
        }
    }

    if (!system.solar_units.empty()) {
        double shares = 0.0;
        for (const auto& s : system.solar_units) {
            shares += s.share;
            if (!bus_ok(s.bus)) out.push_back(fmt::format("solar unit {}: unknown bus {}", s.id, s.bus));
            if (s.capacity < 0.0) out.push_back(fmt::format("solar unit {}: negative capacity", s.id));
            if (s.share < 0.0) out.push_back(fmt::format("solar unit {}: negative share", s.id));
        }
        if (std::abs(shares - 1.0) > kShareTolerance) {
            out.push_back(fmt::format("solar shares sum to {}, expected 1", shares));
        }
    }

    if (static_cast<int>(system.load_participation.size()) != n) {
        out.push_back("load participation must have one entry per bus");
    } else {
        double total = 0.0;
        for (double f : system.load_participation) {
            total += f;
            if (f < 0.0) out.emplace_back("load participation factors must be non-negative");
        }
        if (std::abs(total - 1.0) > kShareTolerance) {
            out.push_back(fmt::format("load participation sums to {}, expected 1", total));
        }
    }

    if (n > 0 && bus_ok(system.slack_bus)) {
        auto seen = reachable_from(system, system.slack_bus);
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) out.emplace_back("network is disconnected");
    }
    return out;
}

PtdfMatrix compute_ptdf(const PowerSystem& system) {
    require_connected(system);
    const int n = system.num_buses();
    PtdfMatrix ptdf(system.num_lines(), n, system.slack_bus);
    if (n <= 1) return ptdf;

    std::vector<int> position;
    Eigen::MatrixXd b_matrix = reduced_susceptance(system, position);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b_matrix);
    if (!lu.isInvertible()) throw DataError("network is disconnected: singular susceptance matrix");
    Eigen::MatrixXd x = lu.inverse();

    for (const auto& line : system.lines) {
        const double b = 1.0 / line.reactance;
        const int f = position[line.from_bus];
        const int t = position[line.to_bus];
        for (int bus = 0; bus < n; ++bus) {
            const int c = position[bus];
            if (c < 0) continue;
            const double theta_f = f >= 0 ? x(f, c) : 0.0;
            const double theta_t = t >= 0 ? x(t, c) : 0.0;
            ptdf(line.id, bus) = b * (theta_f - theta_t);
        }
    }
    return ptdf;
}

std::vector<double> dc_power_flow(const PowerSystem& system, const std::vector<double>& injection) {
    require_connected(system);
    std::vector<int> position;
    Eigen::MatrixXd b_matrix = reduced_susceptance(system, position);
    Eigen::VectorXd p(b_matrix.rows());
    for (int bus = 0; bus < system.num_buses(); ++bus) {
        if (position[bus] >= 0) p(position[bus]) = injection[bus];
    }
    Eigen::VectorXd theta = b_matrix.colPivHouseholderQr().solve(p);
    std::vector<double> flows(system.num_lines());
    for (const auto& line : system.lines) {
        const int f = position[line.from_bus];
        const int t = position[line.to_bus];
        const double theta_f = f >= 0 ? theta(f) : 0.0;
        const double theta_t = t >= 0 ? theta(t) : 0.0;
        flows[line.id] = (theta_f - theta_t) / line.reactance;
    }
    return flows;
}

std::string system_to_json(const PowerSystem& system) {
    json doc;
    doc["name"] = system.name;
    doc["slack_bus"] = system.slack_bus;
    doc["buses"] = json::array();
    for (const auto& b : system.buses) doc["buses"].push_back({{"id", b.id}, {"name", b.name}});
    doc["lines"] = json::array();
    for (const auto& l : system.lines) {
        doc["lines"].push_back(
            {{"from", l.from_bus}, {"to", l.to_bus}, {"reactance", l.reactance}, {"rating", l.rating}});
    }
    doc["generators"] = json::array();
    for (const auto& g : system.generators) {
        json blocks = json::array();
        for (const auto& b : g.cost_blocks) blocks.push_back({{"width", b.width}, {"slope", b.slope}});
        doc["generators"].push_back({{"name", g.name},
                                     {"bus", g.bus},
                                     {"p_min", g.p_min},
                                     {"p_max", g.p_max},
                                     {"cost_blocks", blocks},
                                     {"no_load_cost", g.no_load_cost},
                                     {"startup_cost", g.startup_cost},
                                     {"shutdown_cost", g.shutdown_cost},
                                     {"ramp_15", g.ramp_15},
                                     {"ramp_startup", g.ramp_startup},
                                     {"ramp_shutdown", g.ramp_shutdown},
                                     {"min_up", g.min_up},
                                     {"min_down", g.min_down},
                                     {"frp_up_cost", g.frp_up_cost},
                                     {"frp_down_cost", g.frp_down_cost},
                                     {"fast_start", g.fast_start}});
    }
    doc["solar"] = json::array();
    for (const auto& s : system.solar_units) {
        doc["solar"].push_back({{"bus", s.bus}, {"capacity", s.capacity}, {"share", s.share}});
    }
    doc["participation"] = json::array();
    for (int b = 0; b < system.num_buses(); ++b) {
        if (system.load_participation[b] != 0.0) {
            doc["participation"].push_back({{"bus", b}, {"factor", system.load_participation[b]}});
        }
    }
    return doc.dump(2);
}

}  // namespace frp

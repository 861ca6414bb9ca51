#include "frp/da.hpp"

#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "frp/csv.hpp"

namespace frp {

DaModel build_da_model(const PowerSystem& system, const PtdfMatrix* ptdf, const ForecastProfile& profile,
                       const DaOptions& options) {
    if (static_cast<int>(profile.hourly_load.size()) != kHoursPerDay) {
        throw std::invalid_argument("build_da_model: profile needs 24 hourly values");
    }
    DaModel out;
    UcProblem& pb = out.problem;
    pb.system = &system;
    pb.ptdf = ptdf;
    pb.intervals = kHoursPerDay;
    pb.interval_hours = 1.0;
    pb.system_load = profile.hourly_load;
    pb.solar = profile.hourly_solar;
    pb.voll = options.voll;
    pb.tag = "_da";
    if (options.reserve_fraction > 0.0) {
        for (double load : profile.hourly_load) pb.reserve_requirement.push_back(options.reserve_fraction * load);
    }
    out.vars = add_uc_formulation(out.model, pb);
    return out;
}

DaCommitments run_da(const PowerSystem& system, const PtdfMatrix* ptdf, const ForecastProfile& profile,
                     const DaOptions& options) {
    const DaModel da = build_da_model(system, ptdf, profile, options);
    const MilpSolution sol = solve(da.model, options.solve);
    if (sol.values.empty()) {
        throw std::runtime_error("day-ahead solve failed: " + to_string(sol.status) + " (" + sol.diagnostics + ")");
    }
    DaCommitments out;
    const int G = system.num_generators();
    out.u.assign(G, std::vector<int>(kHoursPerDay));
    out.p.assign(G, std::vector<double>(kHoursPerDay));
    for (int g = 0; g < G; ++g) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            out.u[g][h] = sol.values[da.vars.u[g][h]] > 0.5 ? 1 : 0;
            out.p[g][h] = sol.values[da.vars.p[g][h]];
        }
    }
    out.objective = sol.objective;
    return out;
}

void write_da_csv(const DaCommitments& da, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "generator,hour,u,p\n";
    for (std::size_t g = 0; g < da.u.size(); ++g) {
        for (int h = 0; h < da.num_hours(); ++h) {
            out << g << ',' << h << ',' << da.u[g][h] << ',' << exact(da.p[g][h]) << '\n';
        }
    }
    write_text_file(path, out.str());
}

DaCommitments read_da_csv(const std::filesystem::path& path, int num_generators) {
    const CsvTable table = CsvTable::read(path);
    DaCommitments out;
    out.u.assign(num_generators, std::vector<int>(kHoursPerDay, -1));
    out.p.assign(num_generators, std::vector<double>(kHoursPerDay, 0.0));
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const long long g = table.integer(r, "generator");
        const long long h = table.integer(r, "hour");
        if (g < 0 || g >= num_generators || h < 0 || h >= kHoursPerDay) {
            throw DataError(fmt::format("{}: row {}: generator/hour out of range", path.string(), r + 2));
        }
        out.u[g][h] = table.integer(r, "u") != 0 ? 1 : 0;
        out.p[g][h] = table.number(r, "p");
    }
    for (int g = 0; g < num_generators; ++g) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            if (out.u[g][h] < 0) throw DataError(fmt::format("{}: missing generator {} hour {}", path.string(), g, h));
        }
    }
    return out;
}

}  // namespace frp

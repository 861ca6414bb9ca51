#include "frp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "frp/csv.hpp"

namespace frp {

namespace {

double award_cap(const std::vector<FmmAwards>& awards, const std::vector<std::vector<double>> FmmAwards::*field,
                 int hour, int g, int t) {
    if (t > 0) return (awards[hour].*field)[g][t - 1];
    if (hour == 0) return -1.0;
    return (awards[hour - 1].*field)[g][kFmmBinding - 1];
}

}  // namespace

ScenarioResult run_rtuc_validation(const FmmInputs& in, const std::vector<FmmAwards>& awards, const Scenario& realized,
                                   const ValidationOptions& options) {
    if (in.system == nullptr || in.da == nullptr) throw std::invalid_argument("validation needs a system and DA commitments");
    if (static_cast<int>(awards.size()) != kHoursPerDay) {
        throw std::invalid_argument(fmt::format("validation needs awards for 24 hours, got {}", awards.size()));
    }
    const PowerSystem& sys = *in.system;
    const int G = sys.num_generators();
    for (int h = 0; h < kHoursPerDay; ++h) {
        if (static_cast<int>(awards[h].ur.size()) != G || awards[h].hour != h) {
            throw std::invalid_argument(fmt::format("awards for hour {} are missing or malformed", h));
        }
    }

    ScenarioResult res;
    res.scenario_id = realized.id;
    res.interval_cost.assign(kIntervalsPerDay, 0.0);
    res.interval_violation.assign(kIntervalsPerDay, 0.0);
    std::vector<UnitInitialState> state = da_initial_state(*in.da);

    for (int hour = 0; hour < kHoursPerDay; ++hour) {
        const FmmHorizon horizon = hourly_horizon(hour, state);
        const Scenario window = horizon_slice(realized, horizon);
        UcProblem pb;
        pb.system = in.system;
        pb.ptdf = in.ptdf;
        pb.intervals = horizon.length;
        pb.interval_hours = kIntervalHours;
        pb.system_load = window.load;
        pb.solar = window.solar;
        pb.initial = state;
        pb.voll = options.voll;
        pb.tag = "_rt";
        pb.rule.resize(G);
        pb.reference.assign(G, std::vector<int>(horizon.length));
        pb.ramp_up_cap.assign(G, {});
        pb.ramp_down_cap.assign(G, {});
        for (int g = 0; g < G; ++g) {
            const bool fs = sys.generators[g].fast_start;
            pb.rule[g] = fs ? CommitmentRule::at_least : CommitmentRule::fixed;
            for (int t = 0; t < horizon.length; ++t) pb.reference[g][t] = in.da->at_interval(g, horizon.global(t));
            if (fs) continue;
            for (int t = 0; t < horizon.length; ++t) {
                pb.ramp_up_cap[g].push_back(award_cap(awards, &FmmAwards::ur, hour, g, t));
                pb.ramp_down_cap[g].push_back(award_cap(awards, &FmmAwards::dr, hour, g, t));
            }
        }
        MilpModel model;
        const UcVariables vars = add_uc_formulation(model, pb);
        const MilpSolution sol = solve(model, options.solve);
        if (sol.values.empty()) {
            throw std::runtime_error(fmt::format("validation of scenario {} failed in hour {}: {} ({})", realized.id,
                                                 hour, to_string(sol.status), sol.diagnostics));
        }
        const std::vector<double>& x = sol.values;
        if (options.verify) res.worst_check = std::max(res.worst_check, check_solution(model, sol).worst());

        for (int t = 0; t < horizon.length; ++t) {
            for (int g = 0; g < G; ++g) {
                const auto& gen = sys.generators[g];
                if (gen.fast_start) continue;
                double p_prev = 0.0, u_prev = 0.0;
                if (t > 0) {
                    p_prev = x[vars.p[g][t - 1]];
                    u_prev = x[vars.u[g][t - 1]];
                } else if (state[g].on) {
                    p_prev = state[g].power;
                    u_prev = 1.0;
                }
                const double ramp = pb.ramp_per_interval(g);
                const double up = pb.ramp_up_cap[g][t] < 0.0 ? ramp : std::min(pb.ramp_up_cap[g][t], ramp);
                const double down = pb.ramp_down_cap[g][t] < 0.0 ? ramp : std::min(pb.ramp_down_cap[g][t], ramp);
                const double p = x[vars.p[g][t]];
                const double rise = p - p_prev - up * u_prev - gen.ramp_startup * x[vars.v[g][t]];
                const double fall = p_prev - p - down * x[vars.u[g][t]] - gen.ramp_shutdown * x[vars.w[g][t]];
                res.worst_cap_excess = std::max({res.worst_cap_excess, rise, fall});
            }
        }
        for (int t = 0; t < horizon.binding; ++t) {
            const IntervalCost c = interval_cost(pb, vars, x, t);
            const int global = horizon.global(t);
            res.interval_cost[global] = c.operating;
            res.interval_violation[global] = c.violation_mwh;
            res.rt_cost_excl_violation += c.operating;
            res.total_violation += c.violation_mwh;
            for (int g = 0; g < G; ++g) {
                if (sys.generators[g].fast_start && x[vars.u[g][t]] > 0.5) ++res.fs_commitments;
            }
        }
        state = state_after(pb, vars, x, horizon.binding - 1);
    }
    res.total_cost = res.rt_cost_excl_violation + options.voll * res.total_violation;
    return res;
}

PolicyStats policy_stats(const std::vector<ScenarioResult>& results) {
    PolicyStats s;
    if (results.empty()) return s;
    s.max_cost = s.max_violation = s.max_fs = s.max_total = -kInfinity;
    for (const auto& r : results) {
        s.sum_cost += r.rt_cost_excl_violation;
        s.sum_violation += r.total_violation;
        s.sum_fs += r.fs_commitments;
        s.sum_total += r.total_cost;
        s.max_cost = std::max(s.max_cost, r.rt_cost_excl_violation);
        s.max_violation = std::max(s.max_violation, r.total_violation);
        s.max_fs = std::max(s.max_fs, static_cast<double>(r.fs_commitments));
        s.max_total = std::max(s.max_total, r.total_cost);
    }
    const double n = static_cast<double>(results.size());
    s.avg_cost = s.sum_cost / n;
    s.avg_violation = s.sum_violation / n;
    s.avg_fs = s.sum_fs / n;
    s.avg_total = s.sum_total / n;
    return s;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

MetricsReport aggregate_metrics(const std::vector<ScenarioResult>& proxy, const std::vector<ScenarioResult>& dd) {
    if (proxy.empty()) throw std::invalid_argument("aggregate_metrics: no scenarios");
    if (proxy.size() != dd.size()) throw std::invalid_argument("aggregate_metrics: policies have different scenario counts");
    MetricsReport r;
    r.proxy = proxy;
    r.datadriven = dd;
    r.scenarios = static_cast<int>(proxy.size());
    r.proxy_stats = policy_stats(proxy);
    r.datadriven_stats = policy_stats(dd);
    std::size_t intervals = proxy[0].interval_cost.size();
    for (std::size_t i = 0; i < proxy.size(); ++i) {
        if (proxy[i].scenario_id != dd[i].scenario_id) {
            throw std::invalid_argument(fmt::format("aggregate_metrics: scenario {} paired with {}", proxy[i].scenario_id,
                                                    dd[i].scenario_id));
        }
        if (proxy[i].interval_cost.size() != intervals || dd[i].interval_cost.size() != intervals) {
            throw std::invalid_argument("aggregate_metrics: interval series length mismatch");
        }
        r.improved_cost += dd[i].rt_cost_excl_violation < proxy[i].rt_cost_excl_violation ? 1 : 0;
        r.improved_violation += dd[i].total_violation < proxy[i].total_violation ? 1 : 0;
        r.improved_fs += dd[i].fs_commitments < proxy[i].fs_commitments ? 1 : 0;
        r.improved_total += dd[i].total_cost < proxy[i].total_cost ? 1 : 0;
    }
    for (std::size_t t = 0; t < intervals; ++t) {
        std::vector<double> gain;
        for (std::size_t i = 0; i < proxy.size(); ++i) gain.push_back(proxy[i].interval_cost[t] - dd[i].interval_cost[t]);
        r.intervals.push_back({static_cast<int>(t), quantile(gain, 0.25), quantile(gain, 0.5), quantile(gain, 0.75)});
    }
    return r;
}

std::vector<ComparisonRow> compare_policies(const MetricsReport& r) {
    if (r.scenarios == 0) throw std::invalid_argument("compare_policies: empty report");
    std::vector<ComparisonRow> rows;
    auto add = [&](const std::string& table, const std::string& metric, double p, double d) {
        rows.push_back({table, metric, p, d, d - p});
    };
    add("improvements", "rt_cost_excl_violation", 0.0, r.improved_cost);
    add("improvements", "total_violation", 0.0, r.improved_violation);
    add("improvements", "fs_commitments", 0.0, r.improved_fs);
    add("improvements", "total_cost", 0.0, r.improved_total);
    const PolicyStats& p = r.proxy_stats;
    const PolicyStats& d = r.datadriven_stats;
    add("violations", "average_mwh", p.avg_violation, d.avg_violation);
    add("violations", "total_mwh", p.sum_violation, d.sum_violation);
    add("violations", "max_mwh", p.max_violation, d.max_violation);
    add("costs", "fmm_cost", r.fmm_cost_proxy, r.fmm_cost_datadriven);
    add("costs", "average_rt_cost_excl_violation", p.avg_cost, d.avg_cost);
    add("costs", "total_rt_cost_excl_violation", p.sum_cost, d.sum_cost);
    add("costs", "max_rt_cost_excl_violation", p.max_cost, d.max_cost);
    add("costs", "average_total_cost", p.avg_total, d.avg_total);
    add("fs_commitments", "average", p.avg_fs, d.avg_fs);
    add("fs_commitments", "total", p.sum_fs, d.sum_fs);
    add("fs_commitments", "max", p.max_fs, d.max_fs);
    return rows;
}

void emit_tables(const MetricsReport& r, const std::filesystem::path& dir) {
    const std::vector<ComparisonRow> rows = compare_policies(r);
    std::ostringstream improvements;
    improvements << "metric,improved,scenarios\n";
    std::map<std::string, std::ostringstream> tables;
    for (const auto& row : rows) {
        if (row.table == "improvements") {
            improvements << row.metric << ',' << static_cast<int>(row.datadriven) << ',' << r.scenarios << '\n';
            continue;
        }
        auto& out = tables[row.table];
        if (out.tellp() == 0) out << "statistic,proxy,datadriven,difference\n";
        out << row.metric << ',' << exact(row.proxy) << ',' << exact(row.datadriven) << ',' << exact(row.difference)
            << '\n';
    }
    write_text_file(dir / "table_improvements.csv", improvements.str());
    write_text_file(dir / "table_violations.csv", tables["violations"].str());
    write_text_file(dir / "table_costs.csv", tables["costs"].str());
    write_text_file(dir / "table_fs_commitments.csv", tables["fs_commitments"].str());
    std::ostringstream q;
    q << "interval,q1,median,q3\n";
    for (const auto& i : r.intervals) {
        q << i.t << ',' << exact(i.q1) << ',' << exact(i.median) << ',' << exact(i.q3) << '\n';
    }
    write_text_file(dir / "interval_quartiles.csv", q.str());
}

void write_results_csv(const std::vector<ScenarioResult>& results, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "scenario,rt_cost_excl_violation,total_violation_mwh,fs_commitments,total_cost,worst_check,"
           "worst_cap_excess\n";
    for (const auto& r : results) {
        out << r.scenario_id << ',' << exact(r.rt_cost_excl_violation) << ',' << exact(r.total_violation) << ','
            << r.fs_commitments << ',' << exact(r.total_cost) << ',' << exact(r.worst_check) << ','
            << exact(r.worst_cap_excess) << '\n';
    }
    write_text_file(path, out.str());
}

}  // namespace frp

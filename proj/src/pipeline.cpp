#include "frp/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "frp/csv.hpp"

namespace frp {

namespace fs = std::filesystem;
using nlohmann::json;

PolicySelection policy_selection_from_string(const std::string& text) {
    if (text == "proxy") return PolicySelection::proxy;
    if (text == "datadriven") return PolicySelection::datadriven;
    if (text == "both") return PolicySelection::both;
    throw std::invalid_argument("unknown policy '" + text + "' (expected proxy, datadriven or both)");
}

std::string to_string(PolicySelection policy) {
    switch (policy) {
        case PolicySelection::proxy:
            return "proxy";
        case PolicySelection::datadriven:
            return "datadriven";
        case PolicySelection::both:
            return "both";
    }
    return "unknown";
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
    ExperimentConfig c;
    try {
        const json j = json::parse(text);
        c.system_file = resolve(base_dir, j.at("system").get<std::string>());
        c.hourly_profile = resolve(base_dir, j.at("profile_hourly").get<std::string>());
        c.quarter_profile = resolve(base_dir, j.at("profile_quarter").get<std::string>());
        c.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
        read_opt(j, "seed", c.uncertainty.seed);
        c.nn.seed = c.uncertainty.seed;
        read_opt(j, "network", c.network);
        if (j.contains("policy")) c.policy = policy_selection_from_string(j.at("policy").get<std::string>());
        if (j.contains("uncertainty")) {
            const json& u = j.at("uncertainty");
            read_opt(u, "sigma_hourly_frac", c.uncertainty.sigma_hourly_frac);
            read_opt(u, "confidence_z", c.uncertainty.confidence_z);
            read_opt(u, "truncation", c.uncertainty.truncation);
        }
        if (j.contains("counts")) {
            const json& n = j.at("counts");
            read_opt(n, "training", c.training_scenarios);
            read_opt(n, "out_of_sample", c.out_of_sample_scenarios);
            read_opt(n, "deployment", c.deployment_scenarios);
        }
        if (j.contains("nn")) {
            const json& n = j.at("nn");
            read_opt(n, "hidden", c.nn.hidden);
            read_opt(n, "epochs", c.nn.epochs);
            read_opt(n, "learning_rate", c.nn.learning_rate);
            read_opt(n, "batch_size", c.nn.batch_size);
        }
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            read_opt(s, "mip_rel_gap", c.solver.mip_rel_gap);
            read_opt(s, "time_limit", c.solver.time_limit);
        }
        if (j.contains("fmm")) {
            const json& f = j.at("fmm");
            read_opt(f, "zeta_min", c.fmm.zeta_min);
            read_opt(f, "cut_tolerance", c.fmm.cut_tolerance);
            read_opt(f, "max_rounds", c.fmm.max_rounds);
            read_opt(f, "voll", c.fmm.voll);
            read_opt(f, "frp_shortage_penalty", c.fmm.frp_shortage_penalty);
        }
        if (j.contains("da")) read_opt(j.at("da"), "reserve_fraction", c.da.reserve_fraction);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    c.fmm.solve = c.solver;
    c.da.solve = c.solver;
    c.da.voll = c.fmm.voll;
    if (c.training_scenarios < 1 || c.out_of_sample_scenarios < 1) throw DataError("config: counts must be >= 1");
    if (c.deployment_scenarios < 2) throw DataError("config: counts.deployment must be >= 2");
    if (c.uncertainty.confidence_z <= 0.0) throw DataError("config: uncertainty.confidence_z must be > 0");
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    return parse_config(read_file(path), fs::absolute(path).parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["system"] = c.system_file.string();
    j["profile_hourly"] = c.hourly_profile.string();
    j["profile_quarter"] = c.quarter_profile.string();
    j["output_dir"] = c.output_dir.string();
    j["seed"] = c.uncertainty.seed;
    j["policy"] = to_string(c.policy);
    j["network"] = c.network;
    j["uncertainty"] = {{"sigma_hourly_frac", c.uncertainty.sigma_hourly_frac},
                        {"confidence_z", c.uncertainty.confidence_z},
                        {"truncation", c.uncertainty.truncation}};
    j["counts"] = {{"training", c.training_scenarios},
                   {"out_of_sample", c.out_of_sample_scenarios},
                   {"deployment", c.deployment_scenarios}};
    j["nn"] = {{"hidden", c.nn.hidden},
               {"epochs", c.nn.epochs},
               {"learning_rate", c.nn.learning_rate},
               {"batch_size", c.nn.batch_size}};
    j["solver"] = {{"mip_rel_gap", c.solver.mip_rel_gap}, {"time_limit", c.solver.time_limit}};
    j["fmm"] = {{"zeta_min", c.fmm.zeta_min},
                {"cut_tolerance", c.fmm.cut_tolerance},
                {"max_rounds", c.fmm.max_rounds},
                {"voll", c.fmm.voll},
                {"frp_shortage_penalty", c.fmm.frp_shortage_penalty}};
    j["da"] = {{"reserve_fraction", c.da.reserve_fraction}};
    return j.dump(2) + "\n";
}

namespace {

struct Context {
    PowerSystem system;
    PtdfMatrix ptdf;
    ForecastProfile profile;
    bool network = true;

    const PtdfMatrix* ptdf_ptr() const { return network ? &ptdf : nullptr; }
};

Context load_context(const ExperimentConfig& c) {
    Context ctx;
    ctx.system = load_system(c.system_file);
    ctx.ptdf = compute_ptdf(ctx.system);
    ctx.profile = load_profiles(c.hourly_profile, c.quarter_profile, ctx.system);
    ctx.network = c.network;
    return ctx;
}

void note(const ProgressLog& log, const std::string& msg) {
    if (log) log(msg);
}

fs::path awards_path(const ExperimentConfig& c, FmmPolicy p, int hour) {
    return c.output_dir / "fmm" / to_string(p) / fmt::format("awards_hour_{:02}.csv", hour);
}

template <typename F>
void run_stage(const char* name, F&& body) {
    try {
        body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::vector<FmmPolicy> selected(const ExperimentConfig& c) {
    std::vector<FmmPolicy> out;
    for (FmmPolicy p : {FmmPolicy::proxy, FmmPolicy::datadriven}) {
        if (c.wants(p)) out.push_back(p);
    }
    return out;
}

}  // namespace

void stage_prepare(const ExperimentConfig& c, const ProgressLog& log) {
    run_stage("prepare", [&] {
        const Context ctx = load_context(c);
        const auto problems = validate_system(ctx.system);
        if (!problems.empty()) throw DataError("system data: " + problems.front());
        write_text_file(c.output_dir / "config_snapshot.json", config_to_json(c));
        note(log, fmt::format("system {}: {} buses, {} lines, {} generators, {} solar units", ctx.system.name,
                              ctx.system.num_buses(), ctx.system.num_lines(), ctx.system.num_generators(),
                              ctx.system.num_solar()));
        const DaCommitments da = run_da(ctx.system, ctx.ptdf_ptr(), ctx.profile, c.da);
        write_da_csv(da, c.output_dir / "da_commitments.csv");
        note(log, fmt::format("day-ahead objective {:.2f}", da.objective));
        write_scenarios_csv(sample_scenarios(ctx.profile, ctx.system, c.uncertainty, c.out_of_sample_scenarios,
                                             ScenarioKind::out_of_sample),
                            c.output_dir / "scenarios_out_of_sample.csv");
        write_scenarios_csv(select_deployment_scenarios(ctx.profile, ctx.system, c.uncertainty, c.deployment_scenarios),
                            c.output_dir / "scenarios_deployment.csv");
    });
}

void stage_train(const ExperimentConfig& c, const ProgressLog& log) {
    if (!c.wants(FmmPolicy::datadriven)) {
        note(log, "train: proxy-only run, nothing to do");
        return;
    }
    run_stage("train", [&] {
        const Context ctx = load_context(c);
        const DaCommitments da = read_da_csv(c.output_dir / "da_commitments.csv", ctx.system.num_generators());
        const fs::path dir = c.output_dir / "learner";
        const ScenarioSet training =
            sample_scenarios(ctx.profile, ctx.system, c.uncertainty, c.training_scenarios, ScenarioKind::training);
        write_scenarios_csv(training, dir / "scenarios_training.csv");
        const FmmInputs in{&ctx.system, ctx.ptdf_ptr(), &da};
        const FmmOptions& opts = c.fmm;
        std::vector<FmmDayResult> results;
        double worst_check = 0.0;
        results.reserve(training.scenarios.size());
        for (int i = 0; i < training.size(); ++i) {
            FmmDayData data;
            data.day = &training.scenarios[i];
            results.push_back(run_fmm_day(in, FmmPolicy::training, data, opts));
            worst_check = std::max(worst_check, results.back().worst_check);
            if ((i + 1) % std::max(1, training.size() / 10) == 0) {
                note(log, fmt::format("training FMM days solved: {}/{}", i + 1, training.size()));
            }
        }
        write_text_file(dir / "training_check.csv",
                        fmt::format("days,worst_check\n{},{}\n", training.size(), exact(worst_check)));
        std::vector<TrainingDay> days;
        for (int i = 0; i < training.size(); ++i) days.push_back({&training.scenarios[i], &results[i]});
        const TrainingDataset data = build_targets(ctx.system, days, 0.25, c.uncertainty.seed);
        for (const auto& w : data.warnings) note(log, "warning: " + w);
        write_dataset_csv(data, dir / "dataset.csv");
        const ResponseModels models = train_response_models(ctx.system, data, c.nn);
        save_models(models, dir / "models");
        std::ostringstream rep;
        rep << "generator,train_rows,test_rows,train_mse,test_mse\n";
        for (std::size_t g = 0; g < models.models.size(); ++g) {
            if (!models.models[g]) continue;
            const FitReport& r = models.reports[g];
            rep << g << ',' << r.train_rows << ',' << r.test_rows << ',' << exact(r.train_mse) << ','
                << exact(r.test_mse) << '\n';
            note(log, fmt::format("model g{}: train mse {:.5f}, test mse {:.5f}", g, r.train_mse, r.test_mse));
        }
        write_text_file(dir / "fit_report.csv", rep.str());
        const ScenarioSet deployment = read_scenarios_csv(c.output_dir / "scenarios_deployment.csv", c.uncertainty);
        const RampResponseFactors factors =
            predict_factors(ctx.system, models, deployment, forecast_scenario(ctx.profile, ScenarioKind::deployment));
        write_factors_csv(factors, dir / "factors.csv");
    });
}

void stage_clear(const ExperimentConfig& c, const ProgressLog& log) {
    run_stage("clear", [&] {
        const Context ctx = load_context(c);
        const DaCommitments da = read_da_csv(c.output_dir / "da_commitments.csv", ctx.system.num_generators());
        const FmmInputs in{&ctx.system, ctx.ptdf_ptr(), &da};
        const Scenario forecast = forecast_scenario(ctx.profile, ScenarioKind::deployment);
        const ProxyEnvelope envelope = proxy_envelopes(ctx.profile, ctx.system, c.uncertainty);
        for (FmmPolicy policy : selected(c)) {
            FmmDayData data;
            data.day = &forecast;
            data.envelope = &envelope;
            ScenarioSet deployment;
            RampResponseFactors factors;
            if (policy == FmmPolicy::datadriven) {
                deployment = read_scenarios_csv(c.output_dir / "scenarios_deployment.csv", c.uncertainty);
                factors = read_factors_csv(c.output_dir / "learner" / "factors.csv", ctx.system.num_generators(),
                                           kIntervalsPerDay, deployment.size());
                data.deployment = &deployment;
                data.factors = &factors;
            }
            const FmmDayResult day = run_fmm_day(in, policy, data, c.fmm);
            std::ostringstream summary;
            summary << "hour,objective,binding_cost,violation_mwh,rounds,cuts,converged,worst_check\n";
            for (const auto& h : day.hours) {
                write_awards_csv(h.awards, awards_path(c, policy, h.awards.hour));
                summary << h.awards.hour << ',' << exact(h.objective) << ',' << exact(h.binding_cost) << ','
                        << exact(h.violation_mwh) << ',' << h.rounds << ',' << h.cuts.size() << ','
                        << (h.converged ? 1 : 0) << ',' << exact(h.worst_check) << '\n';
            }
            write_text_file(c.output_dir / "fmm" / to_string(policy) / "summary.csv", summary.str());
            if (policy == FmmPolicy::datadriven) write_cuts_csv(day, c.output_dir / "fmm" / "datadriven" / "cuts.csv");
            note(log, fmt::format("{} FMM day: binding cost {:.2f}", to_string(policy), day.total_binding_cost));
            if (!day.converged) throw std::runtime_error(to_string(policy) + " cut loop did not converge");
        }
    });
}

void stage_validate(const ExperimentConfig& c, const ProgressLog& log) {
    run_stage("validate", [&] {
        const Context ctx = load_context(c);
        const int G = ctx.system.num_generators();
        const DaCommitments da = read_da_csv(c.output_dir / "da_commitments.csv", G);
        const FmmInputs in{&ctx.system, ctx.ptdf_ptr(), &da};
        const ScenarioSet oos = read_scenarios_csv(c.output_dir / "scenarios_out_of_sample.csv", c.uncertainty);
        ValidationOptions vo;
        vo.voll = c.fmm.voll;
        vo.solve = c.solver;
        for (FmmPolicy policy : selected(c)) {
            std::vector<FmmAwards> awards;
            for (int h = 0; h < kHoursPerDay; ++h) awards.push_back(read_awards_csv(awards_path(c, policy, h), h, G));
            std::vector<ScenarioResult> results;
            std::ostringstream intervals;
            intervals << "scenario,t,cost_excl_violation,violation_mwh\n";
            for (const Scenario& s : oos.scenarios) {
                results.push_back(run_rtuc_validation(in, awards, s, vo));
                const auto& r = results.back();
                for (int t = 0; t < kIntervalsPerDay; ++t) {
                    intervals << s.id << ',' << t << ',' << exact(r.interval_cost[t]) << ','
                              << exact(r.interval_violation[t]) << '\n';
                }
            }
            write_results_csv(results, c.output_dir / "validation" / (to_string(policy) + "_results.csv"));
            write_text_file(c.output_dir / "validation" / (to_string(policy) + "_intervals.csv"), intervals.str());
            const PolicyStats st = policy_stats(results);
            note(log, fmt::format("{} validation: avg violation {:.3f} MWh, avg RT cost {:.2f}", to_string(policy),
                                  st.avg_violation, st.avg_cost));
        }
    });
}

namespace {

std::vector<ScenarioResult> read_results(const fs::path& dir, FmmPolicy policy) {
    const CsvTable table = CsvTable::read(dir / (to_string(policy) + "_results.csv"));
    std::vector<ScenarioResult> out;
    std::map<int, std::size_t> index;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        ScenarioResult s;
        s.scenario_id = static_cast<int>(table.integer(r, "scenario"));
        s.rt_cost_excl_violation = table.number(r, "rt_cost_excl_violation");
        s.total_violation = table.number(r, "total_violation_mwh");
        s.fs_commitments = static_cast<int>(table.integer(r, "fs_commitments"));
        s.total_cost = table.number(r, "total_cost");
        s.worst_check = table.number(r, "worst_check");
        s.worst_cap_excess = table.number(r, "worst_cap_excess");
        s.interval_cost.assign(kIntervalsPerDay, 0.0);
        s.interval_violation.assign(kIntervalsPerDay, 0.0);
        index[s.scenario_id] = out.size();
        out.push_back(std::move(s));
    }
    const CsvTable iv = CsvTable::read(dir / (to_string(policy) + "_intervals.csv"));
    for (std::size_t r = 0; r < iv.rows(); ++r) {
        const auto it = index.find(static_cast<int>(iv.integer(r, "scenario")));
        const long long t = iv.integer(r, "t");
        if (it == index.end() || t < 0 || t >= kIntervalsPerDay) throw DataError("interval results do not match");
        out[it->second].interval_cost[t] = iv.number(r, "cost_excl_violation");
        out[it->second].interval_violation[t] = iv.number(r, "violation_mwh");
    }
    return out;
}

double fmm_cost(const ExperimentConfig& c, FmmPolicy policy) {
    const CsvTable t = CsvTable::read(c.output_dir / "fmm" / to_string(policy) / "summary.csv");
    double total = 0.0;
    for (std::size_t r = 0; r < t.rows(); ++r) total += t.number(r, "binding_cost");
    return total;
}

json stats_json(const PolicyStats& s) {
    return {{"avg_rt_cost_excl_violation", s.avg_cost}, {"sum_rt_cost_excl_violation", s.sum_cost},
            {"max_rt_cost_excl_violation", s.max_cost}, {"avg_violation_mwh", s.avg_violation},
            {"sum_violation_mwh", s.sum_violation},     {"max_violation_mwh", s.max_violation},
            {"avg_fs_commitments", s.avg_fs},            {"sum_fs_commitments", s.sum_fs},
            {"max_fs_commitments", s.max_fs},            {"avg_total_cost", s.avg_total}};
}

}  // namespace

void stage_report(const ExperimentConfig& c, const ProgressLog& log) {
    run_stage("report", [&] {
        const fs::path vdir = c.output_dir / "validation";
        json report;
        report["policy"] = to_string(c.policy);
        for (FmmPolicy p : selected(c)) {
            const auto results = read_results(vdir, p);
            report[to_string(p)] = stats_json(policy_stats(results));
            report[to_string(p)]["fmm_cost"] = fmm_cost(c, p);
            report[to_string(p)]["scenarios"] = results.size();
        }
        if (c.policy == PolicySelection::both) {
            MetricsReport m = aggregate_metrics(read_results(vdir, FmmPolicy::proxy),
                                                read_results(vdir, FmmPolicy::datadriven));
            m.fmm_cost_proxy = fmm_cost(c, FmmPolicy::proxy);
            m.fmm_cost_datadriven = fmm_cost(c, FmmPolicy::datadriven);
            emit_tables(m, c.output_dir);
            report["improvements"] = {{"rt_cost_excl_violation", m.improved_cost},
                                      {"total_violation", m.improved_violation},
                                      {"fs_commitments", m.improved_fs},
                                      {"total_cost", m.improved_total},
                                      {"scenarios", m.scenarios}};
            note(log, fmt::format("data-driven improves RT cost in {}/{} scenarios, violation in {}/{}",
                                  m.improved_cost, m.scenarios, m.improved_violation, m.scenarios));
        }
        write_text_file(c.output_dir / "report.json", report.dump(2) + "\n");
    });
}

void run_pipeline(const ExperimentConfig& c, const ProgressLog& log) {
    stage_prepare(c, log);
    stage_train(c, log);
    stage_clear(c, log);
    stage_validate(c, log);
    stage_report(c, log);
}

RampResponseFactors read_factors_csv(const fs::path& path, int num_generators, int intervals, int scenarios) {
    const CsvTable t = CsvTable::read(path);
    RampResponseFactors f;
    f.zeta.assign(num_generators,
                  std::vector<std::vector<double>>(intervals, std::vector<double>(scenarios, 0.0)));
    f.has_model.assign(num_generators, false);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const long long g = t.integer(r, "g");
        const long long i = t.integer(r, "t");
        const long long s = t.integer(r, "s");
        if (g < 0 || g >= num_generators || i < 0 || i >= intervals || s < 0 || s >= scenarios) {
            throw DataError(fmt::format("{}: row {}: index out of range", path.string(), r + 2));
        }
        const double z = t.number(r, "zeta");
        if (z < -1.0 || z > 1.0) throw DataError(fmt::format("{}: row {}: zeta outside [-1, 1]", path.string(), r + 2));
        f.zeta[g][i][s] = z;
        f.has_model[g] = true;
    }
    return f;
}

}  // namespace frp

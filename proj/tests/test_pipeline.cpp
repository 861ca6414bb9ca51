#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "frp/pipeline.hpp"
#include "support.hpp"

using namespace frp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json small_config_json(const fs::path& out, const std::string& policy) {
    const fs::path toy = test::data_dir() / "toy5";
    nlohmann::json j;
    j["system"] = (toy / "system.json").string();
    j["profile_hourly"] = (toy / "profile_hourly.csv").string();
    j["profile_quarter"] = (toy / "profile_15min.csv").string();
    j["output_dir"] = out.string();
    j["seed"] = 3;
    j["policy"] = policy;
    j["counts"] = {{"training", 6}, {"out_of_sample", 3}, {"deployment", 2}};
    j["nn"] = {{"hidden", {8}}, {"epochs", 2}};
    return j;
}

ExperimentConfig small_config(const fs::path& out, const std::string& policy = "both") {
    return parse_config(small_config_json(out, policy).dump(), out);
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
    const fs::path path = dir / "config.json";
    std::ofstream(path) << j.dump(2);
    return path;
}

int run_cli(const std::string& args) {
    const std::string cmd = fmt::format("\"{}\" {} >/dev/null 2>&1", FRPSIM_PATH, args);
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const fs::path base = "/tmp/base";
    const ExperimentConfig c = parse_config(
        R"({"system": "s.json", "profile_hourly": "h.csv", "profile_quarter": "/abs/q.csv"})", base);
    CHECK(c.system_file == base / "s.json");
    CHECK(c.quarter_profile == fs::path("/abs/q.csv"));
    CHECK(c.training_scenarios == 5000);
    CHECK(c.out_of_sample_scenarios == 500);
    CHECK(c.deployment_scenarios == 2);
    CHECK(c.nn.hidden == std::vector<int>{100, 100, 25});
    CHECK(c.policy == PolicySelection::both);
    CHECK(c.fmm.voll == kDefaultVoll);

    const ExperimentConfig back = parse_config(config_to_json(c), base);
    CHECK(back.system_file == c.system_file);
    CHECK(back.training_scenarios == c.training_scenarios);
    CHECK(back.uncertainty.sigma_hourly_frac == c.uncertainty.sigma_hourly_frac);

    CHECK_THROWS_AS(parse_config(R"({"profile_hourly": "h", "profile_quarter": "q"})", base), DataError);
    CHECK_THROWS_AS(parse_config(R"({"system": "s", "profile_hourly": "h", "profile_quarter": "q",
                                     "counts": {"deployment": 1}})",
                                 base),
                    DataError);
    CHECK_THROWS(parse_config(R"({"system": "s", "profile_hourly": "h", "profile_quarter": "q", "policy": "x"})",
                              base));
    CHECK(policy_selection_from_string("datadriven") == PolicySelection::datadriven);
}

TEST_CASE("bundled configs parse") {
    for (const char* name : {"toy5", "ieee118"}) {
        const ExperimentConfig c = load_config(test::data_dir() / name / "config.json");
        CHECK(fs::exists(c.system_file));
        CHECK(fs::exists(c.hourly_profile));
        CHECK(fs::exists(c.quarter_profile));
    }
}

TEST_CASE("proxy-only run skips the learner") {
    const fs::path out = test::scratch_dir("pipeline_proxy");
    run_pipeline(small_config(out, "proxy"));
    CHECK(fs::exists(out / "da_commitments.csv"));
    CHECK(fs::exists(out / "fmm" / "proxy" / "awards_hour_23.csv"));
    CHECK_FALSE(fs::exists(out / "learner"));
    CHECK_FALSE(fs::exists(out / "fmm" / "datadriven"));
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report.contains("proxy"));
    CHECK_FALSE(report.contains("improvements"));
}

TEST_CASE("small end-to-end run is complete and reproducible") {
    const fs::path a = test::scratch_dir("pipeline_a");
    const fs::path b = test::scratch_dir("pipeline_b");
    run_pipeline(small_config(a));
    run_pipeline(small_config(b));

    for (const char* file : {"learner/factors.csv", "learner/fit_report.csv", "learner/training_check.csv",
                             "fmm/datadriven/summary.csv", "fmm/datadriven/cuts.csv", "table_improvements.csv",
                             "table_costs.csv", "interval_quartiles.csv", "report.json"}) {
        CAPTURE(file);
        CHECK(fs::exists(a / file));
    }
    const auto report = nlohmann::json::parse(slurp(a / "report.json"));
    CHECK(report["improvements"]["scenarios"] == 3);
    CHECK(report["datadriven"]["scenarios"] == 3);

    for (const char* file : {"validation/proxy_results.csv", "validation/datadriven_results.csv",
                             "learner/factors.csv", "fmm/proxy/summary.csv"}) {
        CAPTURE(file);
        CHECK(slurp(a / file) == slurp(b / file));
    }

    SUBCASE("a different seed draws different scenarios") {
        const fs::path c = test::scratch_dir("pipeline_c");
        ExperimentConfig cfg = small_config(c);
        cfg.uncertainty.seed = 99;
        stage_prepare(cfg);
        CHECK(slurp(c / "scenarios_out_of_sample.csv") != slurp(a / "scenarios_out_of_sample.csv"));
    }
}

TEST_CASE("stage failures name the stage") {
    const fs::path out = test::scratch_dir("pipeline_fail");
    const ExperimentConfig c = small_config(out);
    try {
        stage_clear(c);
        FAIL("expected a StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "clear");
    }
    ExperimentConfig bad = c;
    bad.system_file = out / "missing.json";
    CHECK_THROWS_AS(stage_prepare(bad), StageError);
}

TEST_CASE("command-line exit codes") {
    const fs::path out = test::scratch_dir("pipeline_cli");
    const fs::path config = write_config(out, small_config_json(out / "run", "proxy"));
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") != 0);
    CHECK(run_cli("prepare --config " + (out / "nope.json").string()) != 0);
    CHECK(run_cli("prepare --config " + config.string() + " --policy sideways") != 0);
    // Clearing before preparing fails in the clear stage.
    CHECK(run_cli("clear --config " + config.string()) == 4);
    CHECK(run_cli("prepare --quiet --config " + config.string() + " --seed 5") == 0);
    CHECK(fs::exists(out / "run" / "da_commitments.csv"));
    CHECK(run_cli("prepare --config " + config.string() + " --out " + (out / "other").string()) == 0);
    CHECK(fs::exists(out / "other" / "scenarios_deployment.csv"));

    nlohmann::json broken = small_config_json(out / "broken", "proxy");
    broken["system"] = (out / "missing.json").string();
    const fs::path broken_dir = out / "b";
    fs::create_directories(broken_dir);
    CHECK(run_cli("prepare --config " + write_config(broken_dir, broken).string()) == 2);
}

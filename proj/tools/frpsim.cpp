// frpsim: command-line driver for the FRP market simulation pipeline.

#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "frp/pipeline.hpp"

namespace {

int exit_code(const std::string& stage) {
    static const std::map<std::string, int> codes{
        {"prepare", 2}, {"train", 3}, {"clear", 4}, {"validate", 5}, {"report", 6}};
    const auto it = codes.find(stage);
    return it == codes.end() ? 1 : it->second;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fifteen-minute market FRP simulation: proxy vs data-driven designs"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string policy;
    std::string out_dir;
    bool quiet = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"prepare", "load data, solve the day-ahead market, draw scenarios"},
        {"train", "solve training FMMs and fit the response models"},
        {"clear", "clear the 24 hourly FMMs under each selected policy"},
        {"validate", "run the out-of-sample rolling RTUC validation"},
        {"report", "aggregate validation results into comparison tables"},
        {"all", "run every stage in order"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "base seed for scenarios and training");
        sub->add_option("--policy", policy, "proxy, datadriven or both")
            ->check(CLI::IsMember({"proxy", "datadriven", "both"}));
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("-q,--quiet", quiet, "suppress progress messages");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    frp::ExperimentConfig config;
    try {
        config = frp::load_config(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }
    if (seed) {
        config.uncertainty.seed = *seed;
        config.nn.seed = *seed;
    }
    if (!policy.empty()) config.policy = frp::policy_selection_from_string(policy);
    if (!out_dir.empty()) config.output_dir = out_dir;

    const auto started = std::chrono::steady_clock::now();
    const frp::ProgressLog log = [&](const std::string& msg) {
        if (quiet) return;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::fprintf(stderr, "[%8.1fs] %s\n", secs, msg.c_str());
    };

    try {
        if (command == "prepare") frp::stage_prepare(config, log);
        if (command == "train") frp::stage_train(config, log);
        if (command == "clear") frp::stage_clear(config, log);
        if (command == "validate") frp::stage_validate(config, log);
        if (command == "report") frp::stage_report(config, log);
        if (command == "all") frp::run_pipeline(config, log);
    } catch (const frp::StageError& e) {
        std::fprintf(stderr, "error in stage %s\n", e.what());
        return exit_code(e.stage());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    log(fmt::format("{} finished, outputs in {}", command, config.output_dir.string()));
    return 0;
}

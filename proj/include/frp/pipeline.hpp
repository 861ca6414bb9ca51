#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>

#include "frp/da.hpp"
#include "frp/fmm.hpp"
#include "frp/learner.hpp"
#include "frp/scenario.hpp"
#include "frp/validation.hpp"

namespace frp {

enum class PolicySelection { proxy, datadriven, both };
PolicySelection policy_selection_from_string(const std::string& text);
std::string to_string(PolicySelection policy);

/// Every knob of one experiment. Relative paths resolve against the directory
/// of the config file.
struct ExperimentConfig {
    std::filesystem::path system_file;
    std::filesystem::path hourly_profile;
    std::filesystem::path quarter_profile;
    std::filesystem::path output_dir;
    UncertaintyConfig uncertainty;
    int training_scenarios = 5000;
    int out_of_sample_scenarios = 500;
    int deployment_scenarios = 2;
    MlpConfig nn;
    SolveOptions solver;
    FmmOptions fmm;
    DaOptions da;
    PolicySelection policy = PolicySelection::both;
    bool network = true;  // false drops every transmission limit

    bool wants(FmmPolicy p) const {
        return policy == PolicySelection::both ||
               (policy == PolicySelection::proxy ? p == FmmPolicy::proxy : p == FmmPolicy::datadriven);
    }
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
std::string config_to_json(const ExperimentConfig& config);

/// Failure of one pipeline stage; the CLI maps stages to exit codes.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

using ProgressLog = std::function<void(const std::string&)>;

/// Stages read their inputs from the output directory and write their
/// artifacts there, so each can be rerun on its own.
void stage_prepare(const ExperimentConfig& config, const ProgressLog& log = {});
void stage_train(const ExperimentConfig& config, const ProgressLog& log = {});
void stage_clear(const ExperimentConfig& config, const ProgressLog& log = {});
void stage_validate(const ExperimentConfig& config, const ProgressLog& log = {});
void stage_report(const ExperimentConfig& config, const ProgressLog& log = {});
void run_pipeline(const ExperimentConfig& config, const ProgressLog& log = {});

RampResponseFactors read_factors_csv(const std::filesystem::path& path, int num_generators, int intervals,
                                     int scenarios);

}  // namespace frp

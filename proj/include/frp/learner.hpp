#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frp/fmm.hpp"
#include "frp/scenario.hpp"

namespace frp {

inline constexpr int kFeatureWindow = 3;  // intervals on each side of t

/// 7 x (4 + 2|I|): per window position netload, load, their changes, then each
/// solar unit's output followed by each unit's change.
int feature_dimension(int num_solar);

/// Window t-3 .. t+3 of the scenario, edge-replicated at the ends of the day.
/// Changes are first differences and zero at the first interval.
std::vector<double> extract_features(const Scenario& scenario, int t);

/// Features of a deployment event at t: the forecast up to t followed by the
/// deployment scenario from t+1 on, so the netload change into t+1 is the
/// event's change.
std::vector<double> extract_deployment_features(const Scenario& forecast, const Scenario& deployment, int t);

/// Training data shared by all generators: features once per (scenario, t)
/// and one target per (generator, scenario, t) where the unit stays online.
struct TrainingDataset {
    int dimension = 0;
    std::vector<float> features;   // row-major, one row per sample
    std::vector<int> sample_scenario, sample_t;
    struct Row {
        int generator = 0;
        int sample = 0;
        double target = 0.0;
        bool test = false;
    };
    std::vector<Row> rows;
    std::vector<std::string> warnings;

    int num_samples() const { return static_cast<int>(sample_t.size()); }
    const float* sample(int i) const { return features.data() + static_cast<std::size_t>(i) * dimension; }
};

/// ζ = clamp(Δp / R15, -1, 1) of each must-run unit online at t and t+1, for
/// every interval of every training day. Scenarios are split 75/25 into
/// train/test by a seeded shuffle.
struct TrainingDay {
    const Scenario* scenario = nullptr;
    const FmmDayResult* result = nullptr;
};

TrainingDataset build_targets(const PowerSystem& system, const std::vector<TrainingDay>& days,
                              double test_fraction = 0.25, std::uint64_t split_seed = 11);

void write_dataset_csv(const TrainingDataset& data, const std::filesystem::path& path);

struct MlpConfig {
    std::vector<int> hidden{100, 100, 25};
    int epochs = 30;
    double learning_rate = 1e-3;
    int batch_size = 64;
    std::uint64_t seed = 7;
};

/// Fully connected regressor with tanh hidden layers and a linear output.
/// Inputs are standardized with statistics frozen at fit time.
class Mlp {
public:
    Mlp() = default;
    Mlp(int inputs, const std::vector<int>& hidden, std::uint64_t seed);

    int inputs() const { return weights_.empty() ? 0 : static_cast<int>(weights_.front().cols()); }
    const std::vector<int>& layer_sizes() const { return sizes_; }

    /// Raw (unstandardized) features, one column per sample.
    Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
    double predict_one(const std::vector<double>& features) const;

    /// Loss and gradients on standardized inputs.
    double loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const;
    double loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<Eigen::MatrixXd>& grad_w,
                             std::vector<Eigen::VectorXd>& grad_b) const;

    Eigen::MatrixXd standardize(const Eigen::MatrixXd& features) const;
    void set_normalization(Eigen::VectorXd mean, Eigen::VectorXd scale);

    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    std::string to_json() const;
    static Mlp from_json(const std::string& text);

private:
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, std::vector<Eigen::MatrixXd>* activations) const;

    std::vector<int> sizes_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
    Eigen::VectorXd mean_, scale_;
};

struct FitReport {
    std::vector<double> epoch_train_mse;
    double train_mse = 0.0;
    double test_mse = 0.0;
    int train_rows = 0;
    int test_rows = 0;
};

/// Sets normalization from the training features, then runs minibatch Adam on
/// the mean squared error. Throws std::runtime_error if the loss turns
/// non-finite.
FitReport fit(Mlp& model, const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
              const Eigen::MatrixXd& test_x, const Eigen::VectorXd& test_y, const MlpConfig& config);

/// Max relative difference between backprop and central finite differences
/// over every weight and bias.
double gradient_check(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double eps = 1e-5);

/// One optional model per generator; fast-start units and units with too few
/// rows have none.
struct ResponseModels {
    std::vector<std::optional<Mlp>> models;
    std::vector<FitReport> reports;
};

inline constexpr int kMinRowsPerGenerator = 100;

ResponseModels train_response_models(const PowerSystem& system, const TrainingDataset& data, const MlpConfig& config);

void save_models(const ResponseModels& models, const std::filesystem::path& dir);
ResponseModels load_models(const std::filesystem::path& dir, int num_generators);

/// ζ for every generator, interval of the day and deployment scenario.
RampResponseFactors predict_factors(const PowerSystem& system, const ResponseModels& models,
                                    const ScenarioSet& deployment, const Scenario& forecast);

void write_factors_csv(const RampResponseFactors& factors, const std::filesystem::path& path);

}  // namespace frp

#include "frp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "frp/csv.hpp"

namespace frp {

int feature_dimension(int num_solar) { return (2 * kFeatureWindow + 1) * (4 + 2 * num_solar); }

std::vector<double> extract_features(const Scenario& sc, int t) {
    const int n = sc.num_intervals();
    if (n < 1) throw std::invalid_argument("extract_features: empty scenario");
    const int units = sc.solar.empty() ? 0 : static_cast<int>(sc.solar[0].size());
    std::vector<double> f;
    f.reserve(feature_dimension(units));
    for (int o = -kFeatureWindow; o <= kFeatureWindow; ++o) {
        const int tau = std::clamp(t + o, 0, n - 1);
        const int prev = std::max(tau - 1, 0);
        f.push_back(sc.netload(tau));
        f.push_back(sc.load[tau]);
        f.push_back(tau > 0 ? sc.netload(tau) - sc.netload(prev) : 0.0);
        f.push_back(tau > 0 ? sc.load[tau] - sc.load[prev] : 0.0);
        for (int i = 0; i < units; ++i) f.push_back(sc.solar[tau][i]);
        for (int i = 0; i < units; ++i) f.push_back(tau > 0 ? sc.solar[tau][i] - sc.solar[prev][i] : 0.0);
    }
    return f;
}

std::vector<double> extract_deployment_features(const Scenario& forecast, const Scenario& deployment, int t) {
    if (forecast.num_intervals() != deployment.num_intervals()) {
        throw std::invalid_argument("extract_deployment_features: length mismatch");
    }
    Scenario mixed = forecast;
    for (int tau = t + 1; tau < mixed.num_intervals(); ++tau) {
        mixed.load[tau] = deployment.load[tau];
        mixed.solar[tau] = deployment.solar[tau];
    }
    return extract_features(mixed, t);
}

TrainingDataset build_targets(const PowerSystem& system, const std::vector<TrainingDay>& days, double test_fraction,
                              std::uint64_t split_seed) {
    TrainingDataset data;
    data.dimension = feature_dimension(system.num_solar());
    const int G = system.num_generators();
    std::vector<int> order(days.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(split_seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(days.size())));
    std::vector<bool> is_test(days.size(), false);
    for (std::size_t i = order.size() - n_test; i < order.size(); ++i) is_test[order[i]] = true;

    for (int g = 0; g < G; ++g) {
        const auto& gen = system.generators[g];
        if (!gen.fast_start && gen.ramp_15 <= 0.0) {
            data.warnings.push_back(fmt::format("generator {} has zero 15-min ramp; excluded from training", gen.name));
        }
    }
    for (std::size_t d = 0; d < days.size(); ++d) {
        const Scenario& sc = *days[d].scenario;
        const FmmDayResult& day = *days[d].result;
        for (const FmmHourResult& hour : day.hours) {
            const FmmAwards& a = hour.awards;
            for (int l = 0; l < kFmmBinding; ++l) {
                const int t = a.hour * kIntervalsPerHour + l;
                if (t >= sc.num_intervals()) continue;
                const int sample = data.num_samples();
                const std::vector<double> f = extract_features(sc, t);
                data.features.insert(data.features.end(), f.begin(), f.end());
                data.sample_scenario.push_back(sc.id);
                data.sample_t.push_back(t);
                for (int g = 0; g < G; ++g) {
                    const auto& gen = system.generators[g];
                    if (gen.fast_start || gen.ramp_15 <= 0.0) continue;
                    if (a.u[g][l] != 1 || a.u[g][l + 1] != 1) continue;
                    const double z = std::clamp((a.p[g][l + 1] - a.p[g][l]) / gen.ramp_15, -1.0, 1.0);
                    data.rows.push_back({g, sample, z, is_test[d]});
                }
            }
        }
    }
    return data;
}

void write_dataset_csv(const TrainingDataset& data, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "generator,scenario,t,target,split\n";
    for (const auto& r : data.rows) {
        out << r.generator << ',' << data.sample_scenario[r.sample] << ',' << data.sample_t[r.sample] << ','
            << exact(r.target) << ',' << (r.test ? "test" : "train") << '\n';
    }
    write_text_file(path, out.str());
}

Mlp::Mlp(int inputs, const std::vector<int>& hidden, std::uint64_t seed) {
    sizes_.push_back(inputs);
    sizes_.insert(sizes_.end(), hidden.begin(), hidden.end());
    sizes_.push_back(1);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 1; l < sizes_.size(); ++l) {
        const double limit = std::sqrt(6.0 / (sizes_[l - 1] + sizes_[l]));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Eigen::MatrixXd w(sizes_[l], sizes_[l - 1]);
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
        }
        weights_.push_back(std::move(w));
        biases_.push_back(Eigen::VectorXd::Zero(sizes_[l]));
    }
    mean_ = Eigen::VectorXd::Zero(inputs);
    scale_ = Eigen::VectorXd::Ones(inputs);
}

void Mlp::set_normalization(Eigen::VectorXd mean, Eigen::VectorXd scale) {
    mean_ = std::move(mean);
    scale_ = std::move(scale);
}

Eigen::MatrixXd Mlp::standardize(const Eigen::MatrixXd& features) const {
    return (features.colwise() - mean_).array().colwise() / scale_.array();
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, std::vector<Eigen::MatrixXd>* activations) const {
    Eigen::MatrixXd a = x;
    const std::size_t L = weights_.size();
    for (std::size_t l = 0; l < L; ++l) {
        if (activations != nullptr) activations->push_back(a);
        Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
        a = l + 1 < L ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return a;
}

Eigen::VectorXd Mlp::predict(const Eigen::MatrixXd& features) const {
    return forward(standardize(features), nullptr).row(0).transpose();
}

double Mlp::predict_one(const std::vector<double>& features) const {
    const Eigen::Map<const Eigen::VectorXd> col(features.data(), static_cast<Eigen::Index>(features.size()));
    return predict(Eigen::MatrixXd(col))(0);
}

double Mlp::loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) const {
    const Eigen::VectorXd out = forward(x, nullptr).row(0).transpose();
    return (out - y).squaredNorm() / static_cast<double>(y.size());
}

double Mlp::loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<Eigen::MatrixXd>& grad_w,
                              std::vector<Eigen::VectorXd>& grad_b) const {
    std::vector<Eigen::MatrixXd> acts;
    const Eigen::MatrixXd out = forward(x, &acts);
    const double n = static_cast<double>(y.size());
    const Eigen::RowVectorXd err = out.row(0) - y.transpose();
    Eigen::MatrixXd delta = 2.0 / n * err;
    const std::size_t L = weights_.size();
    grad_w.resize(L);
    grad_b.resize(L);
    for (std::size_t l = L; l-- > 0;) {
        grad_w[l] = delta * acts[l].transpose();
        grad_b[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = (weights_[l].transpose() * delta).array() * (1.0 - acts[l].array().square());
        }
    }
    return err.squaredNorm() / n;
}

std::string Mlp::to_json() const {
    nlohmann::json j;
    j["layers"] = sizes_;
    j["mean"] = std::vector<double>(mean_.data(), mean_.data() + mean_.size());
    j["scale"] = std::vector<double>(scale_.data(), scale_.data() + scale_.size());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const Eigen::MatrixXd& w = weights_[l];
        j["weights"].push_back(std::vector<double>(w.data(), w.data() + w.size()));
        j["biases"].push_back(std::vector<double>(biases_[l].data(), biases_[l].data() + biases_[l].size()));
    }
    return j.dump();
}

Mlp Mlp::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Mlp m;
    m.sizes_ = j.at("layers").get<std::vector<int>>();
    if (m.sizes_.size() < 2) throw DataError("model file: need at least two layers");
    auto vec = [](const std::vector<double>& v) {
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    m.mean_ = vec(j.at("mean").get<std::vector<double>>());
    m.scale_ = vec(j.at("scale").get<std::vector<double>>());
    for (std::size_t l = 1; l < m.sizes_.size(); ++l) {
        const auto w = j.at("weights").at(l - 1).get<std::vector<double>>();
        const auto b = j.at("biases").at(l - 1).get<std::vector<double>>();
        if (static_cast<int>(w.size()) != m.sizes_[l] * m.sizes_[l - 1] || static_cast<int>(b.size()) != m.sizes_[l]) {
            throw DataError(fmt::format("model file: layer {} has the wrong shape", l));
        }
        m.weights_.push_back(Eigen::Map<const Eigen::MatrixXd>(w.data(), m.sizes_[l], m.sizes_[l - 1]));
        m.biases_.push_back(vec(b));
    }
    if (m.mean_.size() != m.sizes_[0] || m.scale_.size() != m.sizes_[0]) {
        throw DataError("model file: normalization size mismatch");
    }
    return m;
}

namespace {

double batched_mse(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (y.size() == 0) return 0.0;
    double total = 0.0;
    constexpr Eigen::Index chunk = 4096;
    for (Eigen::Index start = 0; start < y.size(); start += chunk) {
        const Eigen::Index n = std::min(chunk, y.size() - start);
        total += model.loss(x.middleCols(start, n), y.segment(start, n)) * static_cast<double>(n);
    }
    return total / static_cast<double>(y.size());
}

}  // namespace

FitReport fit(Mlp& model, const Eigen::MatrixXd& train_x, const Eigen::VectorXd& train_y,
              const Eigen::MatrixXd& test_x, const Eigen::VectorXd& test_y, const MlpConfig& config) {
    if (train_x.cols() != train_y.size() || test_x.cols() != test_y.size()) {
        throw std::invalid_argument("fit: feature/target count mismatch");
    }
    if (train_y.size() == 0) throw std::invalid_argument("fit: empty training set");
    const Eigen::VectorXd mean = train_x.rowwise().mean();
    Eigen::VectorXd scale = ((train_x.colwise() - mean).array().square().rowwise().mean()).sqrt();
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
        if (scale(i) < 1e-9) scale(i) = 1.0;
    }
    model.set_normalization(mean, scale);
    const Eigen::MatrixXd xs = model.standardize(train_x);
    const Eigen::MatrixXd xt = model.standardize(test_x);

    auto& W = model.weights();
    auto& B = model.biases();
    std::vector<Eigen::MatrixXd> mw, vw, gw;
    std::vector<Eigen::VectorXd> mb, vb, gb;
    for (std::size_t l = 0; l < W.size(); ++l) {
        mw.push_back(Eigen::MatrixXd::Zero(W[l].rows(), W[l].cols()));
        vw.push_back(mw.back());
        mb.push_back(Eigen::VectorXd::Zero(B[l].size()));
        vb.push_back(mb.back());
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, tiny = 1e-8;
    long step = 0;
    std::mt19937_64 rng(config.seed ^ 0x5DEECE66DULL);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(train_y.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    FitReport report;
    report.train_rows = static_cast<int>(train_y.size());
    report.test_rows = static_cast<int>(test_y.size());
    Eigen::MatrixXd bx;
    Eigen::VectorXd by;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t n = std::min<std::size_t>(config.batch_size, order.size() - start);
            bx.resize(xs.rows(), static_cast<Eigen::Index>(n));
            by.resize(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                bx.col(static_cast<Eigen::Index>(i)) = xs.col(order[start + i]);
                by(static_cast<Eigen::Index>(i)) = train_y(order[start + i]);
            }
            const double l = model.loss_and_gradient(bx, by, gw, gb);
            if (!std::isfinite(l)) {
                throw std::runtime_error(fmt::format("training diverged at epoch {} (loss {})", epoch, l));
            }
            ++step;
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t k = 0; k < W.size(); ++k) {
                mw[k] = beta1 * mw[k] + (1.0 - beta1) * gw[k];
                vw[k] = beta2 * vw[k] + (1.0 - beta2) * gw[k].cwiseProduct(gw[k]);
                W[k].array() -= config.learning_rate * (mw[k].array() / c1) / ((vw[k].array() / c2).sqrt() + tiny);
                mb[k] = beta1 * mb[k] + (1.0 - beta1) * gb[k];
                vb[k] = beta2 * vb[k] + (1.0 - beta2) * gb[k].cwiseProduct(gb[k]);
                B[k].array() -= config.learning_rate * (mb[k].array() / c1) / ((vb[k].array() / c2).sqrt() + tiny);
            }
        }
        const double mse = batched_mse(model, xs, train_y);
        if (!std::isfinite(mse)) throw std::runtime_error(fmt::format("training diverged after epoch {}", epoch));
        report.epoch_train_mse.push_back(mse);
    }
    report.train_mse = report.epoch_train_mse.empty() ? batched_mse(model, xs, train_y) : report.epoch_train_mse.back();
    report.test_mse = batched_mse(model, xt, test_y);
    return report;
}

double gradient_check(const Mlp& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double eps) {
    std::vector<Eigen::MatrixXd> gw;
    std::vector<Eigen::VectorXd> gb;
    model.loss_and_gradient(x, y, gw, gb);
    Mlp probe = model;
    double worst = 0.0;
    auto compare = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + eps;
        const double plus = probe.loss(x, y);
        param = keep - eps;
        const double minus = probe.loss(x, y);
        param = keep;
        const double numeric = (plus - minus) / (2.0 * eps);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t l = 0; l < probe.weights().size(); ++l) {
        Eigen::MatrixXd& w = probe.weights()[l];
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) compare(w(i, j), gw[l](i, j));
        }
        Eigen::VectorXd& b = probe.biases()[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) compare(b(i), gb[l](i));
    }
    return worst;
}

ResponseModels train_response_models(const PowerSystem& system, const TrainingDataset& data, const MlpConfig& config) {
    const int G = system.num_generators();
    ResponseModels out;
    out.models.resize(G);
    out.reports.resize(G);
    std::vector<std::vector<const TrainingDataset::Row*>> by_gen(G);
    for (const auto& r : data.rows) by_gen[r.generator].push_back(&r);
    for (int g = 0; g < G; ++g) {
        const auto& rows = by_gen[g];
        if (system.generators[g].fast_start || static_cast<int>(rows.size()) < kMinRowsPerGenerator) continue;
        int n_test = 0;
        for (const auto* r : rows) n_test += r->test ? 1 : 0;
        const int n_train = static_cast<int>(rows.size()) - n_test;
        if (n_train == 0) continue;
        Eigen::MatrixXd tx(data.dimension, n_train), vx(data.dimension, n_test);
        Eigen::VectorXd ty(n_train), vy(n_test);
        int a = 0, b = 0;
        for (const auto* r : rows) {
            const float* f = data.sample(r->sample);
            Eigen::MatrixXd& X = r->test ? vx : tx;
            Eigen::VectorXd& Y = r->test ? vy : ty;
            int& c = r->test ? b : a;
            for (int i = 0; i < data.dimension; ++i) X(i, c) = f[i];
            Y(c++) = r->target;
        }
        Mlp model(data.dimension, config.hidden, config.seed + static_cast<std::uint64_t>(g));
        out.reports[g] = fit(model, tx, ty, vx, vy, config);
        out.models[g] = std::move(model);
    }
    return out;
}

void save_models(const ResponseModels& models, const std::filesystem::path& dir) {
    for (std::size_t g = 0; g < models.models.size(); ++g) {
        if (!models.models[g]) continue;
        write_text_file(dir / fmt::format("model_g{}.json", g), models.models[g]->to_json());
    }
}

ResponseModels load_models(const std::filesystem::path& dir, int num_generators) {
    ResponseModels out;
    out.models.resize(num_generators);
    out.reports.resize(num_generators);
    for (int g = 0; g < num_generators; ++g) {
        const auto path = dir / fmt::format("model_g{}.json", g);
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            out.models[g] = Mlp::from_json(buf.str());
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ": " + e.what());
        }
    }
    return out;
}

RampResponseFactors predict_factors(const PowerSystem& system, const ResponseModels& models,
                                    const ScenarioSet& deployment, const Scenario& forecast) {
    const int G = system.num_generators();
    const int S = deployment.size();
    const int T = forecast.num_intervals();
    if (static_cast<int>(models.models.size()) != G) throw std::invalid_argument("predict_factors: model count mismatch");
    RampResponseFactors out;
    out.zeta.assign(G, std::vector<std::vector<double>>(T, std::vector<double>(S, 0.0)));
    out.has_model.assign(G, false);
    const int dim = feature_dimension(system.num_solar());
    Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(T) * S);
    for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
            const auto f = extract_deployment_features(forecast, deployment.scenarios[s], t);
            for (int i = 0; i < dim; ++i) x(i, static_cast<Eigen::Index>(s) * T + t) = f[i];
        }
    }
    for (int g = 0; g < G; ++g) {
        if (!models.models[g] || system.generators[g].fast_start) continue;
        if (models.models[g]->inputs() != dim) {
            throw std::invalid_argument(fmt::format("model of generator {} expects {} features, not {}", g,
                                                    models.models[g]->inputs(), dim));
        }
        out.has_model[g] = true;
        const Eigen::VectorXd pred = models.models[g]->predict(x);
        for (int s = 0; s < S; ++s) {
            for (int t = 0; t < T; ++t) {
                out.zeta[g][t][s] = std::clamp(pred(static_cast<Eigen::Index>(s) * T + t), -1.0, 1.0);
            }
        }
    }
    return out;
}

void write_factors_csv(const RampResponseFactors& f, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "g,t,s,zeta\n";
    for (std::size_t g = 0; g < f.zeta.size(); ++g) {
        if (!f.has_model[g]) continue;
        for (std::size_t t = 0; t < f.zeta[g].size(); ++t) {
            for (std::size_t s = 0; s < f.zeta[g][t].size(); ++s) {
                out << g << ',' << t << ',' << s << ',' << exact(f.zeta[g][t][s]) << '\n';
            }
        }
    }
    write_text_file(path, out.str());
}

}  // namespace frp

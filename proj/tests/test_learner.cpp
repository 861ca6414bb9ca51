#include <doctest.h>

#include <cmath>
#include <random>

#include "frp/learner.hpp"
#include "support.hpp"

using namespace frp;

namespace {

Scenario day_series(double load, const std::vector<double>& solar_units) {
    Scenario s;
    s.load.assign(kIntervalsPerDay, load);
    s.solar.assign(kIntervalsPerDay, solar_units);
    return s;
}

// Hour results whose schedules move by a fixed step per interval.
FmmDayResult stepping_day(const std::vector<double>& start, const std::vector<double>& step,
                          const std::vector<std::vector<int>>& online = {}) {
    FmmDayResult day;
    const int G = static_cast<int>(start.size());
    for (int h = 0; h < 24; ++h) {
        FmmHourResult hour;
        FmmAwards& a = hour.awards;
        a.hour = h;
        a.u.assign(G, std::vector<int>(kFmmLength, 1));
        if (!online.empty()) a.u = online;
        a.p.assign(G, std::vector<double>(kFmmLength));
        a.ur = a.dr = a.p;
        for (int g = 0; g < G; ++g) {
            for (int t = 0; t < kFmmLength; ++t) a.p[g][t] = start[g] + step[g] * t;
        }
        day.hours.push_back(hour);
    }
    return day;
}

double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
    const double mean = y.mean();
    return 1.0 - (pred - y).squaredNorm() / (y.array() - mean).square().sum();
}

struct Synthetic {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Synthetic linear_data(std::mt19937_64& rng, int n, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Synthetic d{Eigen::MatrixXd(dim, n), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < dim; ++k) d.x(k, i) = 50.0 + 10.0 * normal(rng);
        d.y(i) = 0.03 * (d.x(0, i) - 50.0) - 0.02 * (d.x(1, i) - 50.0) + 0.1;
    }
    return d;
}

}  // namespace

TEST_CASE("feature vector layout") {
    CHECK(feature_dimension(3) == 70);
    CHECK(feature_dimension(0) == 28);

    const Scenario flat = day_series(500.0, {10.0, 20.0, 30.0});
    const std::vector<double> f = extract_features(flat, 40);
    REQUIRE(f.size() == 70);
    for (int w = 0; w < 7; ++w) {
        const double* block = f.data() + w * 10;
        CHECK(block[0] == doctest::Approx(440.0));
        CHECK(block[1] == 500.0);
        CHECK(block[2] == 0.0);
        CHECK(block[3] == 0.0);
        CHECK(block[4] == 10.0);
        CHECK(block[6] == 30.0);
        CHECK(block[7] == 0.0);
    }
}

TEST_CASE("edge intervals replicate the first and last points") {
    Scenario s = day_series(0.0, {});
    for (int t = 0; t < kIntervalsPerDay; ++t) s.load[t] = 100.0 + t;
    const std::vector<double> first = extract_features(s, 0);
    // Positions t-3 .. t-1 all repeat interval 0.
    for (int w = 0; w < 4; ++w) CHECK(first[w * 4 + 1] == 100.0);
    CHECK(first[4 * 4 + 1] == 101.0);
    CHECK(first[4 * 4 + 3] == 1.0);
    CHECK(first[3 * 4 + 3] == 0.0);
    const std::vector<double> last = extract_features(s, kIntervalsPerDay - 1);
    for (int w = 3; w < 7; ++w) CHECK(last[w * 4 + 1] == 195.0);
}

TEST_CASE("deployment features splice the scenario in after t") {
    const Scenario forecast = day_series(500.0, {0.0});
    const Scenario dep = day_series(530.0, {0.0});
    const std::vector<double> f = extract_deployment_features(forecast, dep, 10);
    const int width = 6;
    CHECK(f[3 * width + 1] == 500.0);
    CHECK(f[4 * width + 1] == 530.0);
    CHECK(f[4 * width + 2] == doctest::Approx(30.0));
    CHECK(f[5 * width + 2] == 0.0);
}

TEST_CASE("targets are clamped normalized ramps of online must-run units") {
    std::vector<GenerationResource> gens = {test::make_generator(0, 0, {{200, 10}}, 40),
                                            test::make_generator(0, 0, {{300, 20}}, 40),
                                            test::make_generator(0, 0, {{50, 90}}, 40, true)};
    const PowerSystem sys = test::make_system(1, {}, gens);
    Scenario sc = day_series(300.0, {});
    const FmmDayResult day = stepping_day({50, 250, 10}, {20, -60, 5});
    const TrainingDataset data = build_targets(sys, {{&sc, &day}}, 0.0);
    CHECK(data.dimension == feature_dimension(0));
    CHECK(data.num_samples() == kIntervalsPerDay);
    int g0 = 0, g1 = 0;
    for (const auto& r : data.rows) {
        REQUIRE(r.generator != 2);
        if (r.generator == 0) {
            ++g0;
            CHECK(r.target == doctest::Approx(0.5));
        } else {
            ++g1;
            CHECK(r.target == -1.0);
        }
    }
    CHECK(g0 == kIntervalsPerDay);
    CHECK(g1 == kIntervalsPerDay);

    SUBCASE("a unit going offline contributes nothing for that transition") {
        std::vector<std::vector<int>> online(3, std::vector<int>(kFmmLength, 1));
        online[0][2] = 0;
        const FmmDayResult partial = stepping_day({50, 250, 10}, {20, -60, 5}, online);
        const TrainingDataset d = build_targets(sys, {{&sc, &partial}}, 0.0);
        int rows0 = 0;
        for (const auto& r : d.rows) rows0 += r.generator == 0 ? 1 : 0;
        // Transitions 1->2 and 2->3 are dropped in each hour.
        CHECK(rows0 == 24 * 2);
    }
    SUBCASE("flat schedules give zero targets") {
        const FmmDayResult still = stepping_day({50, 250, 10}, {0, 0, 0});
        for (const auto& r : build_targets(sys, {{&sc, &still}}, 0.0).rows) CHECK(r.target == 0.0);
    }
    SUBCASE("days are split by scenario") {
        std::vector<Scenario> scs(8, sc);
        std::vector<TrainingDay> days;
        for (int i = 0; i < 8; ++i) {
            scs[i].id = i;
            days.push_back({&scs[i], &day});
        }
        const TrainingDataset split = build_targets(sys, days, 0.25);
        std::vector<int> test_flag(8, -1);
        int tests = 0;
        for (const auto& r : split.rows) {
            const int id = split.sample_scenario[r.sample];
            if (test_flag[id] == -1) {
                test_flag[id] = r.test ? 1 : 0;
                tests += r.test ? 1 : 0;
            }
            CHECK(test_flag[id] == (r.test ? 1 : 0));
        }
        CHECK(tests == 2);
    }
}

TEST_CASE("backprop agrees with finite differences") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> width(1, 6), depth(1, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int c = 0; c < 10; ++c) {
        CAPTURE(c);
        std::vector<int> hidden(depth(rng));
        for (int& h : hidden) h = width(rng);
        const int dim = width(rng);
        Mlp model(dim, hidden, 100 + c);
        Eigen::MatrixXd x(dim, 7);
        Eigen::VectorXd y(7);
        for (int i = 0; i < 7; ++i) {
            for (int k = 0; k < dim; ++k) x(k, i) = normal(rng);
            y(i) = normal(rng);
        }
        CHECK(gradient_check(model, x, y) <= 1e-4);
    }

    SUBCASE("all-zero weights") {
        Mlp model(3, {4, 2}, 1);
        for (auto& w : model.weights()) w.setZero();
        Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 4);
        Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
        CHECK(gradient_check(model, x, y) <= 1e-4);
    }
}

TEST_CASE("regressor fits simple targets") {
    std::mt19937_64 rng(9);
    MlpConfig cfg;
    cfg.hidden = {16, 8};
    cfg.epochs = 150;
    cfg.learning_rate = 5e-3;

    SUBCASE("linear target") {
        const Synthetic train = linear_data(rng, 1500, 4);
        const Synthetic test = linear_data(rng, 500, 4);
        Mlp model(4, cfg.hidden, 3);
        const FitReport rep = fit(model, train.x, train.y, test.x, test.y, cfg);
        CHECK(rep.train_rows == 1500);
        CHECK(rep.epoch_train_mse.size() == 150);
        CHECK(rep.epoch_train_mse.back() < rep.epoch_train_mse.front());
        CHECK(r_squared(model.predict(test.x), test.y) >= 0.95);
    }
    SUBCASE("constant target") {
        Synthetic train = linear_data(rng, 400, 4);
        train.y.setConstant(0.3);
        Mlp model(4, cfg.hidden, 3);
        fit(model, train.x, train.y, train.x, train.y, cfg);
        const Eigen::VectorXd p = model.predict(train.x);
        CHECK(p.minCoeff() >= 0.25);
        CHECK(p.maxCoeff() <= 0.35);
    }
    SUBCASE("zero target") {
        Synthetic train = linear_data(rng, 400, 4);
        train.y.setZero();
        Mlp model(4, cfg.hidden, 3);
        fit(model, train.x, train.y, train.x, train.y, cfg);
        CHECK(model.predict(train.x).cwiseAbs().maxCoeff() <= 0.05);
    }
    SUBCASE("same seed, same model") {
        const Synthetic train = linear_data(rng, 300, 4);
        cfg.epochs = 5;
        Mlp a(4, cfg.hidden, 3), b(4, cfg.hidden, 3);
        fit(a, train.x, train.y, train.x, train.y, cfg);
        fit(b, train.x, train.y, train.x, train.y, cfg);
        CHECK(a.predict(train.x) == b.predict(train.x));
    }
    SUBCASE("mismatched sizes are rejected") {
        const Synthetic train = linear_data(rng, 10, 4);
        Mlp model(4, cfg.hidden, 3);
        CHECK_THROWS(fit(model, train.x, Eigen::VectorXd::Zero(9), train.x, train.y, cfg));
    }
}

TEST_CASE("model JSON round trip predicts identically") {
    std::mt19937_64 rng(3);
    const Synthetic d = linear_data(rng, 200, 5);
    Mlp model(5, {6, 3}, 4);
    MlpConfig cfg;
    cfg.epochs = 3;
    fit(model, d.x, d.y, d.x, d.y, cfg);
    const Mlp back = Mlp::from_json(model.to_json());
    CHECK(back.layer_sizes() == model.layer_sizes());
    CHECK(back.predict(d.x) == model.predict(d.x));
    CHECK_THROWS_AS(Mlp::from_json(R"({"layers":[3],"mean":[0,0,0],"scale":[1,1,1]})"), DataError);
}

TEST_CASE("response models and predicted factors") {
    std::vector<GenerationResource> gens = {test::make_generator(0, 0, {{200, 10}}, 40),
                                            test::make_generator(0, 0, {{300, 20}}, 40),
                                            test::make_generator(0, 0, {{50, 90}}, 40, true)};
    PowerSystem sys = test::make_system(1, {}, gens);
    sys.solar_units.push_back({0, 0, 100.0, 1.0});
    std::vector<Scenario> scs(4, day_series(300.0, {20.0}));
    const FmmDayResult day = stepping_day({50, 250, 10}, {20, -60, 5});
    std::vector<TrainingDay> days;
    for (int i = 0; i < 4; ++i) {
        scs[i].id = i;
        days.push_back({&scs[i], &day});
    }
    const TrainingDataset data = build_targets(sys, days);
    MlpConfig cfg;
    cfg.hidden = {4};
    cfg.epochs = 2;
    const ResponseModels models = train_response_models(sys, data, cfg);
    CHECK(models.models[0].has_value());
    CHECK(models.models[1].has_value());
    CHECK_FALSE(models.models[2].has_value());

    const auto dir = test::scratch_dir("models");
    save_models(models, dir);
    const ResponseModels loaded = load_models(dir, 3);
    CHECK_FALSE(loaded.models[2].has_value());
    const std::vector<double> probe = extract_features(scs[0], 30);
    CHECK(loaded.models[0]->predict_one(probe) == models.models[0]->predict_one(probe));

    SUBCASE("predictions outside [-1, 1] are clamped") {
        ResponseModels fixed;
        fixed.models.resize(3);
        Mlp m(feature_dimension(1), {3}, 1);
        for (auto& w : m.weights()) w.setZero();
        m.biases().back()(0) = 1.7;
        fixed.models[0] = m;
        m.biases().back()(0) = -2.0;
        fixed.models[1] = m;
        fixed.models[2] = m;  // fast-start units are ignored even with a model

        ScenarioSet dep;
        dep.kind = ScenarioKind::deployment;
        dep.scenarios = {scs[0], scs[0]};
        const RampResponseFactors f = predict_factors(sys, fixed, dep, scs[0]);
        CHECK(f.num_scenarios() == 2);
        CHECK(f.has_model == std::vector<bool>{true, true, false});
        for (int t = 0; t < kIntervalsPerDay; ++t) {
            for (int s = 0; s < 2; ++s) {
                CHECK(f.zeta[0][t][s] == 1.0);
                CHECK(f.zeta[1][t][s] == -1.0);
                CHECK(f.zeta[2][t][s] == 0.0);
            }
        }
    }
}

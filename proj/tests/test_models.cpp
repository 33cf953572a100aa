#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace evoselect;
using namespace evoselect::testing;

namespace {

/// 2-D points labelled by the sign of x0 + x1, keeping only points at
/// distance >= 1 from the separating line.
Dataset separable_2d(std::size_t n, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (rows.size() < n) {
        const double a = u(gen);
        const double b = u(gen);
        const double dist = (a + b) / std::sqrt(2.0);
        if (std::abs(dist) < 1.0) {
            continue;
        }
        rows.push_back({a, b});
        labels.push_back(dist > 0 ? 1 : 0);
    }
    return make_dataset(rows, labels);
}

/// Classic perceptron; returns true once it classifies everything correctly.
bool perceptron_separates(const Dataset& d, int max_epochs = 1000) {
    std::vector<double> w(d.cols() + 1, 0.0);
    for (int e = 0; e < max_epochs; ++e) {
        bool clean = true;
        for (std::size_t i = 0; i < d.rows(); ++i) {
            double z = w.back();
            for (std::size_t j = 0; j < d.cols(); ++j) {
                z += w[j] * d.at(i, j);
            }
            const double y = d.labels()[i] != 0 ? 1.0 : -1.0;
            if (y * z <= 0.0) {
                clean = false;
                for (std::size_t j = 0; j < d.cols(); ++j) {
                    w[j] += y * d.at(i, j);
                }
                w.back() += y;
            }
        }
        if (clean) {
            return true;
        }
    }
    return false;
}

double relative_gradient_error(const ModelSpec& spec, const Dataset& data, std::uint64_t seed) {
    auto params = initial_parameters(spec, data.cols(), seed);
    Stream rng(seed);
    for (auto& p : params) {
        p = rng.uniform(-0.8, 0.8);
    }
    std::vector<double> analytic(params.size());
    loss_and_gradient(spec, params, data, analytic);
    double diff = 0.0;
    double norm_a = 0.0;
    double norm_n = 0.0;
    const double h = 1e-5;
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto plus = params;
        auto minus = params;
        plus[p] += h;
        minus[p] -= h;
        const double numeric = (loss_and_gradient(spec, plus, data) - loss_and_gradient(spec, minus, data)) / (2 * h);
        diff += (numeric - analytic[p]) * (numeric - analytic[p]);
        norm_a += analytic[p] * analytic[p];
        norm_n += numeric * numeric;
    }
    return std::sqrt(diff) / std::max({std::sqrt(norm_a), std::sqrt(norm_n), 1e-12});
}

} // namespace

TEST(Logistic, FitsSeparableDataPerfectly) {
    const auto data = separable_2d(200, 17);
    ASSERT_TRUE(perceptron_separates(data));
    auto spec = ModelSpec::logistic();
    spec.learning_rate = 0.1;
    spec.epochs = 500;
    const auto model = train(spec, data, 0);
    const auto scores = predict_scores(model, data);
    EXPECT_EQ(accuracy(threshold(scores), data.labels()), 1.0);
    EXPECT_EQ(roc_auc(scores, data.labels()), 1.0);
}

TEST(Logistic, ZeroColumnsMatchColumnSubset) {
    const auto data = random_dataset(120, 6, 21);
    const Chromosome mask{1, 0, 1, 1, 0, 0};
    // zero the masked-out columns in place
    std::vector<double> f(data.features().begin(), data.features().end());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            if (!mask[j]) {
                f[i * data.cols() + j] = 0.0;
            }
        }
    }
    const Dataset zeroed(data.name(), data.feature_names(), f,
                         std::vector<std::uint8_t>(data.labels().begin(), data.labels().end()));
    const auto subset = subset_by_chromosome(data, mask);
    const auto spec = ModelSpec::logistic();
    const auto a = predict_scores(train(spec, zeroed, 5), zeroed);
    const auto b = predict_scores(train(spec, subset, 5), subset);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], 1e-9);
    }
}

TEST(Models, TrainingIsDeterministic) {
    const auto data = random_dataset(80, 5, 2);
    for (auto spec : {ModelSpec::logistic(), ModelSpec::mlp()}) {
        spec.epochs = 20;
        const auto a = train(spec, data, 77);
        const auto b = train(spec, data, 77);
        EXPECT_EQ(a.parameters, b.parameters);
        EXPECT_EQ(a.loss_history, b.loss_history);
    }
    auto mlp = ModelSpec::mlp();
    mlp.epochs = 3;
    EXPECT_NE(train(mlp, data, 1).parameters, train(mlp, data, 2).parameters);
}

TEST(Models, PredictScores) {
    const auto data = random_dataset(10, 3, 1);
    TrainedModel zero{ModelSpec::logistic(), 3, std::vector<double>(4, 0.0), {}};
    for (double s : predict_scores(zero, data)) {
        EXPECT_EQ(s, 0.5);
    }
    TrainedModel pos{ModelSpec::logistic(), 1, {2.0, 0.0}, {}};
    const auto ramp = make_dataset({{-1.0}, {0.0}, {0.5}, {3.0}}, {0, 1, 0, 1});
    const auto s = predict_scores(pos, ramp);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_LT(s[0], s[3]);
    EXPECT_THROW(predict_scores(pos, data), DataError);

    TrainedModel extreme{ModelSpec::logistic(), 1, {1e6, 0.0}, {}};
    for (double v : predict_scores(extreme, ramp)) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Models, Errors) {
    const auto single = make_dataset({{1.0}, {2.0}}, {1, 1});
    EXPECT_THROW(train(ModelSpec::logistic(), single, 0), TrainingError);
    auto bad = ModelSpec::logistic();
    bad.learning_rate = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = ModelSpec::mlp();
    bad.hidden_units = 0;
    EXPECT_THROW(bad.validate(), ConfigError);

    const auto huge = make_dataset({{1e200}, {-1e200}, {1e200}}, {0, 1, 1});
    auto wild = ModelSpec::logistic();
    wild.learning_rate = 1e200;
    wild.epochs = 5;
    try {
        train(wild, huge, 0);
        FAIL() << "expected TrainingError";
    } catch (const TrainingError& e) {
        EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos) << e.what();
    }
}

TEST(Models, GradientsMatchFiniteDifferences) {
    for (std::uint32_t t = 0; t < 10; ++t) {
        const auto data = random_dataset(5, 3, 100 + t);
        auto logistic = ModelSpec::logistic();
        logistic.l2 = 0.01;
        auto mlp = ModelSpec::mlp();
        mlp.hidden_units = 4;
        mlp.l2 = 0.01;
        EXPECT_LT(relative_gradient_error(logistic, data, t), 1e-4);
        EXPECT_LT(relative_gradient_error(mlp, data, t), 1e-4);
    }
}

TEST(Logistic, FullBatchLossNonIncreasing) {
    for (std::uint32_t t = 0; t < 20; ++t) {
        const auto raw = random_dataset(60, 4, 500 + t);
        const auto [data, unused] = standardize(raw, {});
        auto spec = ModelSpec::logistic();
        spec.learning_rate = 0.01;
        spec.epochs = 50;
        const auto model = train(spec, data, 0);
        ASSERT_EQ(model.loss_history.size(), 50U);
        for (std::size_t e = 1; e < 50; ++e) {
            ASSERT_LE(model.loss_history[e], model.loss_history[e - 1]) << "epoch " << e;
        }
    }
}

TEST(Mlp, LearnsNonlinearBoundary) {
    // XOR-like quadrants: not linearly separable.
    std::mt19937 gen(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 400; ++i) {
        const double a = u(gen);
        const double b = u(gen);
        rows.push_back({a, b});
        labels.push_back(a * b > 0 ? 1 : 0);
    }
    const auto data = make_dataset(rows, labels);
    auto spec = ModelSpec::mlp();
    spec.epochs = 200;
    spec.learning_rate = 0.1;
    const auto mlp_auc = roc_auc(predict_scores(train(spec, data, 3), data), data.labels());
    const auto lin_auc = roc_auc(predict_scores(train(ModelSpec::logistic(), data, 3), data), data.labels());
    EXPECT_GT(mlp_auc, 0.9);
    EXPECT_GT(mlp_auc, lin_auc + 0.2);
}

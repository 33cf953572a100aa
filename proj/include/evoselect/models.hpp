#pragma once

/// @file models.hpp
/// @brief Binary classifiers used inside fitness evaluation.
///
/// Two models share one interface: L2-regularized logistic regression fit by
/// full-batch gradient descent (cheap), and a one-hidden-layer ReLU network
/// with a sigmoid output fit by mini-batch gradient descent (expensive).
/// Both minimize mean log loss plus (l2 / 2) * |weights|^2, biases excluded.
///
/// Parameters live in one flat vector:
///   logistic: [w_0 .. w_{d-1}, b]
///   mlp:      [W1 (hidden x d, row-major), b1 (hidden), w2 (hidden), b2]

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoselect/dataset.hpp"
#include "evoselect/error.hpp"
#include "evoselect/rng.hpp"

namespace evoselect {

enum class ModelKind { logistic, mlp };

inline std::string_view to_string(ModelKind k) noexcept { return k == ModelKind::logistic ? "logistic" : "mlp"; }

inline ModelKind parse_model_kind(std::string_view s) {
    if (s == "logistic") {
        return ModelKind::logistic;
    }
    if (s == "mlp") {
        return ModelKind::mlp;
    }
    throw ConfigError("unknown model '" + std::string(s) + "' (expected logistic or mlp)");
}

struct ModelSpec {
    ModelKind kind = ModelKind::logistic;
    double learning_rate = 0.1;
    std::size_t epochs = 300;
    double l2 = 1e-4;
    std::size_t hidden_units = 32; ///< mlp only
    std::size_t batch_size = 32;   ///< mlp only

    static ModelSpec logistic() { return ModelSpec{}; }

    static ModelSpec mlp() {
        ModelSpec s;
        s.kind = ModelKind::mlp;
        s.learning_rate = 0.05;
        s.epochs = 100;
        return s;
    }

    static ModelSpec defaults(ModelKind kind) { return kind == ModelKind::mlp ? mlp() : logistic(); }

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw ConfigError("learning_rate must be > 0");
        }
        if (epochs < 1) {
            throw ConfigError("epochs must be >= 1");
        }
        if (!(l2 >= 0.0) || !std::isfinite(l2)) {
            throw ConfigError("l2 must be >= 0");
        }
        if (kind == ModelKind::mlp && hidden_units < 1) {
            throw ConfigError("hidden_units must be >= 1");
        }
        if (kind == ModelKind::mlp && batch_size < 1) {
            throw ConfigError("batch_size must be >= 1");
        }
    }

    [[nodiscard]] std::size_t parameter_count(std::size_t dims) const noexcept {
        return kind == ModelKind::logistic ? dims + 1 : hidden_units * dims + 2 * hidden_units + 1;
    }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainedModel {
    ModelSpec spec;
    std::size_t train_dim = 0;
    std::vector<double> parameters;
    std::vector<double> loss_history; ///< mean training loss per epoch, before that epoch's updates
};

namespace detail {

inline double sigmoid(double z) noexcept {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// log(1 + e^z) without overflow.
inline double softplus(double z) noexcept { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Accumulates loss/gradient for one sample into `grad` (unscaled).
/// Returns the sample's log loss. `hidden` is scratch of size hidden_units.
inline double accumulate_sample(const ModelSpec& spec, std::span<const double> params, std::span<const double> x,
                                double y, std::span<double> grad, std::span<double> hidden) {
    const std::size_t d = x.size();
    if (spec.kind == ModelKind::logistic) {
        double z = params[d];
        for (std::size_t j = 0; j < d; ++j) {
            z += params[j] * x[j];
        }
        if (!grad.empty()) {
            const double dz = sigmoid(z) - y;
            for (std::size_t j = 0; j < d; ++j) {
                grad[j] += dz * x[j];
            }
            grad[d] += dz;
        }
        return softplus(z) - y * z;
    }

    const std::size_t h = spec.hidden_units;
    const double* w1 = params.data();
    const double* b1 = w1 + h * d;
    const double* w2 = b1 + h;
    const double b2 = w2[h];
    double z = b2;
    for (std::size_t k = 0; k < h; ++k) {
        double a = b1[k];
        const double* wk = w1 + k * d;
        for (std::size_t j = 0; j < d; ++j) {
            a += wk[j] * x[j];
        }
        hidden[k] = a > 0.0 ? a : 0.0;
        z += w2[k] * hidden[k];
    }
    if (!grad.empty()) {
        const double dz = sigmoid(z) - y;
        double* g_w1 = grad.data();
        double* g_b1 = g_w1 + h * d;
        double* g_w2 = g_b1 + h;
        for (std::size_t k = 0; k < h; ++k) {
            g_w2[k] += dz * hidden[k];
            if (hidden[k] > 0.0) {
                const double dh = dz * w2[k];
                g_b1[k] += dh;
                double* gk = g_w1 + k * d;
                for (std::size_t j = 0; j < d; ++j) {
                    gk[j] += dh * x[j];
                }
            }
        }
        g_w2[h] += dz;
    }
    return softplus(z) - y * z;
}

/// Whether parameter p is a weight (regularized) rather than a bias.
inline bool is_weight(const ModelSpec& spec, std::size_t dims, std::size_t p) noexcept {
    if (spec.kind == ModelKind::logistic) {
        return p < dims;
    }
    const std::size_t h = spec.hidden_units;
    return p < h * dims || (p >= h * dims + h && p < h * dims + 2 * h);
}

} // namespace detail

/// Mean log loss plus L2 penalty over the given rows. When `grad` is
/// non-empty it must have parameter_count(dims) entries and receives the
/// gradient (overwritten).
inline double loss_and_gradient(const ModelSpec& spec, std::span<const double> params, const Dataset& data,
                                std::span<const std::size_t> rows, std::span<double> grad = {}) {
    const std::size_t d = data.cols();
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> hidden(spec.kind == ModelKind::mlp ? spec.hidden_units : 0);
    double total = 0.0;
    for (auto i : rows) {
        total += detail::accumulate_sample(spec, params, data.row(i), data.labels()[i], grad, hidden);
    }
    const double inv = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());
    double penalty = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        if (!grad.empty()) {
            grad[p] *= inv;
        }
        if (detail::is_weight(spec, d, p)) {
            penalty += params[p] * params[p];
            if (!grad.empty()) {
                grad[p] += spec.l2 * params[p];
            }
        }
    }
    return total * inv + 0.5 * spec.l2 * penalty;
}

/// Full-data overload.
inline double loss_and_gradient(const ModelSpec& spec, std::span<const double> params, const Dataset& data,
                                std::span<double> grad = {}) {
    std::vector<std::size_t> rows(data.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return loss_and_gradient(spec, params, data, rows, grad);
}

/// Starting parameters: zeros for logistic; for mlp, weights uniform in
/// +-1/sqrt(fan_in) and zero biases.
inline std::vector<double> initial_parameters(const ModelSpec& spec, std::size_t dims, std::uint64_t seed) {
    std::vector<double> params(spec.parameter_count(dims), 0.0);
    if (spec.kind == ModelKind::mlp) {
        Stream rng(derive_seed(seed, "mlp-init"));
        const std::size_t h = spec.hidden_units;
        const double r1 = 1.0 / std::sqrt(static_cast<double>(dims));
        for (std::size_t p = 0; p < h * dims; ++p) {
            params[p] = rng.uniform(-r1, r1);
        }
        const double r2 = 1.0 / std::sqrt(static_cast<double>(h));
        for (std::size_t k = 0; k < h; ++k) {
            params[h * dims + h + k] = rng.uniform(-r2, r2);
        }
    }
    return params;
}

/// Fit `spec` to `data`. Pure function of (spec, data, seed).
inline TrainedModel train(const ModelSpec& spec, const Dataset& data, std::uint64_t seed) {
    spec.validate();
    if (data.empty()) {
        throw TrainingError("cannot train on an empty dataset");
    }
    if (!data.has_both_classes()) {
        throw TrainingError("training data contains a single class");
    }
    if (data.cols() == 0) {
        throw TrainingError("training data has no features");
    }
    TrainedModel model{spec, data.cols(), initial_parameters(spec, data.cols(), seed), {}};
    model.loss_history.reserve(spec.epochs);
    std::vector<double> grad(model.parameters.size());
    std::vector<std::size_t> rows(data.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    auto step = [&](std::span<const std::size_t> batch) {
        const double loss = loss_and_gradient(spec, model.parameters, data, batch, grad);
        for (std::size_t p = 0; p < grad.size(); ++p) {
            model.parameters[p] -= spec.learning_rate * grad[p];
        }
        return loss;
    };

    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        double epoch_loss = 0.0;
        if (spec.kind == ModelKind::logistic) {
            epoch_loss = step(rows);
        } else {
            Stream rng(derive_seed(seed, "mlp-shuffle", {epoch}));
            rng.shuffle(rows.begin(), rows.end());
            const std::size_t n = rows.size();
            for (std::size_t start = 0; start < n; start += spec.batch_size) {
                const std::size_t len = std::min(spec.batch_size, n - start);
                epoch_loss += step(std::span<const std::size_t>(rows).subspan(start, len)) * static_cast<double>(len);
            }
            epoch_loss /= static_cast<double>(n);
        }
        if (!std::isfinite(epoch_loss)) {
            throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1));
        }
        model.loss_history.push_back(epoch_loss);
    }
    for (double p : model.parameters) {
        if (!std::isfinite(p)) {
            throw TrainingError("non-finite parameter after training");
        }
    }
    return model;
}

/// Probability of class 1 per row, kept strictly inside (0, 1).
inline std::vector<double> predict_scores(const TrainedModel& model, const Dataset& data) {
    if (data.cols() != model.train_dim) {
        throw DataError("model trained on " + std::to_string(model.train_dim) + " features, got " +
                        std::to_string(data.cols()));
    }
    static constexpr double lo = std::numeric_limits<double>::denorm_min();
    static constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    std::vector<double> hidden(model.spec.kind == ModelKind::mlp ? model.spec.hidden_units : 0);
    std::vector<double> out;
    out.reserve(data.rows());
    const std::size_t d = data.cols();
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto x = data.row(i);
        const auto& w = model.parameters;
        double z = 0.0;
        if (model.spec.kind == ModelKind::logistic) {
            z = w[d];
            for (std::size_t j = 0; j < d; ++j) {
                z += w[j] * x[j];
            }
        } else {
            const std::size_t h = model.spec.hidden_units;
            const double* b1 = w.data() + h * d;
            const double* w2 = b1 + h;
            z = w2[h];
            for (std::size_t k = 0; k < h; ++k) {
                double a = b1[k];
                const double* wk = w.data() + k * d;
                for (std::size_t j = 0; j < d; ++j) {
                    a += wk[j] * x[j];
                }
                z += w2[k] * (a > 0.0 ? a : 0.0);
            }
        }
        out.push_back(std::clamp(detail::sigmoid(z), lo, hi));
    }
    return out;
}

} // namespace evoselect

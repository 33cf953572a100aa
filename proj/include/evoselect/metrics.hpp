#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoselect/chromosome.hpp"
#include "evoselect/error.hpp"

namespace evoselect {

enum class Metric { f1, accuracy, roc_auc };

inline std::string_view to_string(Metric m) noexcept {
    switch (m) {
    case Metric::f1:
        return "f1";
    case Metric::accuracy:
        return "accuracy";
    case Metric::roc_auc:
        return "roc_auc";
    }
    return "?";
}

inline Metric parse_metric(std::string_view s) {
    if (s == "f1") {
        return Metric::f1;
    }
    if (s == "accuracy") {
        return Metric::accuracy;
    }
    if (s == "roc_auc" || s == "auc") {
        return Metric::roc_auc;
    }
    throw ConfigError("unknown metric '" + std::string(s) + "' (expected f1, accuracy or roc_auc)");
}

struct MetricReport {
    double accuracy = 0.0;
    double f1 = 0.0;
    double roc_auc = 0.0;

    [[nodiscard]] double get(Metric m) const noexcept {
        switch (m) {
        case Metric::accuracy:
            return accuracy;
        case Metric::roc_auc:
            return roc_auc;
        case Metric::f1:
        default:
            return f1;
        }
    }

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Probabilities at or above this are predicted as class 1.
inline constexpr double decision_threshold = 0.5;

namespace detail {

inline void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) {
        throw DataError("length mismatch: " + std::to_string(a) + " predictions vs " + std::to_string(b) + " labels");
    }
    if (a == 0) {
        throw DataError("empty input");
    }
}

} // namespace detail

inline double accuracy(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels) {
    detail::check_lengths(predictions.size(), labels.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        hits += (predictions[i] != 0) == (labels[i] != 0) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

/// 2TP / (2TP + FP + FN); 0 when nothing is positive on either side.
inline double f1(std::span<const std::uint8_t> predictions, std::span<const std::uint8_t> labels) {
    detail::check_lengths(predictions.size(), labels.size());
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool p = predictions[i] != 0;
        const bool y = labels[i] != 0;
        tp += (p && y) ? 1 : 0;
        fp += (p && !y) ? 1 : 0;
        fn += (!p && y) ? 1 : 0;
    }
    const std::size_t denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

/// Mann-Whitney rank-sum AUC with average ranks for ties.
inline double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) {
        throw DataError("length mismatch: " + std::to_string(scores.size()) + " scores vs " +
                        std::to_string(labels.size()) + " labels");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Ranks doubled so ties (average of k consecutive ranks) stay integral.
    std::uint64_t pos = 0;
    std::uint64_t twice_rank_sum = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) {
            ++j;
        }
        const std::uint64_t twice_avg = (i + 1) + (j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] != 0) {
                ++pos;
                twice_rank_sum += twice_avg;
            }
        }
        i = j + 1;
    }
    const std::uint64_t neg = n - pos;
    if (pos == 0 || neg == 0) {
        throw DataError("AUC undefined: labels contain a single class");
    }
    // 2U = 2 * rank_sum - pos * (pos + 1)
    const std::uint64_t twice_u = twice_rank_sum - pos * (pos + 1);
    return static_cast<double>(twice_u) / static_cast<double>(2 * pos * neg);
}

inline std::vector<std::uint8_t> threshold(std::span<const double> scores, double cut = decision_threshold) {
    std::vector<std::uint8_t> out(scores.size());
    std::transform(scores.begin(), scores.end(), out.begin(),
                   [cut](double s) { return static_cast<std::uint8_t>(s >= cut ? 1 : 0); });
    return out;
}

/// Accuracy and F1 at the decision threshold plus AUC of the raw scores.
inline MetricReport evaluate_scores(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const auto predicted = threshold(scores);
    return MetricReport{accuracy(predicted, labels), f1(predicted, labels), roc_auc(scores, labels)};
}

/// |c1 AND c2| / |c1 OR c2|.
inline double jaccard(const Chromosome& a, const Chromosome& b) {
    if (a.size() != b.size()) {
        throw DataError("jaccard: chromosome lengths differ (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        inter += (a[j] && b[j]) ? 1 : 0;
        uni += (a[j] || b[j]) ? 1 : 0;
    }
    if (uni == 0) {
        throw DataError("jaccard: both chromosomes are all-zero");
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace evoselect

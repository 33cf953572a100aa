#pragma once

/// @file synth.hpp
/// @brief Synthetic data with a known informative/distractor layout.
///
/// Features are i.i.d. standard normal. The label is
/// 1[w . x_informative + noise > 0] with weights uniform in [0.5, 1.5] and
/// Gaussian noise of standard deviation 0.3. Informative columns are named
/// `inf_<k>`, distractors `dis_<k>`, and their positions are shuffled.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evoselect/chromosome.hpp"
#include "evoselect/dataset.hpp"
#include "evoselect/error.hpp"
#include "evoselect/rng.hpp"

namespace evoselect {

struct SyntheticData {
    Dataset data;
    Chromosome informative; ///< ground-truth mask
    std::vector<double> weights;
};

inline constexpr double synth_noise_std = 0.3;

inline SyntheticData generate_synthetic(std::size_t d, std::size_t informative, std::size_t n, std::uint64_t seed) {
    if (d < 1 || informative < 1 || informative > d) {
        throw ConfigError("need 1 <= informative <= d (got informative=" + std::to_string(informative) +
                          ", d=" + std::to_string(d) + ")");
    }
    if (n < 20) {
        throw ConfigError("need at least 20 samples, got " + std::to_string(n));
    }
    std::vector<std::size_t> columns(d);
    for (std::size_t j = 0; j < d; ++j) {
        columns[j] = j;
    }
    Stream layout(derive_seed(seed, "synth-layout"));
    layout.shuffle(columns.begin(), columns.end());

    Chromosome mask(d);
    std::vector<std::string> names(d);
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t col = columns[k];
        if (k < informative) {
            mask.set(col, true);
            names[col] = "inf_" + std::to_string(k);
        } else {
            names[col] = "dis_" + std::to_string(k - informative);
        }
    }

    Stream wrng(derive_seed(seed, "synth-weights"));
    std::vector<double> weights(informative);
    for (auto& w : weights) {
        w = wrng.uniform(0.5, 1.5);
    }

    std::vector<double> features(n * d);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        Stream rng(derive_seed(seed, "synth-row", {i}));
        double* row = features.data() + i * d;
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = rng.normal();
        }
        double z = synth_noise_std * rng.normal();
        for (std::size_t k = 0; k < informative; ++k) {
            z += weights[k] * row[columns[k]];
        }
        labels[i] = z > 0.0 ? 1 : 0;
    }
    return SyntheticData{Dataset("synth", std::move(names), std::move(features), std::move(labels)), std::move(mask),
                         std::move(weights)};
}

/// Ground-truth mask recovered from column names (`inf_` prefix).
inline Chromosome informative_mask(const Dataset& data) {
    Chromosome mask(data.cols());
    for (std::size_t j = 0; j < data.cols(); ++j) {
        mask.set(j, data.feature_names()[j].rfind("inf_", 0) == 0);
    }
    return mask;
}

} // namespace evoselect

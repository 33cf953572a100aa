#pragma once

// Shared fixtures and independent reference implementations used as test
// oracles. Nothing here calls the code path it is used to check.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "evoselect/evoselect.hpp"

namespace evoselect::testing {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("evoselect_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

/// Standardized 70/20/10 split of the synthetic distractor dataset.
inline SplitDataset synthetic_split(std::size_t d, std::size_t informative, std::size_t n, std::uint64_t seed,
                                    std::uint64_t split_seed = 1) {
    return prepare_split(generate_synthetic(d, informative, n, seed).data, split_seed);
}

/// Probability that a positive outscores a negative, ties 1/2, by counting
/// every positive/negative pair.
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    std::uint64_t twice_wins = 0;
    std::uint64_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) {
            continue;
        }
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) {
                continue;
            }
            ++pairs;
            if (scores[i] > scores[j]) {
                twice_wins += 2;
            } else if (scores[i] == scores[j]) {
                twice_wins += 1;
            }
        }
    }
    return static_cast<double>(twice_wins) / static_cast<double>(2 * pairs);
}

/// Parity crossover written against plain bit vectors.
inline std::vector<int> reference_crossover(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> c(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        c[j] = (j & 1U) ? b[j] : a[j];
    }
    return c;
}

inline std::vector<int> bits_of(std::uint32_t mask, std::size_t d) {
    std::vector<int> v(d);
    for (std::size_t j = 0; j < d; ++j) {
        v[j] = static_cast<int>((mask >> j) & 1U);
    }
    return v;
}

inline Chromosome chromosome_of(const std::vector<int>& bits) {
    Chromosome c(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
        c.set(j, bits[j] != 0);
    }
    return c;
}

/// Small dataset from rows and labels.
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                            std::string name = "t") {
    const std::size_t d = rows.empty() ? 0 : rows.front().size();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) {
        names.push_back("f" + std::to_string(j));
    }
    std::vector<double> f;
    for (const auto& r : rows) {
        f.insert(f.end(), r.begin(), r.end());
    }
    std::vector<std::uint8_t> y(labels.begin(), labels.end());
    return Dataset(std::move(name), std::move(names), std::move(f), std::move(y));
}

/// Random Gaussian dataset with labels from a noisy linear rule.
inline Dataset random_dataset(std::size_t n, std::size_t d, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            rows[i][j] = normal(gen);
            z += rows[i][j] * (j % 2 == 0 ? 1.0 : -0.5);
        }
        labels[i] = z + 0.5 * normal(gen) > 0.0 ? 1 : 0;
    }
    labels[0] = 0;
    labels[1] = 1;
    return make_dataset(rows, labels);
}

} // namespace evoselect::testing

#pragma once

/// @file dataset.hpp
/// @brief Tabular binary-classification data: CSV loading, train-statistics
/// standardization, stratified 70/20/10 splitting and chromosome projection.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evoselect/chromosome.hpp"
#include "evoselect/error.hpp"
#include "evoselect/rng.hpp"

namespace evoselect {

/// N x d real feature matrix (row-major) with one {0,1} label per row.
/// Immutable once built; safe to share read-only across workers.
class Dataset {
  public:
    Dataset() = default;

    Dataset(std::string name, std::vector<std::string> feature_names, std::vector<double> features,
            std::vector<std::uint8_t> labels)
        : name_(std::move(name)), feature_names_(std::move(feature_names)), features_(std::move(features)),
          labels_(std::move(labels)) {
        const std::size_t d = feature_names_.size();
        if (features_.size() != labels_.size() * d) {
            throw DataError("feature matrix has " + std::to_string(features_.size()) + " cells, expected " +
                            std::to_string(labels_.size()) + " x " + std::to_string(d));
        }
        for (auto y : labels_) {
            if (y > 1) {
                throw DataError("label outside {0,1}");
            }
        }
        for (double v : features_) {
            if (!std::isfinite(v)) {
                throw DataError("feature matrix contains a non-finite value");
            }
        }
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t rows() const noexcept { return labels_.size(); }
    [[nodiscard]] std::size_t cols() const noexcept { return feature_names_.size(); }
    [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }

    [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    [[nodiscard]] std::span<const double> features() const noexcept { return features_; }
    [[nodiscard]] std::span<const std::uint8_t> labels() const noexcept { return labels_; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(features_).subspan(i * cols(), cols());
    }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept { return features_[i * cols() + j]; }

    /// Number of samples carrying label 1.
    [[nodiscard]] std::size_t positives() const noexcept {
        return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
    }
    [[nodiscard]] bool has_both_classes() const noexcept {
        const auto p = positives();
        return p > 0 && p < rows();
    }

    /// Rows selected by index, in the given order.
    [[nodiscard]] Dataset select_rows(std::span<const std::size_t> indices) const {
        std::vector<double> f;
        f.reserve(indices.size() * cols());
        std::vector<std::uint8_t> y;
        y.reserve(indices.size());
        for (auto i : indices) {
            auto r = row(i);
            f.insert(f.end(), r.begin(), r.end());
            y.push_back(labels_[i]);
        }
        return Dataset(name_, feature_names_, std::move(f), std::move(y));
    }

  private:
    std::string name_;
    std::vector<std::string> feature_names_;
    std::vector<double> features_;
    std::vector<std::uint8_t> labels_;
};

struct SplitDataset {
    Dataset train;
    Dataset val;
    Dataset test;
    std::uint64_t split_seed = 0;
    /// Source-row indices of each part, in the order the rows appear.
    std::vector<std::size_t> train_index;
    std::vector<std::size_t> val_index;
    std::vector<std::size_t> test_index;

    [[nodiscard]] std::size_t dims() const noexcept { return train.cols(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

inline bool parse_double(std::string_view s, double& out) noexcept {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    if (s.empty()) {
        return false;
    }
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

/// Map raw label strings onto {0,1}: numeric {0,1} as is, numeric {-1,+1}
/// with -1 -> 0, anything else by sorted string order.
inline std::vector<std::uint8_t> map_labels(const std::vector<std::string>& raw) {
    std::set<std::string> distinct(raw.begin(), raw.end());
    if (distinct.size() != 2) {
        throw DataError("label cardinality " + std::to_string(distinct.size()) + ", expected 2");
    }
    std::set<double> numeric;
    bool all_numeric = true;
    for (const auto& s : distinct) {
        double v = 0.0;
        if (!parse_double(s, v)) {
            all_numeric = false;
            break;
        }
        numeric.insert(v);
    }
    std::map<std::string, std::uint8_t> lookup;
    if (all_numeric && numeric.size() == 2 &&
        (numeric == std::set<double>{0.0, 1.0} || numeric == std::set<double>{-1.0, 1.0})) {
        for (const auto& s : distinct) {
            double v = 0.0;
            parse_double(s, v);
            lookup[s] = v > 0.0 ? 1 : 0;
        }
    } else {
        lookup[*distinct.begin()] = 0;
        lookup[*distinct.rbegin()] = 1;
    }
    std::vector<std::uint8_t> out;
    out.reserve(raw.size());
    for (const auto& s : raw) {
        out.push_back(lookup.at(s));
    }
    return out;
}

} // namespace detail

/// Parse CSV text (header row first). `name` becomes the dataset name.
inline Dataset parse_csv(std::istream& in, std::string_view label_column, std::string name) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty dataset: no header row");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
    const auto header = detail::split_commas(line);
    std::size_t label_at = header.size();
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == label_column && label_at == header.size()) {
            label_at = c;
        } else {
            names.emplace_back(header[c]);
        }
    }
    if (label_at == header.size()) {
        throw DataError("missing label column '" + std::string(label_column) + "'");
    }

    std::vector<double> features;
    std::vector<std::string> raw_labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size()) {
            throw DataError("row " + std::to_string(line_no) + ": " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_at) {
                raw_labels.emplace_back(cells[c]);
                continue;
            }
            double v = 0.0;
            if (!detail::parse_double(cells[c], v) || !std::isfinite(v)) {
                throw DataError("row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + " ('" +
                                std::string(header[c]) + "'): non-numeric feature value '" +
                                std::string(cells[c]) + "'");
            }
            features.push_back(v);
        }
    }
    if (raw_labels.empty()) {
        throw DataError("empty dataset: no data rows");
    }
    return Dataset(std::move(name), std::move(names), std::move(features), detail::map_labels(raw_labels));
}

/// Load a UTF-8 comma-delimited file with a header row.
inline Dataset load_csv(const std::string& path, std::string_view label_column = "label") {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file '" + path + "'");
    }
    std::string name = path;
    if (const auto slash = name.find_last_of("/\\"); slash != std::string::npos) {
        name.erase(0, slash + 1);
    }
    if (const auto dot = name.rfind('.'); dot != std::string::npos && dot > 0) {
        name.erase(dot);
    }
    return parse_csv(in, label_column, std::move(name));
}

/// Write a dataset back out as CSV, label column last.
inline void write_csv(std::ostream& out, const Dataset& data, std::string_view label_column = "label") {
    for (const auto& n : data.feature_names()) {
        out << n << ',';
    }
    out << label_column << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (double v : data.row(i)) {
            out << v << ',';
        }
        out << static_cast<int>(data.labels()[i]) << '\n';
    }
}

/// Per-column mean and sample standard deviation.
struct ColumnStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

inline ColumnStats column_stats(const Dataset& data) {
    const std::size_t n = data.rows();
    const std::size_t d = data.cols();
    ColumnStats s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    if (n == 0) {
        return s;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            s.mean[j] += data.at(i, j);
        }
    }
    for (auto& m : s.mean) {
        m /= static_cast<double>(n);
    }
    if (n < 2) {
        return s;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = data.at(i, j) - s.mean[j];
            s.stddev[j] += dv * dv;
        }
    }
    for (auto& v : s.stddev) {
        v = std::sqrt(v / static_cast<double>(n - 1));
    }
    return s;
}

/// Shift/scale every dataset by the train columns' mean and sample standard
/// deviation. Columns with zero train variance become all-zero everywhere.
inline std::pair<Dataset, std::vector<Dataset>> standardize(const Dataset& train, std::span<const Dataset> others) {
    for (const auto& o : others) {
        if (o.cols() != train.cols() || o.feature_names() != train.feature_names()) {
            throw DataError("dimension mismatch: dataset '" + o.name() + "' has " + std::to_string(o.cols()) +
                            " features, train has " + std::to_string(train.cols()));
        }
    }
    const auto stats = column_stats(train);
    const std::size_t d = train.cols();
    std::vector<bool> constant(d);
    for (std::size_t j = 0; j < d; ++j) {
        constant[j] = !(stats.stddev[j] > 1e-12 * (1.0 + std::abs(stats.mean[j])));
    }
    auto apply = [&](const Dataset& in) {
        std::vector<double> f(in.features().begin(), in.features().end());
        for (std::size_t i = 0; i < in.rows(); ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                double& v = f[i * d + j];
                v = constant[j] ? 0.0 : (v - stats.mean[j]) / stats.stddev[j];
            }
        }
        return Dataset(in.name(), in.feature_names(), std::move(f),
                       std::vector<std::uint8_t>(in.labels().begin(), in.labels().end()));
    };
    std::vector<Dataset> out;
    out.reserve(others.size());
    for (const auto& o : others) {
        out.push_back(apply(o));
    }
    return {apply(train), std::move(out)};
}

using SplitFractions = std::array<double, 3>;
inline constexpr SplitFractions default_fractions{0.7, 0.2, 0.1};

namespace detail {

/// Largest-remainder apportionment of `total` items by `fractions`.
/// Ties in the remainder go to the earlier part.
inline std::array<std::size_t, 3> largest_remainder(std::size_t total, const SplitFractions& fractions) {
    std::array<std::size_t, 3> out{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double q = static_cast<double>(total) * fractions[k];
        out[k] = static_cast<std::size_t>(std::floor(q + 1e-9));
        rem[k] = q - static_cast<double>(out[k]);
        assigned += out[k];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t i = 0; assigned < total; i = (i + 1) % 3) {
        ++out[order[i]];
        ++assigned;
    }
    while (assigned > total) {
        for (std::size_t k = 3; k-- > 0 && assigned > total;) {
            if (out[k] > 0) {
                --out[k];
                --assigned;
            }
        }
    }
    return out;
}

} // namespace detail

/// Per-class sample counts assigned to (train, val, test).
struct StratifiedAllocation {
    std::array<std::size_t, 3> negatives{};
    std::array<std::size_t, 3> positives{};
};

/// Allocation rule behind stratified_split: per-class largest remainder, at
/// least one sample of each class per part, then samples are moved between
/// parts (within a class) until part totals match the largest-remainder
/// apportionment of N wherever the at-least-one rule allows.
inline StratifiedAllocation stratified_allocation(std::size_t negatives, std::size_t positives,
                                                  const SplitFractions& fractions = default_fractions) {
    if (negatives < 3 || positives < 3) {
        throw DataError("stratified split needs at least 3 samples per class (have " + std::to_string(negatives) +
                        " of class 0, " + std::to_string(positives) + " of class 1)");
    }
    const std::array<std::size_t, 2> counts{negatives, positives};
    std::array<std::array<std::size_t, 3>, 2> alloc{};
    for (std::size_t c = 0; c < 2; ++c) {
        alloc[c] = detail::largest_remainder(counts[c], fractions);
        for (std::size_t k = 0; k < 3; ++k) {
            if (alloc[c][k] == 0) {
                const auto donor = static_cast<std::size_t>(
                    std::max_element(alloc[c].begin(), alloc[c].end()) - alloc[c].begin());
                --alloc[c][donor];
                ++alloc[c][k];
            }
        }
    }
    const auto target = detail::largest_remainder(negatives + positives, fractions);
    auto total = [&](std::size_t k) { return alloc[0][k] + alloc[1][k]; };
    for (bool moved = true; moved;) {
        moved = false;
        for (std::size_t from = 0; from < 3 && !moved; ++from) {
            if (total(from) <= target[from]) {
                continue;
            }
            for (std::size_t to = 0; to < 3 && !moved; ++to) {
                if (total(to) >= target[to]) {
                    continue;
                }
                // Move from the class that is most over its own quota in `from`.
                double best_excess = -1e300;
                std::size_t best_class = 2;
                for (std::size_t c = 0; c < 2; ++c) {
                    if (alloc[c][from] < 2) {
                        continue;
                    }
                    const double excess = static_cast<double>(alloc[c][from]) -
                                          static_cast<double>(counts[c]) * fractions[from];
                    if (excess > best_excess) {
                        best_excess = excess;
                        best_class = c;
                    }
                }
                if (best_class < 2) {
                    --alloc[best_class][from];
                    ++alloc[best_class][to];
                    moved = true;
                }
            }
        }
    }
    return StratifiedAllocation{alloc[0], alloc[1]};
}

/// Stratified train/val/test split. Each class is shuffled with a stream
/// derived from `seed`, then cut according to stratified_allocation. Parts
/// keep the shuffled order.
inline SplitDataset stratified_split(const Dataset& data, std::uint64_t seed,
                                     const SplitFractions& fractions = default_fractions) {
    const double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(sum - 1.0) > 1e-9 || fractions[0] < 0 || fractions[1] < 0 || fractions[2] < 0) {
        throw DataError("split fractions must be non-negative and sum to 1");
    }
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        by_class[data.labels()[i]].push_back(i);
    }
    const auto alloc = stratified_allocation(by_class[0].size(), by_class[1].size(), fractions);
    std::array<std::vector<std::size_t>, 3> parts;
    for (std::size_t c = 0; c < 2; ++c) {
        Stream rng(derive_seed(seed, "split", {c}));
        rng.shuffle(by_class[c].begin(), by_class[c].end());
        const auto& counts = c == 0 ? alloc.negatives : alloc.positives;
        std::size_t at = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            parts[k].insert(parts[k].end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(at),
                            by_class[c].begin() + static_cast<std::ptrdiff_t>(at + counts[k]));
            at += counts[k];
        }
    }
    SplitDataset out;
    out.split_seed = seed;
    out.train = data.select_rows(parts[0]);
    out.val = data.select_rows(parts[1]);
    out.test = data.select_rows(parts[2]);
    out.train_index = std::move(parts[0]);
    out.val_index = std::move(parts[1]);
    out.test_index = std::move(parts[2]);
    return out;
}

/// Split, then standardize val/test with the train statistics.
inline SplitDataset prepare_split(const Dataset& data, std::uint64_t seed,
                                  const SplitFractions& fractions = default_fractions) {
    auto split = stratified_split(data, seed, fractions);
    std::array<Dataset, 2> others{split.val, split.test};
    auto [train, rest] = standardize(split.train, others);
    split.train = std::move(train);
    split.val = std::move(rest[0]);
    split.test = std::move(rest[1]);
    return split;
}

/// Columns j with chromosome bit j set, ascending. Always a fresh copy.
inline Dataset subset_by_chromosome(const Dataset& data, const Chromosome& chromosome) {
    if (chromosome.size() != data.cols()) {
        throw DataError("chromosome length " + std::to_string(chromosome.size()) + " does not match " +
                        std::to_string(data.cols()) + " features");
    }
    const auto keep = chromosome.expressed();
    if (keep.empty()) {
        throw DataError("chromosome expresses no features");
    }
    std::vector<std::string> names;
    names.reserve(keep.size());
    for (auto j : keep) {
        names.push_back(data.feature_names()[j]);
    }
    std::vector<double> f;
    f.reserve(data.rows() * keep.size());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (auto j : keep) {
            f.push_back(data.at(i, j));
        }
    }
    return Dataset(data.name(), std::move(names), std::move(f),
                   std::vector<std::uint8_t>(data.labels().begin(), data.labels().end()));
}

} // namespace evoselect

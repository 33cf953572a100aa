#pragma once

/// @file reporting.hpp
/// @brief Run files and the comparison tables built from them.
///
/// A run file is one JSON object per run, `<run_id>.json`, with top-level
/// keys run_id, dataset_name, model_kind, algorithm, config,
/// best_chromosome_hex, chromosome_len, val_metrics, test_metrics,
/// mean_gen_seconds, total_seconds and (optionally) trace_path.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evoselect/chromosome.hpp"
#include "evoselect/error.hpp"
#include "evoselect/metrics.hpp"

namespace evoselect {

struct RunRecord {
    std::string run_id;
    std::string dataset_name;
    std::string model_kind;
    std::string algorithm;
    std::map<std::string, std::string> config;
    Chromosome best_chromosome;
    MetricReport val_metrics;
    MetricReport test_metrics;
    double mean_gen_seconds = 0.0;
    double total_seconds = 0.0;
    std::optional<std::string> trace_path;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

namespace detail {

inline nlohmann::ordered_json metrics_json(const MetricReport& m) {
    nlohmann::ordered_json j;
    j["accuracy"] = m.accuracy;
    j["f1"] = m.f1;
    j["roc_auc"] = m.roc_auc;
    return j;
}

inline MetricReport metrics_from_json(const nlohmann::json& j) {
    return MetricReport{j.at("accuracy").get<double>(), j.at("f1").get<double>(), j.at("roc_auc").get<double>()};
}

} // namespace detail

inline nlohmann::ordered_json to_json(const RunRecord& r) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["dataset_name"] = r.dataset_name;
    j["model_kind"] = r.model_kind;
    j["algorithm"] = r.algorithm;
    j["config"] = r.config;
    j["best_chromosome_hex"] = r.best_chromosome.to_hex();
    j["chromosome_len"] = r.best_chromosome.size();
    j["val_metrics"] = detail::metrics_json(r.val_metrics);
    j["test_metrics"] = detail::metrics_json(r.test_metrics);
    j["mean_gen_seconds"] = r.mean_gen_seconds;
    j["total_seconds"] = r.total_seconds;
    if (r.trace_path) {
        j["trace_path"] = *r.trace_path;
    }
    return j;
}

inline RunRecord run_from_json(const nlohmann::json& j) {
    static const std::set<std::string> required{"run_id",         "dataset_name",  "model_kind",  "algorithm",
                                                "config",         "best_chromosome_hex", "chromosome_len",
                                                "val_metrics",    "test_metrics",  "mean_gen_seconds",
                                                "total_seconds"};
    if (!j.is_object()) {
        throw DataError("run file: top level is not an object");
    }
    for (const auto& key : required) {
        if (!j.contains(key)) {
            throw DataError("run file: missing key '" + key + "'");
        }
    }
    for (const auto& [key, value] : j.items()) {
        if (required.count(key) == 0 && key != "trace_path") {
            throw DataError("run file: unexpected key '" + key + "'");
        }
    }
    try {
        RunRecord r;
        r.run_id = j.at("run_id").get<std::string>();
        r.dataset_name = j.at("dataset_name").get<std::string>();
        r.model_kind = j.at("model_kind").get<std::string>();
        r.algorithm = j.at("algorithm").get<std::string>();
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        r.best_chromosome = Chromosome::from_hex(j.at("best_chromosome_hex").get<std::string>(),
                                                 j.at("chromosome_len").get<std::size_t>());
        r.val_metrics = detail::metrics_from_json(j.at("val_metrics"));
        r.test_metrics = detail::metrics_from_json(j.at("test_metrics"));
        r.mean_gen_seconds = j.at("mean_gen_seconds").get<double>();
        r.total_seconds = j.at("total_seconds").get<double>();
        if (j.contains("trace_path")) {
            r.trace_path = j.at("trace_path").get<std::string>();
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("run file: ") + e.what());
    }
}

/// Write `<out_dir>/<run_id>.json`, replacing any previous file of that id.
inline std::filesystem::path write_run(const RunRecord& record, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto path = out_dir / (record.run_id + ".json");
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot write run file '" + path.string() + "'");
    }
    out << to_json(record).dump(2) << '\n';
    if (!out) {
        throw Error("failed writing run file '" + path.string() + "'");
    }
    return path;
}

inline RunRecord read_run(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open run file '" + path.string() + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("run file '" + path.string() + "': " + e.what());
    }
    return run_from_json(j);
}

/// Rectangular table of optional numbers; absent cells print as `missing`.
struct Table {
    std::string corner;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<std::optional<double>>> cells;
    std::string missing = "nan";
    int precision = 6;

    [[nodiscard]] std::string cell_text(std::size_t r, std::size_t c) const {
        const auto& v = cells[r][c];
        if (!v || std::isnan(*v)) {
            return missing;
        }
        std::ostringstream s;
        s << std::fixed << std::setprecision(precision) << *v;
        return s.str();
    }

    void write_csv(std::ostream& out) const {
        out << corner;
        for (const auto& c : col_labels) {
            out << ',' << c;
        }
        out << '\n';
        for (std::size_t r = 0; r < row_labels.size(); ++r) {
            out << row_labels[r];
            for (std::size_t c = 0; c < col_labels.size(); ++c) {
                out << ',' << cell_text(r, c);
            }
            out << '\n';
        }
    }

    void write_markdown(std::ostream& out) const {
        std::vector<std::vector<std::string>> grid;
        grid.emplace_back();
        grid.back().push_back(corner);
        grid.back().insert(grid.back().end(), col_labels.begin(), col_labels.end());
        for (std::size_t r = 0; r < row_labels.size(); ++r) {
            grid.emplace_back();
            grid.back().push_back(row_labels[r]);
            for (std::size_t c = 0; c < col_labels.size(); ++c) {
                grid.back().push_back(cell_text(r, c));
            }
        }
        std::vector<std::size_t> width(col_labels.size() + 1, 3);
        for (const auto& row : grid) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                width[c] = std::max(width[c], row[c].size());
            }
        }
        auto emit = [&](const std::vector<std::string>& row) {
            out << '|';
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << ' ' << row[c] << std::string(width[c] - row[c].size(), ' ') << " |";
            }
            out << '\n';
        };
        emit(grid.front());
        out << '|';
        for (auto w : width) {
            out << std::string(w + 2, '-') << '|';
        }
        out << '\n';
        for (std::size_t r = 1; r < grid.size(); ++r) {
            emit(grid[r]);
        }
    }
};

namespace detail {

inline std::string row_key(const RunRecord& r) { return r.model_kind + "/" + r.algorithm; }

template <typename Value>
Table grouped_table(std::span<const RunRecord> records, const std::vector<std::string>& suffixes, Value value) {
    std::set<std::string> rows;
    std::set<std::string> datasets;
    for (const auto& r : records) {
        rows.insert(row_key(r));
        datasets.insert(r.dataset_name);
    }
    Table t;
    t.corner = "model/algorithm";
    t.row_labels.assign(rows.begin(), rows.end());
    for (const auto& ds : datasets) {
        for (const auto& suffix : suffixes) {
            t.col_labels.push_back(suffix.empty() ? ds : ds + "/" + suffix);
        }
    }
    t.cells.assign(t.row_labels.size(), std::vector<std::optional<double>>(t.col_labels.size()));
    std::size_t ri = 0;
    for (const auto& row : t.row_labels) {
        std::size_t di = 0;
        for (const auto& ds : datasets) {
            for (std::size_t s = 0; s < suffixes.size(); ++s) {
                double sum = 0.0;
                std::size_t n = 0;
                for (const auto& r : records) {
                    if (row_key(r) == row && r.dataset_name == ds) {
                        sum += value(r, s);
                        ++n;
                    }
                }
                if (n > 0) {
                    t.cells[ri][di * suffixes.size() + s] = sum / static_cast<double>(n);
                }
            }
            ++di;
        }
        ++ri;
    }
    return t;
}

} // namespace detail

/// Mean seconds per generation by (model/algorithm) x dataset.
inline Table runtime_table(std::span<const RunRecord> records) {
    return detail::grouped_table(records, {""}, [](const RunRecord& r, std::size_t) { return r.mean_gen_seconds; });
}

/// Test-split accuracy, F1 and ROC AUC by (model/algorithm) x dataset.
inline Table metrics_table(std::span<const RunRecord> records) {
    return detail::grouped_table(records, {"accuracy", "f1", "roc_auc"}, [](const RunRecord& r, std::size_t s) {
        return s == 0 ? r.test_metrics.accuracy : s == 1 ? r.test_metrics.f1 : r.test_metrics.roc_auc;
    });
}

/// Pairwise Jaccard overlap of best chromosomes for the records of one
/// (model, dataset) group. Labels listed in `expected` that have no record
/// get blank rows and columns.
inline Table jaccard_matrix(std::span<const RunRecord> records, const std::vector<std::string>& expected = {}) {
    if (records.empty()) {
        throw DataError("jaccard matrix needs at least one record");
    }
    const std::size_t d = records.front().best_chromosome.size();
    for (const auto& r : records) {
        if (r.best_chromosome.size() != d) {
            throw DataError("chromosome length mismatch: run '" + r.run_id + "' has " +
                            std::to_string(r.best_chromosome.size()) + ", run '" + records.front().run_id + "' has " +
                            std::to_string(d));
        }
    }
    std::map<std::string, std::size_t> seen;
    for (const auto& r : records) {
        ++seen[r.algorithm];
    }
    std::vector<std::string> labels;
    std::vector<const RunRecord*> source;
    for (const auto& r : records) {
        labels.push_back(seen[r.algorithm] > 1 ? r.algorithm + ":" + r.run_id : r.algorithm);
        source.push_back(&r);
    }
    for (const auto& e : expected) {
        if (seen.count(e) == 0) {
            labels.push_back(e);
            source.push_back(nullptr);
            seen[e] = 0;
        }
    }
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

    Table t;
    t.corner = "jaccard";
    t.missing = "";
    for (auto i : order) {
        t.row_labels.push_back(labels[i]);
    }
    t.col_labels = t.row_labels;
    t.cells.assign(order.size(), std::vector<std::optional<double>>(order.size()));
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = 0; b < order.size(); ++b) {
            const auto* ra = source[order[a]];
            const auto* rb = source[order[b]];
            if (ra != nullptr && rb != nullptr) {
                t.cells[a][b] = a == b ? 1.0 : jaccard(ra->best_chromosome, rb->best_chromosome);
            }
        }
    }
    return t;
}

} // namespace evoselect

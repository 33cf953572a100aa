#pragma once

/// @file baselines.hpp
/// @brief Comparison algorithms: random restart search, greedy forward
/// selection and the all-features model.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evoselect/error.hpp"
#include "evoselect/executor.hpp"
#include "evoselect/fitness.hpp"
#include "evoselect/ga.hpp"

namespace evoselect {

enum class BaselineAlgorithm { random, forward_selection, all_features };

inline std::string_view to_string(BaselineAlgorithm a) noexcept {
    switch (a) {
    case BaselineAlgorithm::random:
        return "random";
    case BaselineAlgorithm::forward_selection:
        return "rfs";
    case BaselineAlgorithm::all_features:
        return "baseline";
    }
    return "?";
}

struct BaselineResult {
    BaselineAlgorithm algorithm = BaselineAlgorithm::all_features;
    FitnessRecord best;
    double wall_seconds = 0.0;
    std::optional<EvolutionTrace> trace;
    std::optional<MetricReport> test_metrics;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

/// E rounds of fresh random populations of size L; keeps the best record
/// over all E x L evaluations. Round 0 is the GA's initial population.
inline BaselineResult random_search(const SplitDataset& split, const ModelSpec& spec, const GaConfig& config,
                                    const Executor& executor) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    BaselineResult out;
    out.algorithm = BaselineAlgorithm::random;
    out.trace.emplace();
    bool have_best = false;
    for (std::size_t round = 0; round < config.max_generations; ++round) {
        const auto round_start = std::chrono::steady_clock::now();
        const auto pop = sample_population(split.dims(), config.population_size, config.base_seed, "init", round);
        std::vector<FitnessRecord> records;
        try {
            records = evaluate_population(make_tasks(pop, config.base_seed), split, spec, config.fitness_metric, executor);
        } catch (const EvaluationError& e) {
            throw EvaluationError(e.member_index(), "round " + std::to_string(round) + ": " + e.detail());
        }
        const auto ranked = rank(std::move(records));
        out.trace->rows.push_back(summarize(round, ranked, detail::seconds_since(round_start)));
        if (!have_best || ranked.front().score > out.best.score) {
            out.best = ranked.front();
            have_best = true;
        }
    }
    out.wall_seconds = detail::seconds_since(start);
    return out;
}

/// Greedy forward selection. Each step adds the feature whose inclusion
/// gives the best validation score (lowest index on ties); stops after
/// `max_features` features or when no candidate improves the score. The
/// candidates of one step are evaluated on `executor`.
inline BaselineResult forward_selection(const SplitDataset& split, const ModelSpec& spec, std::size_t max_features,
                                        Metric metric, const Executor& executor, std::uint64_t base_seed = 0) {
    const std::size_t d = split.dims();
    if (split.train.empty() || split.val.empty()) {
        throw DataError("forward selection on an empty dataset");
    }
    if (max_features < 1 || max_features > d) {
        throw ConfigError("max_features must lie in [1, " + std::to_string(d) + "]");
    }
    const auto start = std::chrono::steady_clock::now();
    BaselineResult out;
    out.algorithm = BaselineAlgorithm::forward_selection;
    out.trace.emplace();
    Chromosome selected(d);
    double current = -std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < max_features; ++step) {
        const auto step_start = std::chrono::steady_clock::now();
        std::vector<EvalTask> tasks;
        for (std::size_t j = 0; j < d; ++j) {
            if (selected[j]) {
                continue;
            }
            Chromosome c = selected;
            c.set(j, true);
            const auto seed = evaluation_seed(base_seed, c);
            tasks.push_back(EvalTask{j, std::move(c), seed});
        }
        if (tasks.empty()) {
            break;
        }
        const auto ranked = rank(evaluate_population(std::move(tasks), split, spec, metric, executor));
        out.trace->rows.push_back(summarize(step, ranked, detail::seconds_since(step_start)));
        if (step > 0 && !(ranked.front().score > current)) {
            break;
        }
        current = ranked.front().score;
        selected = ranked.front().chromosome;
        out.best = ranked.front();
    }
    out.wall_seconds = detail::seconds_since(start);
    return out;
}

/// Default cap on forward-selection steps.
inline std::size_t default_max_features(std::size_t d) noexcept { return d < 64 ? d : 64; }

/// One model on every feature, scored on validation and test.
inline BaselineResult all_features_baseline(const SplitDataset& split, const ModelSpec& spec, Metric metric,
                                            std::uint64_t base_seed = 0) {
    const auto start = std::chrono::steady_clock::now();
    BaselineResult out;
    out.algorithm = BaselineAlgorithm::all_features;
    const auto all = Chromosome::all_ones(split.dims());
    out.best = evaluate_task(EvalTask{0, all, evaluation_seed(base_seed, all)}, split, spec, metric);
    out.test_metrics = evaluate_on_test(split, spec, all, base_seed);
    out.wall_seconds = detail::seconds_since(start);
    return out;
}

} // namespace evoselect

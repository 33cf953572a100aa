#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>

#include "evoselect/chromosome.hpp"
#include "evoselect/dataset.hpp"
#include "evoselect/metrics.hpp"
#include "evoselect/models.hpp"
#include "evoselect/rng.hpp"

namespace evoselect {

/// Outcome of evaluating one chromosome.
struct FitnessRecord {
    Chromosome chromosome;
    double score = 0.0;        ///< the configured fitness metric taken from `metrics`
    double eval_seconds = 0.0; ///< wall time of train + score
    MetricReport metrics;
    std::size_t member_index = 0;

    /// Equality of everything except timing.
    [[nodiscard]] bool same_result(const FitnessRecord& o) const noexcept {
        return chromosome == o.chromosome && score == o.score && metrics == o.metrics &&
               member_index == o.member_index;
    }
};

/// One unit of executor work.
struct EvalTask {
    std::size_t member_index = 0;
    Chromosome chromosome;
    std::uint64_t eval_seed = 0;
};

/// Training seed for a chromosome. Keyed by gene content, so a chromosome's
/// fitness does not depend on where or when it is evaluated.
[[nodiscard]] inline std::uint64_t evaluation_seed(std::uint64_t base_seed, const Chromosome& c) noexcept {
    return derive_seed(base_seed, "eval", {c.fingerprint()});
}

/// Train on the masked train split, score the masked `target` split.
[[nodiscard]] inline MetricReport fit_and_score(const Dataset& train_data, const Dataset& target, const ModelSpec& spec,
                                                const Chromosome& chromosome, std::uint64_t seed) {
    const auto model = train(spec, subset_by_chromosome(train_data, chromosome), seed);
    const auto masked = subset_by_chromosome(target, chromosome);
    return evaluate_scores(predict_scores(model, masked), masked.labels());
}

/// Fitness of one task: train on masked train, score masked validation.
[[nodiscard]] inline FitnessRecord evaluate_task(const EvalTask& task, const SplitDataset& split, const ModelSpec& spec,
                                                 Metric metric) {
    const auto start = std::chrono::steady_clock::now();
    FitnessRecord rec;
    rec.chromosome = task.chromosome;
    rec.member_index = task.member_index;
    rec.metrics = fit_and_score(split.train, split.val, spec, task.chromosome, task.eval_seed);
    rec.score = rec.metrics.get(metric);
    rec.eval_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Held-out test metrics for a final chromosome, trained exactly as during search.
[[nodiscard]] inline MetricReport evaluate_on_test(const SplitDataset& split, const ModelSpec& spec,
                                                   const Chromosome& chromosome, std::uint64_t base_seed) {
    return fit_and_score(split.train, split.test, spec, chromosome, evaluation_seed(base_seed, chromosome));
}

} // namespace evoselect

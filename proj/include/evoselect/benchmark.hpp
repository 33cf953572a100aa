#pragma once

/// @file benchmark.hpp
/// @brief Runs the same seeded GA under several executor configurations and
/// compares per-generation wall time. Traces must agree across configurations
/// before any timing is reported.

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <vector>

#include "evoselect/error.hpp"
#include "evoselect/executor.hpp"
#include "evoselect/ga.hpp"

namespace evoselect {

struct BenchmarkRow {
    ExecutorConfig executor;
    std::size_t generations = 0;
    double mean_gen_seconds = 0.0;
    double min_gen_seconds = 0.0;
    double max_gen_seconds = 0.0;
    double sum_task_seconds = 0.0; ///< total of per-evaluation times over the run
    double speedup = 1.0;          ///< reference mean / this mean
};

/// The reference for speedups is the first sequential configuration, or the
/// first configuration when none is sequential.
inline std::vector<BenchmarkRow> benchmark(const SplitDataset& split, const ModelSpec& spec, const GaConfig& ga_config,
                                           std::span<const ExecutorConfig> modes, std::size_t generations) {
    if (generations < 1) {
        throw ConfigError("benchmark needs at least one generation");
    }
    if (modes.empty()) {
        throw ConfigError("benchmark needs at least one executor configuration");
    }
    GaConfig cfg = ga_config;
    cfg.max_generations = generations;
    cfg.score_threshold.reset();

    std::vector<BenchmarkRow> rows;
    std::optional<EvolveResult> reference;
    for (const auto& mode : modes) {
        double task_seconds = 0.0;
        auto run = evolve(split, spec, cfg, Executor(mode),
                          [&](const Population&, const std::vector<FitnessRecord>& ranked) {
                              for (const auto& r : ranked) {
                                  task_seconds += r.eval_seconds;
                              }
                          });
        if (!reference) {
            reference = run;
        } else if (!reference->trace.same_results(run.trace) || !reference->best.same_result(run.best)) {
            throw Error("determinism regression: executor " + mode.label() + " produced a different trace than " +
                        modes.front().label());
        }
        BenchmarkRow row;
        row.executor = mode;
        row.generations = run.trace.rows.size();
        row.mean_gen_seconds = run.trace.mean_wall_seconds();
        row.min_gen_seconds = std::numeric_limits<double>::infinity();
        row.max_gen_seconds = 0.0;
        for (const auto& r : run.trace.rows) {
            row.min_gen_seconds = std::min(row.min_gen_seconds, r.wall_seconds);
            row.max_gen_seconds = std::max(row.max_gen_seconds, r.wall_seconds);
        }
        row.sum_task_seconds = task_seconds;
        rows.push_back(row);
    }
    std::size_t ref = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].mode == ExecutionMode::sequential) {
            ref = i;
            break;
        }
    }
    for (auto& r : rows) {
        r.speedup = r.mean_gen_seconds > 0.0 ? rows[ref].mean_gen_seconds / r.mean_gen_seconds
                                             : std::numeric_limits<double>::quiet_NaN();
    }
    return rows;
}

inline void write_benchmark_csv(std::ostream& out, std::span<const BenchmarkRow> rows) {
    out << "mode,workers,generations,mean_gen_seconds,min_gen_seconds,max_gen_seconds,sum_task_seconds,speedup\n";
    std::ostringstream s;
    s << std::setprecision(6);
    for (const auto& r : rows) {
        s << to_string(r.executor.mode) << ',' << r.executor.workers << ',' << r.generations << ','
          << r.mean_gen_seconds << ',' << r.min_gen_seconds << ',' << r.max_gen_seconds << ',' << r.sum_task_seconds
          << ',' << r.speedup << '\n';
    }
    out << s.str();
}

} // namespace evoselect

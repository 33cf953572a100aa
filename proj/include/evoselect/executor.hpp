#pragma once

/// @file executor.hpp
/// @brief Sequential or thread-pool evaluation of a population's fitness.
///
/// Tasks carry their own seed and workers hold no random state, so the
/// returned records are identical for every mode and worker count. Results
/// are collected into slots indexed by task position; completion order never
/// leaks into the output.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include "evoselect/error.hpp"
#include "evoselect/fitness.hpp"

namespace evoselect {

enum class ExecutionMode { sequential, parallel };

inline std::string_view to_string(ExecutionMode m) noexcept { return m == ExecutionMode::sequential ? "seq" : "par"; }

inline ExecutionMode parse_execution_mode(std::string_view s) {
    if (s == "seq" || s == "sequential") {
        return ExecutionMode::sequential;
    }
    if (s == "par" || s == "parallel") {
        return ExecutionMode::parallel;
    }
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected seq or par)");
}

/// Logical processors, or 1 when the platform cannot tell.
inline std::size_t logical_processors() noexcept {
    const auto n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// EVOSELECT_WORKERS if set to a positive integer, else logical_processors().
inline std::size_t default_workers() {
    if (const char* env = std::getenv("EVOSELECT_WORKERS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == nullptr || *end != '\0' || v < 1) {
            throw ConfigError(std::string("EVOSELECT_WORKERS must be a positive integer, got '") + env + "'");
        }
        return static_cast<std::size_t>(v);
    }
    return logical_processors();
}

struct ExecutorConfig {
    ExecutionMode mode = ExecutionMode::sequential;
    std::size_t workers = 1;

    static ExecutorConfig sequential() { return {}; }
    static ExecutorConfig parallel(std::size_t workers) { return {ExecutionMode::parallel, workers}; }

    void validate() const {
        if (workers < 1) {
            throw ConfigError("workers must be >= 1");
        }
        if (mode == ExecutionMode::sequential && workers != 1) {
            throw ConfigError("sequential mode runs exactly one worker");
        }
    }

    [[nodiscard]] std::string label() const {
        return mode == ExecutionMode::sequential ? std::string("seq") : "par" + std::to_string(workers);
    }

    friend bool operator==(const ExecutorConfig&, const ExecutorConfig&) = default;
};

class Executor {
  public:
    explicit Executor(ExecutorConfig config = {}) : config_(config) { config_.validate(); }

    [[nodiscard]] const ExecutorConfig& config() const noexcept { return config_; }

    /// Run fn(i) for i in [0, count) and return the results in index order.
    /// A failing task stops further tasks from starting; the lowest failing
    /// index is reported as an EvaluationError once running tasks finish.
    template <typename Fn>
    auto map(std::size_t count, Fn&& fn) const -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
        using Result = std::invoke_result_t<Fn&, std::size_t>;
        std::vector<std::optional<Result>> slots(count);
        std::vector<std::exception_ptr> errors(count);
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};

        auto work = [&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) {
                    return;
                }
                try {
                    slots[i].emplace(fn(i));
                } catch (...) {
                    errors[i] = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                }
            }
        };

        const std::size_t threads = config_.mode == ExecutionMode::sequential ? 1 : std::min(config_.workers, count);
        if (threads <= 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (std::size_t t = 0; t < threads; ++t) {
                pool.emplace_back(work);
            }
        }

        for (std::size_t i = 0; i < count; ++i) {
            if (!errors[i]) {
                continue;
            }
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw EvaluationError(i, e.what());
            } catch (...) {
                throw EvaluationError(i, "worker crashed with a non-standard exception");
            }
        }
        std::vector<Result> out;
        out.reserve(count);
        for (auto& s : slots) {
            out.push_back(std::move(*s));
        }
        return out;
    }

  private:
    ExecutorConfig config_;
};

/// Evaluate every task; records come back ordered by member_index.
inline std::vector<FitnessRecord> evaluate_population(std::vector<EvalTask> tasks, const SplitDataset& split,
                                                      const ModelSpec& spec, Metric metric, const Executor& executor) {
    if (tasks.empty()) {
        throw EvaluationError(0, "empty task batch");
    }
    std::sort(tasks.begin(), tasks.end(),
              [](const EvalTask& a, const EvalTask& b) { return a.member_index < b.member_index; });
    for (std::size_t i = 1; i < tasks.size(); ++i) {
        if (tasks[i].member_index == tasks[i - 1].member_index) {
            throw EvaluationError(tasks[i].member_index, "duplicate member index in batch");
        }
    }
    try {
        return executor.map(tasks.size(), [&](std::size_t i) { return evaluate_task(tasks[i], split, spec, metric); });
    } catch (const EvaluationError& e) {
        // map reports positions; translate to member indices.
        throw EvaluationError(tasks[e.member_index()].member_index, e.detail());
    }
}

inline std::vector<FitnessRecord> evaluate_population(std::vector<EvalTask> tasks, const SplitDataset& split,
                                                      const ModelSpec& spec, Metric metric,
                                                      const ExecutorConfig& config) {
    return evaluate_population(std::move(tasks), split, spec, metric, Executor(config));
}

} // namespace evoselect

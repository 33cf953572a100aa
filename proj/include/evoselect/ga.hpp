#pragma once

/// @file ga.hpp
/// @brief Genetic algorithm for feature selection.
///
/// A generation is: evaluate every member on the executor, rank by fitness,
/// keep the top K members unchanged, and fill the remaining L - K slots with
/// children. Each child comes from two parents drawn uniformly from the top
/// half of the ranking, combined by parity crossover and then mutated.
///
/// Every random draw uses a stream derived from (base_seed, purpose,
/// generation, slot), so a run is a pure function of its inputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "evoselect/chromosome.hpp"
#include "evoselect/dataset.hpp"
#include "evoselect/error.hpp"
#include "evoselect/executor.hpp"
#include "evoselect/fitness.hpp"
#include "evoselect/metrics.hpp"
#include "evoselect/models.hpp"
#include "evoselect/rng.hpp"

namespace evoselect {

struct GaConfig {
    std::size_t population_size = 150;
    double mutation_rate = 0.2;
    std::size_t elitism = 2;
    std::size_t max_generations = 150;
    Metric fitness_metric = Metric::f1;
    std::optional<double> score_threshold;
    std::uint64_t base_seed = 0;

    void validate() const {
        if (population_size < 2) {
            throw ConfigError("population size must be >= 2");
        }
        if (elitism >= population_size) {
            throw ConfigError("elitism (" + std::to_string(elitism) + ") must be smaller than the population size (" +
                              std::to_string(population_size) + ")");
        }
        if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
            throw ConfigError("mutation rate must lie in [0, 1]");
        }
        if (max_generations < 1) {
            throw ConfigError("max generations must be >= 1");
        }
    }
};

struct Population {
    std::vector<Chromosome> members;
    std::size_t generation = 0;
};

struct TraceRow {
    std::size_t generation = 0;
    double best = 0.0;
    double worst = 0.0;
    double mean = 0.0;
    double wall_seconds = 0.0;
    Chromosome best_chromosome;
};

/// Per-generation fitness summary.
struct EvolutionTrace {
    std::vector<TraceRow> rows;

    /// Row-wise equality ignoring wall time.
    [[nodiscard]] bool same_results(const EvolutionTrace& o) const noexcept {
        if (rows.size() != o.rows.size()) {
            return false;
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& a = rows[i];
            const auto& b = o.rows[i];
            if (a.generation != b.generation || a.best != b.best || a.worst != b.worst || a.mean != b.mean ||
                a.best_chromosome != b.best_chromosome) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] double mean_wall_seconds() const noexcept {
        if (rows.empty()) {
            return 0.0;
        }
        double s = 0.0;
        for (const auto& r : rows) {
            s += r.wall_seconds;
        }
        return s / static_cast<double>(rows.size());
    }

    void write_csv(std::ostream& out) const {
        out << "generation,best,worst,mean,wall_seconds,best_chromosome_hex\n";
        std::ostringstream line;
        line << std::setprecision(17);
        for (const auto& r : rows) {
            line.str("");
            line << r.generation << ',' << r.best << ',' << r.worst << ',' << r.mean << ',' << r.wall_seconds << ','
                 << r.best_chromosome.to_hex() << '\n';
            out << line.str();
        }
    }

    static EvolutionTrace read_csv(std::istream& in, std::size_t chromosome_length) {
        std::string line;
        if (!std::getline(in, line) || line.rfind("generation,best,worst,mean,wall_seconds,best_chromosome_hex", 0) != 0) {
            throw DataError("trace CSV: unexpected header");
        }
        EvolutionTrace t;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") {
                continue;
            }
            if (line.back() == '\r') {
                line.pop_back();
            }
            std::istringstream s(line);
            std::string cell[6];
            for (auto& c : cell) {
                std::getline(s, c, ',');
            }
            TraceRow r;
            try {
                r.generation = std::stoul(cell[0]);
                r.best = std::stod(cell[1]);
                r.worst = std::stod(cell[2]);
                r.mean = std::stod(cell[3]);
                r.wall_seconds = std::stod(cell[4]);
            } catch (const std::exception&) {
                throw DataError("trace CSV: malformed row '" + line + "'");
            }
            r.best_chromosome = Chromosome::from_hex(cell[5], chromosome_length);
            t.rows.push_back(std::move(r));
        }
        return t;
    }
};

/// L chromosomes of length d with Bernoulli(0.5) genes. Member m of `round`
/// draws from stream (base_seed, tag, round, m, nonce), bumping the nonce
/// until the draw is not all-zero.
inline Population sample_population(std::size_t d, std::size_t size, std::uint64_t base_seed, std::string_view tag,
                                    std::uint64_t round) {
    if (d < 1) {
        throw ConfigError("chromosome length must be >= 1");
    }
    if (size < 2) {
        throw ConfigError("population size must be >= 2");
    }
    Population pop;
    pop.members.reserve(size);
    for (std::size_t m = 0; m < size; ++m) {
        Chromosome c(d);
        for (std::uint64_t nonce = 0; c.none(); ++nonce) {
            Stream rng(derive_seed(base_seed, tag, {round, m, nonce}));
            for (std::size_t j = 0; j < d; ++j) {
                c.set(j, rng.bernoulli(0.5));
            }
        }
        pop.members.push_back(std::move(c));
    }
    return pop;
}

inline Population init_population(std::size_t d, const GaConfig& config) {
    return sample_population(d, config.population_size, config.base_seed, "init", 0);
}

/// Parity crossover: even genes from parent 1, odd genes from parent 2.
/// An all-zero child is replaced by the fitter parent (parent 1 on ties).
inline Chromosome crossover(const Chromosome& p1, const Chromosome& p2, double fitness1 = 0.0, double fitness2 = 0.0) {
    if (p1.size() != p2.size()) {
        throw DataError("crossover: parent lengths differ (" + std::to_string(p1.size()) + " vs " +
                        std::to_string(p2.size()) + ")");
    }
    Chromosome child(p1.size());
    for (std::size_t j = 0; j < p1.size(); ++j) {
        child.set(j, j % 2 == 0 ? p1[j] : p2[j]);
    }
    if (child.none()) {
        return fitness2 > fitness1 ? p2 : p1;
    }
    return child;
}

/// Flip each gene with probability `rate`; an all-zero result gets one
/// uniformly chosen gene switched on from the same stream.
inline Chromosome mutate(const Chromosome& c, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ConfigError("mutation rate must lie in [0, 1]");
    }
    Stream rng(seed);
    Chromosome out = c;
    for (std::size_t j = 0; j < out.size(); ++j) {
        if (rng.bernoulli(rate)) {
            out.flip(j);
        }
    }
    if (out.none() && out.size() > 0) {
        out.set(static_cast<std::size_t>(rng.below(out.size())), true);
    }
    return out;
}

/// Sort by score descending, then member index ascending.
inline std::vector<FitnessRecord> rank(std::vector<FitnessRecord> records) {
    std::sort(records.begin(), records.end(), [](const FitnessRecord& a, const FitnessRecord& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.member_index < b.member_index;
    });
    return records;
}

/// Build generation `generation + 1` from the ranked records of `generation`.
inline Population next_generation(const std::vector<FitnessRecord>& ranked, const GaConfig& config,
                                  std::size_t generation) {
    config.validate();
    const std::size_t L = config.population_size;
    const std::size_t K = config.elitism;
    if (ranked.size() != L) {
        throw ConfigError("ranked population has " + std::to_string(ranked.size()) + " records, expected " +
                          std::to_string(L));
    }
    Population next;
    next.generation = generation + 1;
    next.members.reserve(L);
    for (std::size_t e = 0; e < K; ++e) {
        next.members.push_back(ranked[e].chromosome);
    }
    const std::size_t pool = (L + 1) / 2;
    for (std::size_t child = 0; child < L - K; ++child) {
        Stream pick(derive_seed(config.base_seed, "select", {generation, child}));
        const auto& a = ranked[pick.below(pool)];
        const auto& b = ranked[pick.below(pool)];
        auto c = crossover(a.chromosome, b.chromosome, a.score, b.score);
        next.members.push_back(mutate(c, config.mutation_rate, derive_seed(config.base_seed, "mutate", {generation, child})));
    }
    return next;
}

/// Tasks for a population, seeded by chromosome content.
inline std::vector<EvalTask> make_tasks(const Population& pop, std::uint64_t base_seed) {
    std::vector<EvalTask> tasks;
    tasks.reserve(pop.members.size());
    for (std::size_t m = 0; m < pop.members.size(); ++m) {
        tasks.push_back(EvalTask{m, pop.members[m], evaluation_seed(base_seed, pop.members[m])});
    }
    return tasks;
}

/// Summary row for one evaluated generation. `ranked` must be rank()-ordered.
inline TraceRow summarize(std::size_t generation, const std::vector<FitnessRecord>& ranked, double wall_seconds) {
    TraceRow row;
    row.generation = generation;
    row.best = ranked.front().score;
    row.worst = ranked.back().score;
    double sum = 0.0;
    for (const auto& r : ranked) {
        sum += r.score;
    }
    row.mean = std::clamp(sum / static_cast<double>(ranked.size()), row.worst, row.best);
    row.wall_seconds = wall_seconds;
    row.best_chromosome = ranked.front().chromosome;
    return row;
}

struct EvolveResult {
    FitnessRecord best;
    EvolutionTrace trace;
};

/// Called after each generation is evaluated, with its population and ranking.
using GenerationObserver = std::function<void(const Population&, const std::vector<FitnessRecord>& ranked)>;

inline EvolveResult evolve(const SplitDataset& split, const ModelSpec& spec, const GaConfig& config,
                           const Executor& executor, const GenerationObserver& observer = {}) {
    config.validate();
    spec.validate();
    EvolveResult result;
    auto pop = init_population(split.dims(), config);
    bool have_best = false;
    for (std::size_t g = 0; g < config.max_generations; ++g) {
        const auto start = std::chrono::steady_clock::now();
        std::vector<FitnessRecord> records;
        try {
            records = evaluate_population(make_tasks(pop, config.base_seed), split, spec, config.fitness_metric, executor);
        } catch (const EvaluationError& e) {
            throw EvaluationError(e.member_index(), "generation " + std::to_string(g) + ": " + e.detail());
        }
        auto ranked = rank(std::move(records));
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.trace.rows.push_back(summarize(g, ranked, wall));
        if (!have_best || ranked.front().score > result.best.score) {
            result.best = ranked.front();
            have_best = true;
        }
        if (observer) {
            observer(pop, ranked);
        }
        if (config.score_threshold && ranked.front().score >= *config.score_threshold) {
            break;
        }
        if (g + 1 < config.max_generations) {
            pop = next_generation(ranked, config, g);
        }
    }
    return result;
}

} // namespace evoselect

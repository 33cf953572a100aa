#pragma once

/// @file cli.hpp
/// @brief The `evoselect` command line: run, benchmark, compare, gen-synth.
///
/// Precedence for every option is command line > `--config` file > built-in
/// defaults. A config file is flat `key=value` text whose keys are the long
/// option names without dashes; `#` starts a comment.

#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "evoselect/baselines.hpp"
#include "evoselect/benchmark.hpp"
#include "evoselect/dataset.hpp"
#include "evoselect/error.hpp"
#include "evoselect/executor.hpp"
#include "evoselect/ga.hpp"
#include "evoselect/models.hpp"
#include "evoselect/reporting.hpp"
#include "evoselect/synth.hpp"

namespace evoselect::cli {

enum class Algorithm { ga, random, rfs, baseline };

inline std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::ga:
        return "ga";
    case Algorithm::random:
        return "random";
    case Algorithm::rfs:
        return "rfs";
    case Algorithm::baseline:
        return "baseline";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "ga") {
        return Algorithm::ga;
    }
    if (s == "random") {
        return Algorithm::random;
    }
    if (s == "rfs") {
        return Algorithm::rfs;
    }
    if (s == "baseline") {
        return Algorithm::baseline;
    }
    throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected ga, random, rfs or baseline)");
}

/// Everything a run needs. Split fractions are fixed at 70/20/10.
struct CliConfig {
    std::string dataset;
    std::string label_column = "label";
    ModelSpec model = ModelSpec::logistic();
    Algorithm algorithm = Algorithm::ga;
    GaConfig ga;
    ExecutorConfig executor;
    std::optional<std::uint64_t> split_seed; ///< defaults to the base seed
    std::optional<std::size_t> max_features; ///< rfs step cap
    std::string out_dir = "runs";
    std::string run_id;

    [[nodiscard]] std::uint64_t effective_split_seed() const noexcept { return split_seed.value_or(ga.base_seed); }

    /// Algorithm label used in run files and tables.
    [[nodiscard]] std::string algorithm_label() const {
        if (algorithm == Algorithm::ga) {
            return executor.mode == ExecutionMode::sequential ? "ga-seq" : "ga-par";
        }
        return std::string(to_string(algorithm));
    }

    [[nodiscard]] std::string default_run_id(const std::string& dataset_name) const {
        return dataset_name + "_" + std::string(evoselect::to_string(model.kind)) + "_" + algorithm_label() + "_s" +
               std::to_string(ga.base_seed);
    }

    void validate() const {
        model.validate();
        ga.validate();
        executor.validate();
    }
};

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

} // namespace detail

/// Flat key/value snapshot sufficient to replay a run.
inline std::map<std::string, std::string> snapshot(const CliConfig& c) {
    std::map<std::string, std::string> m;
    m["dataset"] = c.dataset;
    m["label-column"] = c.label_column;
    m["model"] = std::string(to_string(c.model.kind));
    m["learning-rate"] = detail::format_double(c.model.learning_rate);
    m["epochs"] = std::to_string(c.model.epochs);
    m["l2"] = detail::format_double(c.model.l2);
    if (c.model.kind == ModelKind::mlp) {
        m["hidden-units"] = std::to_string(c.model.hidden_units);
        m["batch-size"] = std::to_string(c.model.batch_size);
    }
    m["algorithm"] = std::string(to_string(c.algorithm));
    m["population"] = std::to_string(c.ga.population_size);
    m["mutation-rate"] = detail::format_double(c.ga.mutation_rate);
    m["elitism"] = std::to_string(c.ga.elitism);
    m["generations"] = std::to_string(c.ga.max_generations);
    m["metric"] = std::string(to_string(c.ga.fitness_metric));
    if (c.ga.score_threshold) {
        m["threshold"] = detail::format_double(*c.ga.score_threshold);
    }
    m["seed"] = std::to_string(c.ga.base_seed);
    m["split-seed"] = std::to_string(c.effective_split_seed());
    m["mode"] = std::string(to_string(c.executor.mode));
    m["workers"] = std::to_string(c.executor.workers);
    if (c.algorithm == Algorithm::rfs && c.max_features) {
        m["max-features"] = std::to_string(*c.max_features);
    }
    return m;
}

/// Inverse of snapshot().
inline CliConfig from_snapshot(const std::map<std::string, std::string>& m) {
    auto get = [&](const std::string& k) -> const std::string& {
        const auto it = m.find(k);
        if (it == m.end()) {
            throw ConfigError("config snapshot lacks '" + k + "'");
        }
        return it->second;
    };
    try {
        CliConfig c;
        c.dataset = get("dataset");
        c.label_column = get("label-column");
        c.model = ModelSpec::defaults(parse_model_kind(get("model")));
        c.model.learning_rate = std::stod(get("learning-rate"));
        c.model.epochs = std::stoul(get("epochs"));
        c.model.l2 = std::stod(get("l2"));
        if (m.count("hidden-units") != 0) {
            c.model.hidden_units = std::stoul(get("hidden-units"));
        }
        if (m.count("batch-size") != 0) {
            c.model.batch_size = std::stoul(get("batch-size"));
        }
        c.algorithm = parse_algorithm(get("algorithm"));
        c.ga.population_size = std::stoul(get("population"));
        c.ga.mutation_rate = std::stod(get("mutation-rate"));
        c.ga.elitism = std::stoul(get("elitism"));
        c.ga.max_generations = std::stoul(get("generations"));
        c.ga.fitness_metric = parse_metric(get("metric"));
        if (m.count("threshold") != 0) {
            c.ga.score_threshold = std::stod(get("threshold"));
        }
        c.ga.base_seed = std::stoull(get("seed"));
        c.split_seed = std::stoull(get("split-seed"));
        c.executor.mode = parse_execution_mode(get("mode"));
        c.executor.workers = std::stoul(get("workers"));
        if (m.count("max-features") != 0) {
            c.max_features = std::stoul(get("max-features"));
        }
        return c;
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("malformed config snapshot: ") + e.what());
    }
}

struct RunOutcome {
    RunRecord record;
    std::filesystem::path path;
};

/// load -> split -> standardize -> search -> one test evaluation -> run file.
inline RunOutcome cmd_run(const CliConfig& config, std::ostream& log) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto data = load_csv(config.dataset, config.label_column);
    const auto split = prepare_split(data, config.effective_split_seed());
    const Executor executor(config.executor);

    FitnessRecord best;
    std::optional<EvolutionTrace> trace;
    double mean_gen_seconds = 0.0;
    switch (config.algorithm) {
    case Algorithm::ga: {
        auto result = evolve(split, config.model, config.ga, executor);
        best = std::move(result.best);
        mean_gen_seconds = result.trace.mean_wall_seconds();
        trace = std::move(result.trace);
        break;
    }
    case Algorithm::random: {
        auto result = random_search(split, config.model, config.ga, executor);
        best = std::move(result.best);
        mean_gen_seconds = result.trace->mean_wall_seconds();
        trace = std::move(result.trace);
        break;
    }
    case Algorithm::rfs: {
        const auto cap = config.max_features.value_or(default_max_features(split.dims()));
        auto result = forward_selection(split, config.model, cap, config.ga.fitness_metric, executor, config.ga.base_seed);
        best = std::move(result.best);
        mean_gen_seconds = result.trace->mean_wall_seconds();
        trace = std::move(result.trace);
        break;
    }
    case Algorithm::baseline: {
        auto result = all_features_baseline(split, config.model, config.ga.fitness_metric, config.ga.base_seed);
        best = std::move(result.best);
        mean_gen_seconds = result.wall_seconds;
        break;
    }
    }

    RunRecord rec;
    rec.dataset_name = data.name();
    rec.run_id = config.run_id.empty() ? config.default_run_id(data.name()) : config.run_id;
    rec.model_kind = std::string(to_string(config.model.kind));
    rec.algorithm = config.algorithm_label();
    rec.config = snapshot(config);
    rec.best_chromosome = best.chromosome;
    rec.val_metrics = best.metrics;
    rec.test_metrics = evaluate_on_test(split, config.model, best.chromosome, config.ga.base_seed);
    rec.mean_gen_seconds = mean_gen_seconds;

    const std::filesystem::path out_dir(config.out_dir);
    if (trace) {
        std::filesystem::create_directories(out_dir);
        const std::string name = rec.run_id + ".trace.csv";
        std::ofstream t(out_dir / name, std::ios::trunc);
        if (!t) {
            throw Error("cannot write trace file '" + (out_dir / name).string() + "'");
        }
        trace->write_csv(t);
        rec.trace_path = name;
    }
    rec.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto path = write_run(rec, out_dir);
    log << rec.run_id << ": best " << to_string(config.ga.fitness_metric) << " " << best.score << ", "
        << best.chromosome.popcount() << "/" << best.chromosome.size() << " features, " << rec.total_seconds
        << " s total\n";
    return RunOutcome{std::move(rec), std::move(path)};
}

/// Parse "seq", "par", "par4" or "par:4". Bare "par" uses `default_workers`.
inline ExecutorConfig parse_mode_label(std::string_view s, std::size_t default_workers_count) {
    if (s == "seq" || s == "sequential") {
        return ExecutorConfig::sequential();
    }
    if (s.rfind("par", 0) == 0) {
        auto rest = s.substr(3);
        if (!rest.empty() && rest.front() == ':') {
            rest.remove_prefix(1);
        }
        if (rest.empty()) {
            return ExecutorConfig::parallel(default_workers_count);
        }
        std::size_t workers = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), workers);
        if (ec == std::errc{} && ptr == rest.data() + rest.size() && workers >= 1) {
            return ExecutorConfig::parallel(workers);
        }
    }
    throw ConfigError("bad executor mode '" + std::string(s) + "' (expected seq, par, parN or par:N)");
}

inline std::vector<BenchmarkRow> cmd_benchmark(const CliConfig& config, std::size_t generations,
                                               const std::vector<ExecutorConfig>& modes, const std::string& out_csv,
                                               std::ostream& log) {
    config.model.validate();
    config.ga.validate();
    const auto data = load_csv(config.dataset, config.label_column);
    const auto split = prepare_split(data, config.effective_split_seed());
    auto rows = benchmark(split, config.model, config.ga, modes, generations);
    if (!out_csv.empty() && out_csv != "-") {
        const std::filesystem::path p(out_csv);
        if (p.has_parent_path()) {
            std::filesystem::create_directories(p.parent_path());
        }
        std::ofstream out(p, std::ios::trunc);
        if (!out) {
            throw Error("cannot write timing file '" + out_csv + "'");
        }
        write_benchmark_csv(out, rows);
    }
    write_benchmark_csv(log, rows);
    return rows;
}

struct CompareOutput {
    Table runtime;
    Table metrics;
    std::map<std::string, Table> jaccard; ///< keyed by "<model>_<dataset>"
};

/// Read every `*.json` run file in `run_dir` and write runtime, metrics and
/// per-(model, dataset) Jaccard tables (CSV and Markdown) into `out_dir`.
inline CompareOutput cmd_compare(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir,
                                 std::ostream& log) {
    if (!std::filesystem::is_directory(run_dir)) {
        throw Error("run directory '" + run_dir.string() + "' does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw Error("no run files in '" + run_dir.string() + "'");
    }
    std::vector<RunRecord> records;
    std::vector<std::string> origin;
    for (const auto& f : files) {
        records.push_back(read_run(f));
        origin.push_back(f.filename().string());
    }

    std::map<std::string, std::vector<std::size_t>> groups;
    std::set<std::string> algorithms;
    for (std::size_t i = 0; i < records.size(); ++i) {
        groups[records[i].model_kind + "_" + records[i].dataset_name].push_back(i);
        algorithms.insert(records[i].algorithm);
    }

    CompareOutput out;
    out.runtime = runtime_table(records);
    out.metrics = metrics_table(records);
    for (const auto& [key, members] : groups) {
        std::vector<RunRecord> group;
        for (auto i : members) {
            if (records[i].best_chromosome.size() != records[members.front()].best_chromosome.size()) {
                throw DataError("chromosome length mismatch in group " + key + ": " + origin[members.front()] +
                                " has " + std::to_string(records[members.front()].best_chromosome.size()) + ", " +
                                origin[i] + " has " + std::to_string(records[i].best_chromosome.size()));
            }
            group.push_back(records[i]);
        }
        out.jaccard.emplace(key, jaccard_matrix(group, std::vector<std::string>(algorithms.begin(), algorithms.end())));
    }

    std::filesystem::create_directories(out_dir);
    auto emit = [&](const std::string& stem, const Table& t) {
        std::ofstream csv(out_dir / (stem + ".csv"), std::ios::trunc);
        std::ofstream md(out_dir / (stem + ".md"), std::ios::trunc);
        if (!csv || !md) {
            throw Error("cannot write tables into '" + out_dir.string() + "'");
        }
        t.write_csv(csv);
        t.write_markdown(md);
    };
    emit("runtime", out.runtime);
    emit("metrics", out.metrics);
    for (const auto& [key, t] : out.jaccard) {
        emit("jaccard_" + key, t);
    }
    log << "runtime (mean seconds per generation)\n";
    out.runtime.write_markdown(log);
    log << "\ntest metrics\n";
    out.metrics.write_markdown(log);
    for (const auto& [key, t] : out.jaccard) {
        log << "\njaccard " << key << "\n";
        t.write_markdown(log);
    }
    return out;
}

inline SyntheticData cmd_gen_synth(std::size_t d, std::size_t informative, std::size_t n, std::uint64_t seed,
                                   const std::string& out_path) {
    auto synth = generate_synthetic(d, informative, n, seed);
    const std::filesystem::path p(out_path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + out_path + "'");
    }
    write_csv(out, synth.data);
    return synth;
}

namespace detail {

/// Turn `key=value` lines into `--key value` tokens.
inline std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::vector<std::string> tokens;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto body = evoselect::detail::trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) + ": expected key=value");
        }
        const auto key = evoselect::detail::trim(body.substr(0, eq));
        const auto value = evoselect::detail::trim(body.substr(eq + 1));
        if (key.empty() || key == "config") {
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) + ": invalid key");
        }
        tokens.push_back("--" + std::string(key));
        tokens.emplace_back(value);
    }
    return tokens;
}

/// Splice config-file tokens right after the subcommand so later command-line
/// occurrences win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::optional<std::string> config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (!config_path || args.size() < 2) {
        return args;
    }
    auto tokens = config_tokens(*config_path);
    args.insert(args.begin() + 2, tokens.begin(), tokens.end());
    return args;
}

} // namespace detail

/// Entry point shared by the executable and the tests. Returns the exit code:
/// 0 success, 1 runtime failure, 2 usage or configuration error.
inline int run_main(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        args = detail::expand_config(std::move(args));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    CLI::App app{"Genetic-algorithm feature selection with deterministic parallel fitness evaluation", "evoselect"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.allow_extras(false);

    CliConfig cfg;
    std::string model_kind = "logistic";
    std::string algorithm = "ga";
    std::string metric = "f1";
    std::string mode = "seq";
    std::optional<std::size_t> workers;
    std::optional<double> learning_rate;
    std::optional<std::size_t> epochs;
    std::optional<double> l2;
    std::optional<std::size_t> hidden_units;
    std::optional<std::size_t> batch_size;
    std::optional<double> threshold;
    std::optional<std::uint64_t> split_seed;
    std::optional<std::size_t> max_features;
    std::string config_file;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "Flat key=value config file");
        sub->add_option("--dataset", cfg.dataset, "CSV dataset")->required();
        sub->add_option("--label-column", cfg.label_column, "Label column name");
        sub->add_option("--model", model_kind, "logistic | mlp");
        sub->add_option("--learning-rate", learning_rate);
        sub->add_option("--epochs", epochs);
        sub->add_option("--l2", l2);
        sub->add_option("--hidden-units", hidden_units);
        sub->add_option("--batch-size", batch_size);
        sub->add_option("--metric", metric, "Fitness metric: f1 | accuracy | roc_auc");
        sub->add_option("--population", cfg.ga.population_size, "Population size L");
        sub->add_option("--mutation-rate", cfg.ga.mutation_rate, "Per-gene flip probability");
        sub->add_option("--elitism", cfg.ga.elitism, "Members copied unchanged into the next generation");
        sub->add_option("--threshold", threshold, "Stop once the best score reaches this value");
        sub->add_option("--seed", cfg.ga.base_seed, "Base seed");
        sub->add_option("--split-seed", split_seed, "Split seed (defaults to --seed)");
        sub->add_option("--workers", workers, "Worker threads for parallel mode (default: EVOSELECT_WORKERS or all cores)");
    };

    auto* run = app.add_subcommand("run", "Run one feature-selection algorithm and write a run file");
    add_common(run);
    run->add_option("--algorithm", algorithm, "ga | random | rfs | baseline");
    run->add_option("--generations", cfg.ga.max_generations, "Evolution rounds E");
    run->add_option("--mode", mode, "seq | par");
    run->add_option("--max-features", max_features, "Step cap for rfs");
    run->add_option("--out", cfg.out_dir, "Output directory for run and trace files");
    run->add_option("--run-id", cfg.run_id, "Run identifier (default derived from dataset/model/algorithm/seed)");

    auto* bench = app.add_subcommand("benchmark", "Time the same seeded GA under several executor modes");
    add_common(bench);
    std::size_t bench_generations = 3;
    std::vector<std::string> mode_labels;
    std::string bench_out;
    bench->add_option("--generations", bench_generations, "Generations per mode");
    bench->add_option("--modes", mode_labels, "Executor modes, e.g. seq,par4")->delimiter(',');
    bench->add_option("--mode", mode, "Ignored by benchmark; accepted for shared config files");
    bench->add_option("--out", bench_out, "Timing CSV path");

    auto* compare = app.add_subcommand("compare", "Build runtime, metrics and Jaccard tables from run files");
    std::string run_dir;
    std::string compare_out;
    compare->add_option("--config", config_file, "Flat key=value config file");
    compare->add_option("--runs", run_dir, "Directory of run files")->required();
    compare->add_option("--out", compare_out, "Directory for table files (default: the run directory)");

    auto* synth = app.add_subcommand("gen-synth", "Write a synthetic dataset with informative and distractor columns");
    std::size_t synth_d = 20;
    std::size_t synth_inf = 10;
    std::size_t synth_n = 2000;
    std::uint64_t synth_seed = 3;
    std::string synth_out;
    synth->add_option("--config", config_file, "Flat key=value config file");
    synth->add_option("--d", synth_d, "Number of features");
    synth->add_option("--informative", synth_inf, "Number of informative features");
    synth->add_option("--n", synth_n, "Number of samples");
    synth->add_option("--seed", synth_seed, "Seed");
    synth->add_option("--out", synth_out, "Output CSV")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        auto finish_config = [&] {
            const auto kind = parse_model_kind(model_kind);
            cfg.model = ModelSpec::defaults(kind);
            if (learning_rate) {
                cfg.model.learning_rate = *learning_rate;
            }
            if (epochs) {
                cfg.model.epochs = *epochs;
            }
            if (l2) {
                cfg.model.l2 = *l2;
            }
            if (hidden_units) {
                cfg.model.hidden_units = *hidden_units;
            }
            if (batch_size) {
                cfg.model.batch_size = *batch_size;
            }
            cfg.algorithm = parse_algorithm(algorithm);
            cfg.ga.fitness_metric = parse_metric(metric);
            cfg.ga.score_threshold = threshold;
            cfg.split_seed = split_seed;
            cfg.max_features = max_features;
            const auto m = parse_execution_mode(mode);
            cfg.executor = m == ExecutionMode::sequential ? ExecutorConfig::sequential()
                                                          : ExecutorConfig::parallel(workers.value_or(default_workers()));
            cfg.validate();
        };

        if (run->parsed()) {
            finish_config();
        } else if (bench->parsed()) {
            finish_config();
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (run->parsed()) {
            cmd_run(cfg, out);
        } else if (bench->parsed()) {
            std::vector<ExecutorConfig> modes;
            const std::size_t w = workers.value_or(default_workers());
            if (mode_labels.empty()) {
                modes = {ExecutorConfig::sequential(), ExecutorConfig::parallel(w)};
            } else {
                for (const auto& label : mode_labels) {
                    modes.push_back(parse_mode_label(label, w));
                }
            }
            cmd_benchmark(cfg, bench_generations, modes, bench_out, out);
        } else if (compare->parsed()) {
            cmd_compare(run_dir, compare_out.empty() ? run_dir : compare_out, out);
        } else if (synth->parsed()) {
            const auto s = cmd_gen_synth(synth_d, synth_inf, synth_n, synth_seed, synth_out);
            out << "wrote " << synth_out << " (" << s.data.rows() << " rows, " << s.data.cols() << " features, "
                << synth_inf << " informative)\n";
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace evoselect::cli

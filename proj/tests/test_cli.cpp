#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "evoselect/cli.hpp"
#include "support.hpp"

using namespace evoselect;
using namespace evoselect::testing;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "evoselect");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

/// Run file with run_id and timing fields removed.
nlohmann::json stable_view(const std::filesystem::path& p) {
    auto j = nlohmann::json::parse(slurp(p));
    j.erase("run_id");
    j.erase("mean_gen_seconds");
    j.erase("total_seconds");
    j.erase("trace_path");
    return j;
}

class CliTest : public ::testing::Test {
  protected:
    static void SetUpTestSuite() {
        dir_ = new std::filesystem::path(temp_dir("cli"));
        csv_ = new std::string((*dir_ / "synth.csv").string());
        const auto r = run_cli({"gen-synth", "--d", "12", "--informative", "6", "--n", "400", "--seed", "3", "--out", *csv_});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() {
        delete dir_;
        delete csv_;
    }
    static std::filesystem::path* dir_;
    static std::string* csv_;
};
std::filesystem::path* CliTest::dir_ = nullptr;
std::string* CliTest::csv_ = nullptr;

} // namespace

TEST_F(CliTest, GenSynthShape) {
    const auto out = (*dir_ / "big.csv").string();
    const auto r = run_cli({"gen-synth", "--d", "20", "--informative", "10", "--n", "2000", "--seed", "3", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto data = load_csv(out);
    EXPECT_EQ(data.rows(), 2000U);
    EXPECT_EQ(data.cols(), 20U);
    EXPECT_EQ(informative_mask(data).popcount(), 10U);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), 20);
    EXPECT_EQ(run_cli({"gen-synth", "--d", "5", "--informative", "6", "--out", out}).code, 2);
    EXPECT_EQ(run_cli({"gen-synth", "--n", "10", "--out", out}).code, 2);
}

TEST_F(CliTest, BaselineRunWritesAllOnesChromosome) {
    const auto out = (*dir_ / "baseline").string();
    const auto r = run_cli({"run", "--dataset", *csv_, "--model", "logistic", "--algorithm", "baseline", "--seed", "1",
                            "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("12/12 features"), std::string::npos) << r.out;
    const auto rec = read_run(std::filesystem::path(out) / "synth_logistic_baseline_s1.json");
    EXPECT_EQ(rec.best_chromosome, Chromosome::all_ones(12));
    EXPECT_EQ(rec.algorithm, "baseline");
    EXPECT_FALSE(rec.trace_path);
}

TEST_F(CliTest, RepeatedRunsAreIdenticalModuloIdAndTiming) {
    const auto out = (*dir_ / "repeat").string();
    const std::vector<std::string> base{"run", "--dataset", *csv_, "--algorithm", "ga", "--population", "8",
                                        "--generations", "3", "--seed", "5", "--out", out};
    auto a = base;
    a.insert(a.end(), {"--run-id", "one"});
    auto b = base;
    b.insert(b.end(), {"--run-id", "two"});
    ASSERT_EQ(run_cli(a).code, 0);
    ASSERT_EQ(run_cli(b).code, 0);
    EXPECT_EQ(stable_view(std::filesystem::path(out) / "one.json"), stable_view(std::filesystem::path(out) / "two.json"));
}

TEST_F(CliTest, ParallelAndSequentialPickTheSameChromosome) {
    const auto out = (*dir_ / "modes").string();
    const std::vector<std::string> base{"run", "--dataset", *csv_, "--algorithm", "ga", "--population", "10",
                                        "--generations", "4", "--seed", "9", "--out", out};
    auto seq = base;
    seq.insert(seq.end(), {"--mode", "seq"});
    auto par = base;
    par.insert(par.end(), {"--mode", "par", "--workers", "4"});
    ASSERT_EQ(run_cli(seq).code, 0);
    ASSERT_EQ(run_cli(par).code, 0);
    const auto a = read_run(std::filesystem::path(out) / "synth_logistic_ga-seq_s9.json");
    const auto b = read_run(std::filesystem::path(out) / "synth_logistic_ga-par_s9.json");
    EXPECT_EQ(a.best_chromosome.to_hex(), b.best_chromosome.to_hex());
    EXPECT_EQ(a.test_metrics, b.test_metrics);
    ASSERT_TRUE(a.trace_path);
    const auto trace_text = slurp(std::filesystem::path(out) / *a.trace_path);
    EXPECT_EQ(trace_text.rfind("generation,best,worst,mean,wall_seconds,best_chromosome_hex\n", 0), 0U);
}

TEST_F(CliTest, ConfigSnapshotReplaysTheRun) {
    const auto out = (*dir_ / "replay").string();
    for (const std::string alg : {"ga", "random", "rfs"}) {
        const auto r = run_cli({"run", "--dataset", *csv_, "--algorithm", alg, "--population", "6", "--generations", "3",
                                "--seed", "4", "--metric", "roc_auc", "--out", out, "--run-id", "orig_" + alg});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto rec = read_run(std::filesystem::path(out) / ("orig_" + alg + ".json"));
        auto cfg = cli::from_snapshot(rec.config);
        cfg.out_dir = out;
        cfg.run_id = "replay_" + alg;
        std::ostringstream log;
        const auto replay = cli::cmd_run(cfg, log);
        EXPECT_EQ(replay.record.best_chromosome, rec.best_chromosome) << alg;
        EXPECT_EQ(replay.record.val_metrics, rec.val_metrics) << alg;
        EXPECT_EQ(replay.record.test_metrics, rec.test_metrics) << alg;
        EXPECT_EQ(replay.record.config, rec.config) << alg;
    }
}

TEST_F(CliTest, ConfigFileWithCommandLineOverride) {
    const auto out = (*dir_ / "cfgfile").string();
    const auto cfg_path = *dir_ / "run.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "# desk-scale run\n"
            << "dataset = " << *csv_ << "\n"
            << "algorithm=ga\npopulation=6\ngenerations=2\nseed=11\nmutation-rate=0.1\n"
            << "out=" << out << "\n";
    }
    const auto r = run_cli({"run", "--config", cfg_path.string(), "--seed", "12"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rec = read_run(std::filesystem::path(out) / "synth_logistic_ga-seq_s12.json");
    EXPECT_EQ(rec.config.at("seed"), "12");
    EXPECT_EQ(rec.config.at("population"), "6");
    EXPECT_EQ(rec.config.at("mutation-rate"), "0.10000000000000001");

    std::ofstream(*dir_ / "bad.cfg") << "no-such-flag=1\n";
    EXPECT_EQ(run_cli({"run", "--config", (*dir_ / "bad.cfg").string(), "--dataset", *csv_}).code, 2);
}

TEST_F(CliTest, ErrorsAndExitCodes) {
    EXPECT_EQ(run_cli({"run", "--dataset", *csv_, "--bogus"}).code, 2);
    EXPECT_EQ(run_cli({"run", "--dataset", *csv_, "--algorithm", "hill-climb"}).code, 2);
    EXPECT_EQ(run_cli({"run", "--dataset", *csv_, "--population", "4", "--elitism", "4"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    const auto missing = run_cli({"run", "--dataset", "/nonexistent.csv", "--algorithm", "baseline"});
    EXPECT_EQ(missing.code, 1);
    EXPECT_EQ(std::count(missing.err.begin(), missing.err.end(), '\n'), 1);
    EXPECT_NE(missing.err.find("/nonexistent.csv"), std::string::npos);
    EXPECT_EQ(run_cli({"run", "--dataset", *csv_, "--label-column", "target", "--algorithm", "baseline"}).code, 1);
}

TEST_F(CliTest, BenchmarkWritesOneRowPerMode) {
    const auto out = (*dir_ / "bench.csv").string();
    const auto r = run_cli({"benchmark", "--dataset", *csv_, "--population", "6", "--generations", "2", "--modes",
                            "seq,seq,par2", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(out);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    ASSERT_EQ(lines.size(), 4U);
    EXPECT_EQ(lines[0], "mode,workers,generations,mean_gen_seconds,min_gen_seconds,max_gen_seconds,sum_task_seconds,speedup");
    EXPECT_EQ(lines[1].rfind("seq,1,2,", 0), 0U);
    EXPECT_EQ(lines[3].rfind("par,2,2,", 0), 0U);
    EXPECT_EQ(run_cli({"benchmark", "--dataset", *csv_, "--modes", "turbo"}).code, 2);
}

TEST_F(CliTest, SelfBenchmarkSpeedupNearOne) {
    const auto data = load_csv(*csv_);
    const auto split = prepare_split(data, 1);
    GaConfig cfg;
    cfg.population_size = 8;
    const std::vector<ExecutorConfig> modes{ExecutorConfig::sequential(), ExecutorConfig::sequential()};
    const auto rows = benchmark(split, ModelSpec::logistic(), cfg, modes, 2);
    ASSERT_EQ(rows.size(), 2U);
    EXPECT_EQ(rows[0].speedup, 1.0);
    EXPECT_GE(rows[1].speedup, 0.5);
    EXPECT_LE(rows[1].speedup, 2.0);
    EXPECT_THROW(benchmark(split, ModelSpec::logistic(), cfg, modes, 0), ConfigError);
}

TEST(CompareCommand, GoldenTables) {
    const std::filesystem::path fixtures(EVOSELECT_FIXTURE_DIR);
    const auto out = temp_dir("compare_golden");
    std::ostringstream log;
    const auto result = cli::cmd_compare(fixtures / "runs", out, log);
    for (const char* name : {"runtime.csv", "metrics.csv", "jaccard_logistic_gina.csv", "jaccard_logistic_hiva.csv"}) {
        EXPECT_EQ(slurp(out / name), slurp(fixtures / "expected" / name)) << name;
        EXPECT_TRUE(std::filesystem::exists(out / (std::filesystem::path(name).stem().string() + ".md")));
    }
    EXPECT_EQ(result.jaccard.size(), 2U);
}

TEST(CompareCommand, SingleRunAndErrors) {
    const std::filesystem::path fixtures(EVOSELECT_FIXTURE_DIR);
    const auto one = temp_dir("compare_one");
    std::filesystem::copy_file(fixtures / "runs" / "hiva_logistic_ga-seq.json", one / "hiva_logistic_ga-seq.json");
    const auto r = run_cli({"compare", "--runs", one.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rt = slurp(one / "runtime.csv");
    EXPECT_EQ(rt, "model/algorithm,hiva\nlogistic/ga-seq,4.000000\n");
    EXPECT_EQ(slurp(one / "jaccard_logistic_hiva.csv"), "jaccard,ga-seq\nga-seq,1.000000\n");

    const auto empty = temp_dir("compare_empty");
    EXPECT_EQ(run_cli({"compare", "--runs", empty.string()}).code, 1);

    const auto mixed = temp_dir("compare_mixed");
    std::filesystem::copy_file(fixtures / "runs" / "gina_logistic_ga-seq.json", mixed / "a.json");
    auto j = nlohmann::json::parse(slurp(fixtures / "runs" / "gina_logistic_rfs.json"));
    j["chromosome_len"] = 4;
    j["best_chromosome_hex"] = "c";
    std::ofstream(mixed / "b.json") << j.dump(2);
    const auto bad = run_cli({"compare", "--runs", mixed.string()});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("a.json"), std::string::npos) << bad.err;
    EXPECT_NE(bad.err.find("b.json"), std::string::npos) << bad.err;
}

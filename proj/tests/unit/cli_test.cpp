#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mlbisim/bisim/partition_io.h"
#include "mlbisim/cli/bench.h"
#include "mlbisim/cli/commands.h"
#include "mlbisim/core/errors.h"
#include "mlbisim/prism/explicit_io.h"
#include "mlbisim/verify/oracle.h"

namespace mlbisim::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = MLBISIM_FIXTURES;

std::string model(const std::string& name) { return (kFixtures / "models" / name).string(); }

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("mlbisim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

TEST_F(Cli, ExploreWritesTheTriple) {
    const auto r = call({"explore", model("coin2.nm"), "-c", "K=2", "-o", path("coin")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("states 272"), std::string::npos);
    for (const char* ext : {".sta", ".tra", ".lab"}) EXPECT_TRUE(fs::exists(path(std::string("coin") + ext)));
    EXPECT_EQ(prism::import_explicit(dir_ / "coin").n_states(), 272u);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(call({}).code, kExitUsage);
    EXPECT_EQ(call({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(call({"explore", path("absent.nm"), "-c", "K=2", "-o", path("x")}).code, kExitIo);
    EXPECT_EQ(call({"explore", model("coin2.nm"), "-o", path("x")}).code, kExitUsage);
    EXPECT_EQ(call({"explore", model("coin2.nm"), "-c", "K", "-o", path("x")}).code, kExitUsage);
    EXPECT_EQ(call({"bisim", model("coin2.nm"), "-c", "K=2", "-g", "nope"}).code, kExitUsage);
    EXPECT_EQ(call({"bisim", model("coin2.nm"), "-c", "K=2", "-g", "finished", "--max-states", "10"}).code,
              kExitResource);
    EXPECT_EQ(call({"bisim-ml", model("coin2.nm"), "-g", "finished", "--target", "4"}).code, kExitUsage);
    EXPECT_EQ(call({"bisim-ml", model("coin2.nm"), "-g", "finished", "--samples", "", "--target", "4"}).code,
              kExitUsage);
    EXPECT_EQ(call({"bisim-ml", model("coin2.nm"), "-g", "finished", "--samples", "5", "--target", "4"}).code,
              kExitUsage);

    std::ofstream(path("bad.nm")) << "mdp\nmodule m\n  x : [0..1];\n  [] x=0 -> (x'=q);\nendmodule\n";
    const auto parse = call({"explore", path("bad.nm"), "-o", path("x")});
    EXPECT_EQ(parse.code, kExitParse);
    EXPECT_NE(parse.err.find("line 4"), std::string::npos);
}

TEST_F(Cli, BisimEmitsAVerifiedPartitionAndReport) {
    const auto r = call({"bisim", model("coin2.nm"), "-c", "K=3", "-g", "finished", "--emit-partition",
                         path("coin.part"), "--report", path("coin.json"), "--check"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto report = nlohmann::json::parse(slurp(dir_ / "coin.json"));
    EXPECT_EQ(report["model"], "coin2");
    EXPECT_EQ(report["method"], "standard");
    EXPECT_TRUE(report["is_bisimulation"].get<bool>());
    EXPECT_TRUE(report["equal_to_oracle"].get<bool>());
    EXPECT_GE(report["total_time"].get<double>(), report["init_partition_time"].get<double>());
    EXPECT_LE(report["final_blocks"].get<std::size_t>(), report["n_states"].get<std::size_t>());
    EXPECT_FALSE(report.contains("ml"));
    EXPECT_EQ(bisim::load_partition(dir_ / "coin.part").n_blocks(), report["final_blocks"].get<std::size_t>());

    const auto one = call({"bisim", (kFixtures / "explicit" / "three").string(), "-g", "hit", "--format", "json"});
    ASSERT_EQ(one.code, kExitOk) << one.err;
    EXPECT_EQ(nlohmann::json::parse(one.out)["final_blocks"], 3);
}

TEST_F(Cli, BisimMlArtifactsAreDeterministic) {
    std::vector<std::string> files;
    for (const char* run : {"a", "b"}) {
        const std::string stem = path(run);
        const auto r = call({"bisim-ml", model("coin2.nm"), "-g", "finished", "--samples", "2,3", "--target", "5",
                             "--seed", "11", "--threads", "4", "--emit-partition", stem + ".part", "--emit-model",
                             stem + ".model", "--report", stem + ".json", "--check"});
        ASSERT_EQ(r.code, kExitOk) << r.err;
        files.push_back(slurp(stem + ".part") + "\n--\n" + slurp(stem + ".model"));
    }
    EXPECT_EQ(files[0], files[1]);
    const auto report = nlohmann::json::parse(slurp(dir_ / "a.json"));
    EXPECT_EQ(report["method"], "ml");
    EXPECT_TRUE(report["is_bisimulation"].get<bool>());
    EXPECT_TRUE(report["finer_than_oracle"].get<bool>());
    EXPECT_LE(report["init_partition_time"].get<double>(), report["total_time"].get<double>());
    EXPECT_EQ(report["ml"]["seed"], 11);

    // A saved model seeds the same partition without learning again.
    const auto again = call({"bisim-ml", model("coin2.nm"), "-g", "finished", "--target", "5", "--model-in", path("a.model"), "--emit-partition", path("c.part")});
    ASSERT_EQ(again.code, kExitOk) << again.err;
    EXPECT_EQ(slurp(dir_ / "c.part"), slurp(dir_ / "a.part"));
}

TEST_F(Cli, SelfConsistencyMatchesTheSample) {
    const auto r = call({"bisim-ml", model("zeroconf.nm"), "-c", "N=900", "-g", "configured", "--samples", "2,3",
                         "--target", "3", "--check", "--format", "json"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto report = nlohmann::json::parse(r.out);
    EXPECT_TRUE(report["ml"]["self_consistency"].get<bool>());
    EXPECT_TRUE(report["equal_to_oracle"].get<bool>());
    EXPECT_EQ(report["accuracy"].get<double>(), 1.0);
}

TEST_F(Cli, VerifyAcceptsBisimulationsAndPrintsWitnesses) {
    const std::string five = (kFixtures / "explicit" / "five").string();
    std::ofstream(path("good.part")) << "PARTITION 5 4\n0 0\n1 1\n2 1\n3 2\n4 3\n";
    const auto ok = call({"verify", five, "-p", path("good.part"), "-g", "goal"});
    EXPECT_EQ(ok.code, kExitOk) << ok.err;
    EXPECT_NE(ok.out.find("OK"), std::string::npos);

    std::ofstream(path("merged.part")) << "PARTITION 5 3\n0 0\n1 1\n2 1\n3 1\n4 2\n";
    const auto bad = call({"verify", five, "-p", path("merged.part"), "-g", "goal"});
    EXPECT_EQ(bad.code, kExitVerification);
    EXPECT_NE(bad.out.find("FAILED"), std::string::npos);
    EXPECT_NE(bad.out.find("state"), std::string::npos);

    std::ofstream(path("short.part")) << "PARTITION 3 1\n0 0\n1 0\n2 0\n";
    EXPECT_EQ(call({"verify", five, "-p", path("short.part"), "-g", "goal"}).code, kExitUsage);
}

TEST(BenchConfig, ParsesSchemaAndReportsLines) {
    const auto c = parse_bench_config(R"(
timeout: 12.5
max_memory_mb: 64
workers: 3
seed: 4
models:
  - name: c
    program: coin2.nm
    goal: finished
    samples: [2, 3]
    targets: [4]
  - program: brp.nm
    goal: success
    const: {N: 4}
    samples: 2
    targets: [3, 4]
)",
                                      "/base");
    EXPECT_EQ(*c.limits.timeout_seconds, 12.5);
    EXPECT_EQ(*c.limits.max_memory_mb, 64u);
    EXPECT_EQ(c.workers, 3u);
    EXPECT_EQ(c.seed, 4u);
    ASSERT_EQ(c.models.size(), 2u);
    EXPECT_EQ(c.models[0].program, fs::path("/base/coin2.nm"));
    EXPECT_EQ(c.models[1].name, "brp");
    EXPECT_EQ(c.models[1].constants.at("N"), 4);
    EXPECT_EQ(c.models[1].samples, std::vector<std::int64_t>{2});
    EXPECT_EQ(*parse_bench_config("models:\n  - {program: a.nm, goal: g, samples: [1], targets: [2]}\n").limits.timeout_seconds,
              3600.0);
    try {
        parse_bench_config("models:\n  - program: a.nm\n    samples: [1]\n    targets: [2]\n");
        FAIL() << "missing goal accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(parse_bench_config("models: [\n"), ParseError);
    EXPECT_THROW(parse_bench_config("timeout: 3\n"), ParseError);
}

TEST(Bench, TwoByTwoMatrixGivesFourRows) {
    const auto config = load_bench_config(kFixtures / "bench" / "coin_small.yaml");
    const auto rows = run_bench(config);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].model, "Coin (N=2)");
    EXPECT_EQ(rows[0].parameter, "K=4");
    EXPECT_EQ(rows[3].parameter, "MAX=5");
    for (const auto& row : rows) {
        ASSERT_EQ(row.standard.status, BenchOutcome::Status::ok) << row.standard.message;
        ASSERT_EQ(row.ml.status, BenchOutcome::Status::ok) << row.ml.message;
        EXPECT_TRUE(row.standard.report->is_bisimulation);
        EXPECT_TRUE(row.ml.report->is_bisimulation);
        EXPECT_TRUE(*row.ml.report->finer_than_oracle);
    }
    const std::string csv = bench_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "model,parameter,states_k,actions_k,transitions_k,standard_total,ml_init_part,ml_total,"
              "standard_iterations,ml_iterations,standard_blocks,ml_blocks");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    const std::string text = bench_text(rows);
    EXPECT_NE(text.find("init-part"), std::string::npos);
    EXPECT_NE(text.find("x10^-3"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(bench_json(rows)).size(), 4u);
}

TEST(Bench, LimitCellsCarryTimeoutAndKilledTokens) {
    BenchConfig config;
    BenchModel big{"coin4", kFixtures / "models" / "coin4.nm", "finished", {}, {1, 2}, {4}};
    config.models = {big};
    config.limits.timeout_seconds = 0.001;
    auto rows = run_bench(config);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].standard.token(), "timeout");
    EXPECT_EQ(rows[0].ml.token(), "timeout");

    config.limits.timeout_seconds.reset();
    config.limits.max_memory_mb = 1;
    rows = run_bench(config);
    EXPECT_EQ(rows[0].standard.token(), "killed");
    EXPECT_EQ(rows[0].ml.token(), "killed");
    const std::string csv = bench_csv(rows);
    EXPECT_NE(csv.find("coin4,K=4,-,-,-,killed,killed,killed,-,-,-,-"), std::string::npos) << csv;

    const auto cli = call({"bench", (kFixtures / "bench" / "coin_small.yaml").string(), "--format", "csv"});
    EXPECT_EQ(cli.code, kExitOk) << cli.err;
    EXPECT_EQ(std::count(cli.out.begin(), cli.out.end(), '\n'), 5);
}

}  // namespace
}  // namespace mlbisim::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlbisim/cli/report.h"
#include "mlbisim/cli/runs.h"

namespace mlbisim::cli {

/// One program with the target parameter values to benchmark.
struct BenchModel {
    std::string name;
    std::filesystem::path program;  ///< resolved against the config file's directory
    std::string goal;
    Bindings constants;
    std::vector<std::int64_t> samples;
    std::vector<std::int64_t> targets;
};

struct BenchConfig {
    Limits limits{20'000'000, 3600.0, std::nullopt};  ///< applied to each run separately
    unsigned workers = 1;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    bool check = false;
    std::vector<BenchModel> models;
};

/// YAML text; see the README for the schema. Throws ParseError.
BenchConfig parse_bench_config(const std::string& text, const std::filesystem::path& base_dir = {});
BenchConfig load_bench_config(const std::filesystem::path& path);

struct BenchOutcome {
    enum class Status { ok, timeout, killed, error };
    Status status = Status::error;
    std::optional<RunReport> report;
    std::string message;

    /// Time cell: seconds, or the status token.
    std::string token() const;
};

struct BenchRow {
    std::string model;
    std::string parameter;  ///< "NAME=VALUE"
    std::optional<std::size_t> n_states, n_choices, n_transitions;
    BenchOutcome standard;
    BenchOutcome ml;
};

/// Runs every (model, target) row with and without the learned initial
/// partition on a pool of `config.workers` threads. Rows come back in config
/// order regardless of scheduling.
std::vector<BenchRow> run_bench(const BenchConfig& config);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_text(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows);

}  // namespace mlbisim::cli

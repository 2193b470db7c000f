#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlbisim/cli/report.h"
#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"
#include "mlbisim/mlinit/model.h"
#include "mlbisim/prism/program.h"

namespace mlbisim::cli {

using Bindings = std::map<std::string, std::int64_t>;

struct Limits {
    std::size_t max_states = 20'000'000;
    std::optional<double> timeout_seconds;
    std::optional<std::size_t> max_memory_mb;

    std::optional<std::chrono::steady_clock::time_point> deadline_from(std::chrono::steady_clock::time_point start) const;
    std::optional<std::size_t> max_memory_bytes() const;
};

/// Parses "NAME=VALUE" (UsageError otherwise).
std::pair<std::string, std::int64_t> parse_binding(const std::string& text);

/// True for program sources (.nm, .prism, .pm); anything else names explicit
/// .sta/.tra/.lab files, given either as a basename or as one of the files.
bool is_program_path(const std::filesystem::path& path);

/// Basename of an explicit-state triple given as basename or as one of its files.
std::filesystem::path explicit_basename(const std::filesystem::path& path);

/// Parses a program and binds `bindings`.
prism::Program load_program(const std::filesystem::path& path, const Bindings& bindings);

struct LoadedModel {
    Mdp mdp;
    double explore_seconds = 0.0;
};

/// Explores a program (which must be closed after binding) or imports
/// explicit files (bindings must then be empty).
LoadedModel load_model(const std::filesystem::path& path, const Bindings& bindings, const Limits& limits);

/// Explores `program` with its single remaining parameter set to `value`;
/// parametric flags stay those of `program`.
LoadedModel explore_instance(const prism::Program& program, const std::string& parameter, std::int64_t value,
                             const Limits& limits);

struct StandardSettings {
    std::string model_name;
    Bindings bindings;
    std::string goal;
    Limits limits;
    bool check = false;  ///< compare against a reference partition
    std::size_t oracle_limit = 2000;
    double explore_seconds = 0.0;
};

struct StandardRun {
    Partition partition;
    RunReport report;
};

/// Minimisation from {G, S\G}.
StandardRun run_standard(const Mdp& m, const StandardSettings& settings);

struct MlSettings {
    std::string model_name;
    Bindings bindings;  ///< constants bound besides the parameter
    std::string goal;
    std::vector<std::int64_t> samples;
    std::int64_t target = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    Limits limits;
    bool check = false;
    std::size_t oracle_limit = 2000;
    std::optional<mlinit::SuperblockModel> model;  ///< skip learning and use this model
};

struct MlRun {
    Partition partition;
    Partition seed;                    ///< initial partition handed to the refinement
    mlinit::SuperblockModel model;
    std::vector<std::int64_t> eta_parameters;
    std::vector<std::vector<mlinit::SuperblockId>> eta;  ///< per sample
    RunReport report;
};

/// Learning (unless a model is supplied), prediction for the target and
/// refinement from the predicted partition. When `target_model` is null the
/// target is explored here; a target equal to a sample reuses the sample.
MlRun run_ml(const prism::Program& program, const MlSettings& settings, const Mdp* target_model = nullptr);

/// Reference partition for checks: the brute-force oracle up to `oracle_limit`
/// states, the standard refinement beyond. `kind` receives which was used.
Partition reference_partition(const Mdp& m, const std::string& goal, std::size_t oracle_limit, std::string& kind,
                              const std::optional<std::chrono::steady_clock::time_point>& deadline = {});

}  // namespace mlbisim::cli

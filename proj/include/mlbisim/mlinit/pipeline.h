#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlbisim/bisim/refine.h"
#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"
#include "mlbisim/mlinit/model.h"
#include "mlbisim/prism/explorer.h"
#include "mlbisim/prism/program.h"

namespace mlbisim::mlinit {

struct PipelineOptions {
    std::string goal;
    std::uint64_t seed = 1;
    std::size_t max_states = 20'000'000;
    std::optional<std::size_t> max_memory_bytes;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    unsigned threads = 1;
    SvmOptions svm;
};

struct StepTiming {
    std::string step;
    double seconds = 0.0;
};

struct SampleRun {
    std::int64_t parameter = 0;
    Mdp mdp;
    Partition partition;
    bisim::RefineStats stats;
};

struct LearnResult {
    SuperblockModel model;
    std::vector<SampleRun> samples;
    SuperblockCatalog catalog;
    std::vector<StepTiming> timings;
    std::vector<std::string> warnings;
};

/// The single free parameter of `program`; throws UsageError when there is
/// not exactly one.
std::string single_parameter(const prism::Program& program);

/// Explores and minimises each sample (from {G, S\G}), builds and aligns the
/// superblocks, trains the per-subclass classifiers and mines the relations.
/// Sample values must be distinct; with a target given, none may exceed it.
/// A single sample is accepted with a warning. Errors carry the failing step.
LearnResult learn(const prism::Program& program, const std::vector<std::int64_t>& sample_parameters,
                  std::optional<std::int64_t> target, const PipelineOptions& options);

struct PredictResult {
    std::vector<SuperblockId> predicted;
    Partition approximate;  ///< superblocks split by relation keys
    Partition initial;      ///< approximate intersected with {G, S\G}
    SplitStats split;
    std::vector<StepTiming> timings;
};

/// Predicts superblocks for every target state and splits them into the
/// approximate initial partition.
PredictResult predict_initial_partition(const SuperblockModel& model, const Mdp& target, std::int64_t parameter,
                                        const std::string& goal);

struct InitResult {
    LearnResult learned;
    PredictResult predicted;
    std::vector<StepTiming> timings;  ///< all steps in order
    double seconds = 0.0;             ///< sum of the step timings
};

/// Learning followed by prediction for an already explored target.
InitResult approximate_initial_partition(const prism::Program& program,
                                         const std::vector<std::int64_t>& sample_parameters, std::int64_t target,
                                         const Mdp& target_model, const PipelineOptions& options);

/// Same, exploring the target from `program` first.
InitResult approximate_initial_partition(const prism::Program& program,
                                         const std::vector<std::int64_t>& sample_parameters, std::int64_t target,
                                         const PipelineOptions& options);

/// Fraction of states whose predicted superblock equals `truth`.
double prediction_accuracy(const std::vector<SuperblockId>& predicted, const std::vector<SuperblockId>& truth);

}  // namespace mlbisim::mlinit

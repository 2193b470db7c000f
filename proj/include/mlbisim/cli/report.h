#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlbisim/bisim/refine.h"
#include "mlbisim/mlinit/pipeline.h"
#include "mlbisim/mlinit/relations.h"

namespace mlbisim::cli {

/// Outcome of one minimisation run. Times are wall-clock seconds.
///
/// init_partition_time covers building the initial partition: {G, S\G} for
/// the standard method; sample exploration and minimisation, superblocks,
/// training, mining, prediction and splitting for the ML method. Exploring the
/// target model is reported separately as explore_time and is part of neither.
/// total_time = init_partition_time + refinement time. n_choices counts every
/// (state, choice) pair.
struct RunReport {
    std::string model;
    std::map<std::string, std::int64_t> bindings;
    std::string method;  ///< "standard" or "ml"

    std::size_t n_states = 0;
    std::size_t n_choices = 0;
    std::size_t n_transitions = 0;
    std::size_t peak_states = 0;  ///< largest model explored during the run

    double explore_time = 0.0;
    double init_partition_time = 0.0;
    double total_time = 0.0;

    std::size_t initial_blocks = 0;
    std::size_t final_blocks = 0;
    std::size_t iterations = 0;  ///< splits performed by the refinement
    bisim::RefineStats refine;

    bool is_bisimulation = false;
    std::optional<std::string> witness;
    std::optional<bool> finer_than_oracle;
    std::optional<bool> equal_to_oracle;
    std::string oracle;  ///< how the reference partition was obtained, empty if none
    std::optional<double> accuracy;

    // ML method only.
    std::vector<std::int64_t> samples;
    std::uint64_t seed = 0;
    bool self_consistency = false;
    bool model_loaded = false;
    std::size_t training_states = 0;
    std::size_t superblocks = 0;
    std::size_t subclasses = 0;
    std::size_t trained_subclasses = 0;
    std::size_t pattern_free = 0;
    mlinit::SplitStats split;
    std::vector<mlinit::StepTiming> steps;
    std::vector<std::string> warnings;
};

/// Pretty-printed JSON object with a trailing newline.
std::string report_json(const RunReport& r);

/// A few human-readable lines.
std::string report_text(const RunReport& r);

}  // namespace mlbisim::cli

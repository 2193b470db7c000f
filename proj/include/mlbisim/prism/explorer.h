#pragma once

#include <chrono>
#include <cstddef>
#include <optional>

#include "mlbisim/core/mdp.h"
#include "mlbisim/prism/program.h"

namespace mlbisim::prism {

struct ExploreOptions {
    std::size_t max_states = 20'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::optional<std::size_t> max_memory_bytes;  ///< checked against memory_estimate
};

/// Rough footprint in bytes of an explicit model of the given size; the value
/// compared against ExploreOptions::max_memory_bytes.
std::size_t memory_estimate(std::size_t states, std::size_t variables, std::size_t choices, std::size_t transitions);

/// Breadth-first construction of the reachable state space of a closed
/// program. States are numbered in discovery order; choices per state are the
/// enabled unlabelled commands (module order, then command order) followed by
/// the synchronised products for each action label (order of first
/// appearance). States without enabled commands get one self-loop choice and
/// are recorded as deadlocks.
///
/// Throws ModelError for out-of-range assignments or invalid probabilities and
/// ResourceError when a limit in `options` is exceeded.
Mdp explore(const Program& closed, const ExploreOptions& options = {});

}  // namespace mlbisim::prism

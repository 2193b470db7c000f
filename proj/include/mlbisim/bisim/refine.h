#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"

namespace mlbisim::bisim {

/// {G, S\G} for the label `goal`, omitting an empty side. Throws UsageError
/// when the label is unknown.
Partition initial_partition(const Mdp& m, std::string_view goal);

/// Result of splitting every block against one splitter.
struct SplitResult {
    Partition partition;
    /// Ids of blocks that did not exist before the split.
    std::vector<BlockId> created;
    /// For every block that was split, all of its fragment ids (the original
    /// id first).
    std::vector<std::vector<BlockId>> fragments;
};

/// Splits each block holding a predecessor of block `splitter` by the set,
/// over a state's choices, of the probability of entering the splitter. The
/// fragment with the smallest signature keeps the original id; the others get
/// fresh ids in increasing signature order.
SplitResult refine_by_splitter(const Mdp& m, const Partition& p, BlockId splitter);

/// Emitted each time a block is split during refine_fixpoint.
struct SplitEvent {
    BlockId block;
    std::vector<BlockId> fragments;  ///< original id first
    std::vector<BlockId> enqueued;
    bool was_pending;                ///< the split block was waiting in the queue
    bool full_pass;                  ///< produced by the full-signature pass
};

struct RefineOptions {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::function<void(const SplitEvent&)> on_split;
};

struct RefineStats {
    std::size_t splitters_examined = 0;  ///< dequeued splitters
    std::size_t effective_splitters = 0; ///< dequeued splitters that split at least one block
    std::size_t full_passes = 0;         ///< full-signature passes run
    std::size_t full_pass_splits = 0;    ///< blocks split by full-signature passes
    std::size_t effective_full_passes = 0;
    std::size_t initial_blocks = 0;
    std::size_t final_blocks = 0;

    /// Refinement rounds that changed the partition.
    std::size_t iterations() const { return effective_splitters + effective_full_passes; }
};

struct RefineResult {
    Partition partition;
    RefineStats stats;
};

/// Coarsest strong probabilistic bisimulation finer than `init`. Runs the
/// splitter queue to exhaustion, then a full pass grouping states by the set
/// of per-block distribution vectors of their choices; repeats while the full
/// pass splits. Throws ResourceError when the deadline passes.
RefineResult refine_fixpoint(const Mdp& m, const Partition& init, const RefineOptions& options = {});

}  // namespace mlbisim::bisim

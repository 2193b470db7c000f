#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlbisim/core/distribution.h"

namespace mlbisim {

using BlockId = std::uint32_t;

/// A partition of states 0..n-1 into non-empty, disjoint blocks. Block ids
/// are dense (0..n_blocks-1) but otherwise arbitrary; equality of partitions
/// is equality of the induced equivalence relations.
class Partition {
public:
    Partition() = default;

    /// From a per-state block assignment. Ids need not be dense; they are
    /// compacted in order of first appearance.
    static Partition from_assignment(std::span<const std::uint64_t> block_of);
    /// From explicit blocks; throws ModelError unless they are non-empty,
    /// disjoint and cover 0..n_states-1. Block i keeps id i.
    static Partition from_blocks(std::vector<std::vector<StateId>> blocks, std::size_t n_states);
    static Partition single_block(std::size_t n_states);
    static Partition singletons(std::size_t n_states);

    std::size_t n_states() const { return block_of_.size(); }
    std::size_t n_blocks() const { return blocks_.size(); }
    BlockId block_of(StateId s) const { return block_of_[s]; }
    std::span<const StateId> block(BlockId b) const { return blocks_[b]; }
    const std::vector<std::vector<StateId>>& blocks() const { return blocks_; }
    const std::vector<BlockId>& assignment() const { return block_of_; }

    /// Same relation, blocks renumbered by their smallest state and members sorted.
    Partition canonical() const;

    /// Intersection of two partitions over the same states (common refinement).
    static Partition meet(const Partition& a, const Partition& b);

private:
    std::vector<BlockId> block_of_;
    std::vector<std::vector<StateId>> blocks_;
};

/// True iff every block of `fine` lies inside some block of `coarse`.
/// Throws UsageError on a state-count mismatch.
bool finer_than(const Partition& fine, const Partition& coarse);

/// True iff both partitions induce the same equivalence relation.
bool partition_equal(const Partition& a, const Partition& b);

}  // namespace mlbisim

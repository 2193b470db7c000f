#include "mlbisim/core/partition.h"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "mlbisim/core/errors.h"

namespace mlbisim {

Partition Partition::from_assignment(std::span<const std::uint64_t> block_of) {
    Partition p;
    p.block_of_.resize(block_of.size());
    std::unordered_map<std::uint64_t, BlockId> dense;
    for (StateId s = 0; s < block_of.size(); ++s) {
        auto [it, inserted] = dense.try_emplace(block_of[s], static_cast<BlockId>(p.blocks_.size()));
        if (inserted) p.blocks_.emplace_back();
        p.block_of_[s] = it->second;
        p.blocks_[it->second].push_back(s);
    }
    return p;
}

Partition Partition::from_blocks(std::vector<std::vector<StateId>> blocks, std::size_t n_states) {
    constexpr BlockId unassigned = std::numeric_limits<BlockId>::max();
    Partition p;
    p.block_of_.assign(n_states, unassigned);
    for (BlockId b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) throw ModelError("partition block " + std::to_string(b) + " is empty");
        for (StateId s : blocks[b]) {
            if (s >= n_states) throw ModelError("partition references unknown state " + std::to_string(s));
            if (p.block_of_[s] != unassigned) throw ModelError("state " + std::to_string(s) + " is in two blocks");
            p.block_of_[s] = b;
        }
    }
    for (StateId s = 0; s < n_states; ++s) {
        if (p.block_of_[s] == unassigned) throw ModelError("state " + std::to_string(s) + " is in no block");
    }
    p.blocks_ = std::move(blocks);
    return p;
}

Partition Partition::single_block(std::size_t n_states) {
    std::vector<std::uint64_t> zeros(n_states, 0);
    return from_assignment(zeros);
}

Partition Partition::singletons(std::size_t n_states) {
    std::vector<std::uint64_t> ids(n_states);
    for (std::size_t s = 0; s < n_states; ++s) ids[s] = s;
    return from_assignment(ids);
}

Partition Partition::canonical() const {
    std::vector<std::uint64_t> ids(block_of_.begin(), block_of_.end());
    return from_assignment(ids);
}

Partition Partition::meet(const Partition& a, const Partition& b) {
    if (a.n_states() != b.n_states()) throw UsageError("partitions over different state counts");
    std::vector<std::uint64_t> ids(a.n_states());
    std::map<std::pair<BlockId, BlockId>, std::uint64_t> pairs;
    for (StateId s = 0; s < a.n_states(); ++s) {
        auto [it, inserted] = pairs.try_emplace({a.block_of(s), b.block_of(s)}, pairs.size());
        ids[s] = it->second;
    }
    return from_assignment(ids);
}

bool finer_than(const Partition& fine, const Partition& coarse) {
    if (fine.n_states() != coarse.n_states()) throw UsageError("partitions over different state counts");
    for (const auto& block : fine.blocks()) {
        BlockId target = coarse.block_of(block.front());
        for (StateId s : block) {
            if (coarse.block_of(s) != target) return false;
        }
    }
    return true;
}

bool partition_equal(const Partition& a, const Partition& b) {
    if (a.n_states() != b.n_states()) throw UsageError("partitions over different state counts");
    return a.n_blocks() == b.n_blocks() && a.canonical().assignment() == b.canonical().assignment();
}

}  // namespace mlbisim

#pragma once

#include <cstdint>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"

namespace mlbisim::mlinit {

/// Values of the non-parametric variables of a state, in variable order. Also
/// the key of the state's subclass.
using Projection = std::vector<std::int64_t>;
/// Sorted, duplicate-free set of projections.
using ProjectionSet = std::vector<Projection>;

using SuperblockId = std::uint32_t;
constexpr SuperblockId kSingular = 0;

/// Feature vector of a state: every variable value, then for each parametric
/// variable its slack (upper bound minus value).
std::vector<std::int64_t> features(const Mdp& m, StateId s);
std::size_t feature_count(const Mdp& m);

Projection projection(const Mdp& m, StateId s);
/// Values of the parametric variables of a state, in variable order.
std::vector<std::int64_t> parametric_values(const Mdp& m, StateId s);

/// Superblocks of one minimised sample. Blocks with at least two states and
/// the same projection set form one superblock; all singleton blocks form the
/// singular superblock (index 0). Non-singular superblocks are numbered from
/// 1 in increasing order of their projection sets.
struct SampleSuperblocks {
    std::vector<ProjectionSet> projections;          ///< per superblock; empty for the singular one
    std::vector<std::vector<BlockId>> blocks;        ///< per superblock, increasing block ids
    std::vector<SuperblockId> eta;                   ///< per state
};

SampleSuperblocks compute_superblocks(const Mdp& m, const Partition& p);

/// Superblocks matched across samples by projection set. A projection set
/// that is a superblock in every sample gets a common id (1.. in increasing
/// order of projection sets); everything else maps to the singular superblock.
struct SuperblockCatalog {
    std::vector<ProjectionSet> projections;                 ///< per global superblock
    std::vector<std::vector<SuperblockId>> eta;             ///< per sample, per state
    std::vector<std::vector<std::vector<BlockId>>> blocks;  ///< per sample, per global superblock
    std::size_t unmatched = 0;                              ///< local superblocks folded into the singular one

    std::size_t size() const { return projections.size(); }
};

SuperblockCatalog align_superblocks(const std::vector<SampleSuperblocks>& samples);

/// Global superblock of every state of a minimised model under an existing
/// catalog: blocks whose projection set names a catalog superblock map to it,
/// all other states to the singular superblock.
std::vector<SuperblockId> true_superblocks(const Mdp& m, const Partition& p, const SuperblockCatalog& catalog);

}  // namespace mlbisim::mlinit

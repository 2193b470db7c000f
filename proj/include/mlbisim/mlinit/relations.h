#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"
#include "mlbisim/core/rational.h"
#include "mlbisim/mlinit/superblocks.h"

namespace mlbisim::mlinit {

/// Block key of the states of one projection within a superblock:
/// coefficients . parametric_values + (alpha * parameter + beta).
struct ProjectionRelation {
    Projection projection;
    std::vector<int> coefficients;  ///< entries in {-1, 0, 1}
    Rational alpha;
    Rational beta;

    Rational key(std::span<const std::int64_t> parametric, std::int64_t parameter) const;
};

/// Relations of one superblock, one per projection of its projection set, the
/// first being the reference projection (offset zero). A pattern-free
/// superblock has no relations and is never split.
struct RelationPattern {
    SuperblockId superblock = kSingular;
    bool pattern_free = true;
    std::string reason;  ///< why no pattern was found
    std::vector<ProjectionRelation> relations;

    const ProjectionRelation* find(const Projection& p) const;
};

struct MiningSample {
    const Mdp* mdp;
    const Partition* partition;  ///< the sample's bisimulation
    std::int64_t parameter;
};

/// All non-zero vectors in {-1,0,1}^n ordered by number of non-zero entries,
/// then by positions of the non-zeros, then with +1 before -1.
std::vector<std::vector<int>> coefficient_candidates(std::size_t n);

/// For every non-singular superblock of the catalog: pick the first candidate
/// whose value on the reference projection is constant within each block and
/// distinct between the blocks of every sample; then for each other
/// projection the first candidate that reproduces those block values up to a
/// per-sample offset, with the offsets affine in the sample parameter.
std::vector<RelationPattern> mine_relations(const SuperblockCatalog& catalog, const std::vector<MiningSample>& samples);

struct SplitStats {
    std::size_t keyed_states = 0;    ///< split by a relation key
    std::size_t stray_states = 0;    ///< projection outside the superblock's set
    std::size_t unsplit_states = 0;  ///< singular or pattern-free superblock
};

/// Approximate partition of a target model from predicted superblocks: within
/// a superblock with a pattern, states are grouped by relation key evaluated
/// at `parameter`; states whose projection is not in the superblock's set form
/// one block per superblock; singular and pattern-free superblocks each form a
/// single block.
Partition split_superblocks(const Mdp& target, const std::vector<SuperblockId>& predicted,
                            const std::vector<ProjectionSet>& projections, const std::vector<RelationPattern>& patterns,
                            std::int64_t parameter, SplitStats* stats = nullptr);

}  // namespace mlbisim::mlinit

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mlbisim/core/rational.h"

namespace mlbisim {

using StateId = std::uint32_t;

/// A probability in [0, 1]. Range checks happen where probabilities enter a
/// Distribution; arithmetic is plain exact rational arithmetic.
using Prob = Rational;

/// Sparse probability distribution over states. Entries are sorted by state,
/// strictly positive, and sum to exactly one.
class Distribution {
public:
    using Entry = std::pair<StateId, Prob>;

    Distribution() = default;

    /// Builds a distribution from arbitrary entries: duplicates are merged and
    /// zero entries dropped. Throws ModelError if a probability is outside
    /// [0, 1] or the total is not exactly 1.
    explicit Distribution(std::vector<Entry> entries);

    static Distribution dirac(StateId target);

    std::span<const Entry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    /// Probability of one state (zero when outside the support).
    Prob at(StateId state) const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<Entry> entries_;
};

/// mu[T]: the exact probability mass that `mu` puts on `block`. The block may
/// be given in any order and may contain states outside the support.
Prob accumulate(const Distribution& mu, std::span<const StateId> block);

}  // namespace mlbisim

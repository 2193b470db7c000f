#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"

namespace mlbisim::testing {

/// Calls `visit` with every set partition of {0..n-1} as a restricted growth
/// string (state -> block, block ids in order of first use).
inline void for_each_set_partition(std::size_t n, const std::function<void(const std::vector<std::uint64_t>&)>& visit) {
    std::vector<std::uint64_t> rgs(n, 0);
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t used) {
        if (i == n) {
            visit(rgs);
            return;
        }
        for (std::uint64_t b = 0; b <= used && b < n; ++b) {
            rgs[i] = b;
            rec(i + 1, std::max(used, b + 1));
        }
    };
    if (n == 0) {
        visit(rgs);
        return;
    }
    rgs[0] = 0;
    rec(1, 1);
}

/// Definition check written directly from the relation: equal labels, and
/// each choice of one state matched by a choice of the other with equal mass
/// on every block.
inline bool satisfies_definition(const Mdp& m, const std::vector<std::uint64_t>& block_of) {
    using Vector = std::map<std::uint64_t, Rational>;
    auto lift = [&](const Choice& c) {
        Vector v;
        for (const auto& [t, p] : c.distribution.entries()) v[block_of[t]] = v[block_of[t]] + p;
        return v;
    };
    auto lifted = [&](StateId s) {
        std::set<Vector> out;
        for (const auto& c : m.choices(s)) out.insert(lift(c));
        return out;
    };
    for (StateId s = 0; s < m.n_states(); ++s) {
        for (StateId t = s + 1; t < m.n_states(); ++t) {
            if (block_of[s] != block_of[t]) continue;
            for (std::size_t l = 0; l < m.label_names().size(); ++l) {
                if (m.has_label(s, l) != m.has_label(t, l)) return false;
            }
            if (lifted(s) != lifted(t)) return false;
        }
    }
    return true;
}

/// Coarsest partition satisfying the definition, found by exhaustive search
/// over all set partitions. Exponential; meant for at most eight states.
inline Partition brute_force_bisimulation(const Mdp& m) {
    std::vector<std::uint64_t> best;
    std::uint64_t best_blocks = m.n_states() + 1;
    for_each_set_partition(m.n_states(), [&](const std::vector<std::uint64_t>& rgs) {
        const std::uint64_t blocks = rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
        if (blocks < best_blocks && satisfies_definition(m, rgs)) {
            best = rgs;
            best_blocks = blocks;
        }
    });
    return Partition::from_assignment(best);
}

}  // namespace mlbisim::testing

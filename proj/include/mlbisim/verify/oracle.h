#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"

namespace mlbisim::verify {

constexpr std::size_t kDefaultOracleLimit = 2000;

/// Coarsest strong probabilistic bisimulation respecting label `goal`,
/// computed by plain fixed-point iteration: states are regrouped by
/// (current block, set of per-block distributions of their choices) until the
/// block count stops growing. Throws ResourceError above `limit` states.
Partition coarsest_bisimulation(const Mdp& m, std::string_view goal, std::size_t limit = kDefaultOracleLimit);

/// Two states of one block that are not bisimilar under the partition.
struct Witness {
    StateId s = 0;
    StateId t = 0;
    /// Choice of `s` (local index) without a matching choice of `t`; empty
    /// when the states differ on a label instead.
    std::optional<std::size_t> choice;
    std::string label;

    std::string describe(const Mdp& m) const;
};

struct BisimulationCheck {
    bool ok = true;
    std::optional<Witness> witness;
};

/// Whether `p` is a strong probabilistic bisimulation: every two states of a
/// block agree on each label in `labels` and every choice of one has a choice
/// of the other with the same probability for every block.
BisimulationCheck is_bisimulation(const Mdp& m, const Partition& p, const std::vector<std::string>& labels);

struct ReachabilityOptions {
    double epsilon = 1e-10;
    std::size_t max_iterations = 10'000'000;
};

/// Maximal probability, over all schedulers, of eventually reaching a state
/// labelled `goal`. States that cannot reach the goal get 0 and states that
/// can reach it almost surely get 1 before iterating; the rest are computed
/// by Jacobi value iteration until the largest change is below epsilon.
/// Throws ResourceError when max_iterations is exceeded.
std::vector<double> max_reachability(const Mdp& m, std::string_view goal, const ReachabilityOptions& options = {});

/// Largest |value(s) - quotient_value(block(s))| over all states.
double max_quotient_deviation(const std::vector<double>& original, const std::vector<double>& quotient,
                              const Partition& p);

}  // namespace mlbisim::verify

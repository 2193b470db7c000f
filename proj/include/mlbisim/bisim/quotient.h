#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlbisim/core/mdp.h"
#include "mlbisim/core/partition.h"

namespace mlbisim::bisim {

struct Quotient {
    Mdp mdp;
    /// Caller's assertion that the partition is a bisimulation; carried along
    /// so reports can flag quotients of unchecked partitions.
    bool verified = false;
};

struct QuotientOptions {
    bool verified = false;
    /// Labels carried over; all labels when unset.
    std::optional<std::vector<std::string>> labels;
};

/// One state per block, numbered by block id. A block's choices are the
/// distinct lifted distributions of its smallest state, in that state's choice
/// order; valuations are also taken from that state. The selected labels are
/// inherited and must be constant on every block (ModelError otherwise).
Quotient quotient(const Mdp& m, const Partition& p, const QuotientOptions& options = {});

}  // namespace mlbisim::bisim

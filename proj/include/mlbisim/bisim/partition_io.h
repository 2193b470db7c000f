#pragma once

#include <filesystem>
#include <iosfwd>

#include "mlbisim/core/partition.h"

namespace mlbisim::bisim {

/// Header "PARTITION n_states n_blocks", then "state block" per state in state
/// order. Blocks are written in canonical numbering (by smallest member).
void write_partition(const Partition& p, std::ostream& out);
void save_partition(const Partition& p, const std::filesystem::path& path);

/// Throws ParseError (with line number) on malformed or inconsistent input.
Partition read_partition(std::istream& in);
Partition load_partition(const std::filesystem::path& path);

}  // namespace mlbisim::bisim

#include "mlbisim/bisim/partition_io.h"

#include <fstream>
#include <sstream>

#include "mlbisim/core/errors.h"

namespace mlbisim::bisim {

void write_partition(const Partition& p, std::ostream& out) {
    Partition c = p.canonical();
    out << "PARTITION " << c.n_states() << " " << c.n_blocks() << "\n";
    for (StateId s = 0; s < c.n_states(); ++s) out << s << " " << c.block_of(s) << "\n";
}

void save_partition(const Partition& p, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_partition(p, out);
}

Partition read_partition(std::istream& in) {
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) throw ParseError("partition: empty input", 1);
    std::istringstream header(line);
    std::string magic;
    long long n_states = -1;
    long long n_blocks = -1;
    std::string extra;
    if (!(header >> magic >> n_states >> n_blocks) || magic != "PARTITION" || n_states < 0 || n_blocks < 0 ||
        (header >> extra)) {
        throw ParseError("partition: header must be 'PARTITION n_states n_blocks'", lineno);
    }
    std::vector<std::uint64_t> assignment(static_cast<std::size_t>(n_states));
    std::vector<bool> seen(assignment.size(), false);
    std::vector<bool> used(static_cast<std::size_t>(n_blocks), false);
    long long rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream row(line);
        long long s = 0;
        long long b = 0;
        if (!(row >> s)) continue;
        if (!(row >> b) || (row >> extra)) throw ParseError("partition: expected 'state block'", lineno);
        if (s < 0 || s >= n_states) throw ParseError("partition: state " + std::to_string(s) + " out of range", lineno);
        if (b < 0 || b >= n_blocks) throw ParseError("partition: block " + std::to_string(b) + " out of range", lineno);
        if (seen[s]) throw ParseError("partition: state " + std::to_string(s) + " listed twice", lineno);
        seen[s] = true;
        used[b] = true;
        assignment[s] = static_cast<std::uint64_t>(b);
        ++rows;
    }
    if (rows != n_states) {
        throw ParseError("partition: header declares " + std::to_string(n_states) + " states, found " +
                             std::to_string(rows),
                         lineno);
    }
    for (long long b = 0; b < n_blocks; ++b) {
        if (!used[b]) throw ParseError("partition: block " + std::to_string(b) + " is empty", lineno);
    }
    return Partition::from_assignment(assignment);
}

Partition load_partition(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_partition(in);
}

}  // namespace mlbisim::bisim

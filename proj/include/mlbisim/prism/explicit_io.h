#pragma once

#include <filesystem>
#include <iosfwd>

#include "mlbisim/core/mdp.h"

namespace mlbisim::prism {

enum class ProbFormat { rational, decimal };

/// Writes `<basename>.sta`, `<basename>.tra` and `<basename>.lab`.
///
/// .sta: header "(v1,...,vk)" then "i:(x1,...,xk)"; booleans as true/false.
/// .tra: header "n_states n_choices n_transitions" then
///       "src choice dst prob [action]" with choice local to src.
/// .lab: "0=\"init\" 1=\"deadlock\" 2=\"...\"" then "s: id id ..." for every
///       state carrying at least one label.
void export_explicit(const Mdp& m, const std::filesystem::path& basename, ProbFormat format = ProbFormat::rational);

void write_sta(const Mdp& m, std::ostream& out);
void write_tra(const Mdp& m, std::ostream& out, ProbFormat format = ProbFormat::rational);
void write_lab(const Mdp& m, std::ostream& out);

/// Reads the triple written by export_explicit. Variable bounds are the
/// observed minimum and maximum of each column and no variable is marked
/// parametric. Decimal probabilities are read exactly; if a distribution then
/// fails to sum to one, each entry is replaced by its closest small-denominator
/// rational. Throws ParseError naming the file and line.
Mdp import_explicit(const std::filesystem::path& basename);

Mdp read_explicit(std::istream& sta, std::istream& tra, std::istream& lab);

}  // namespace mlbisim::prism

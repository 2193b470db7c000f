#pragma once

#include "mlbisim/prism/program.h"

namespace mlbisim::prism::detail {

/// Recomputes VariableDecl::parametric: a variable is parametric when its
/// upper bound mentions a parameter, directly or through other constants.
void mark_parametric(Program& prog);

}  // namespace mlbisim::prism::detail

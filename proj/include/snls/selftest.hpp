#pragma once

#include <iosfwd>

namespace snls {

/// Built-in oracle checks behind the CLI `selftest` subcommand: generator
/// known answers, Jacobian vs central differences, Newton vs a damped
/// fixed-point iteration, noise increment statistics against tau * F_Q,
/// bit-exact coarsening, and the FEM norms against closed-form integrals.
/// Prints one pass/fail line per check; returns true when all pass.
bool run_selftest(std::ostream& os);

} // namespace snls

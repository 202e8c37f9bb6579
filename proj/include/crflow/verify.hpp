#pragma once

#include <string>
#include <vector>

namespace crflow {

struct Check {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

/// Pointwise curvature identities: two-way Ricci agreement, closed-form Hopf
/// values, torsion antisymmetry, Kahler implications, stencil order.
std::vector<Check> verify_kernel();

/// The exact Hopf flow line: flow residual (closed form and stencil), Ricci
/// constancy, scalar law, singular time, pullback, volume law.
std::vector<Check> verify_hopf();

/// Tensor vs potential formulation agreement on the canonical smoothing torus.
std::vector<Check> verify_equivalence();

/// Evolution identities: dR/dt = Lap R + |Ric|^2 refinement study and the
/// d(phi_dot)/dt = -R identity.
std::vector<Check> verify_lemma();

std::vector<Check> run_verify_suite(const std::string& suite);

/// "ok <name> observed=... bound=..." / "FAIL ..." lines.
std::string format_checks(const std::vector<Check>& checks);

bool all_passed(const std::vector<Check>& checks);

}  // namespace crflow

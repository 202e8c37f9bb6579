#pragma once

#include <variant>
#include <vector>

#include "crflow/errors.hpp"
#include "crflow/point.hpp"

namespace crflow {

/// Flat torus: each real coordinate of z_k is periodic with period periods[k].
struct TorusDomain {
  int n = 1;
  std::vector<double> periods;  // size n
};

/// Fundamental annulus 1 <= r < |alpha| of the quotient z ~ alpha z. All
/// quantities of interest are local, so evaluation is allowed anywhere on
/// C^n \ {0}; only r -> 0 is out of bounds.
struct HopfDomain {
  int n = 2;
  double alpha_modulus = 2.0;
};

using Domain = std::variant<TorusDomain, HopfDomain>;

inline int domain_dim(const Domain& d) {
  return std::visit([](const auto& x) { return x.n; }, d);
}

/// Throws DomainError when a point (plus a stencil footprint of radius
/// `reach`) cannot be evaluated.
inline void check_in_domain(const Domain& d, const ComplexPoint& p,
                            double reach = 0.0) {
  if (p.dim() != domain_dim(d))
    throw DomainError("point dimension does not match the domain");
  if (std::holds_alternative<HopfDomain>(d)) {
    const double r = std::sqrt(p.r2());
    if (!(r > 4.0 * reach) || !(r > 0.0))
      throw DomainError("Hopf domain: point too close to the origin");
  }
}

}  // namespace crflow

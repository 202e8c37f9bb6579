#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "crflow/point.hpp"

namespace crflow {

/// Deterministic sampler. Only the mt19937_64 engine from the standard
/// library is used (its sequence is pinned by the standard); all value
/// transforms are done here so streams are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Uniform direction on the unit sphere of C^n.
  ComplexPoint sphere_direction(int n) {
    std::vector<cplx> z(static_cast<std::size_t>(n));
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& zi : z) {
        zi = cplx(normal(), normal());
        norm2 += std::norm(zi);
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& zi : z) zi *= inv;
    return ComplexPoint(std::move(z));
  }

  /// Point of the Hopf fundamental annulus: radius uniform in [r_lo, r_hi),
  /// direction uniform on the sphere.
  ComplexPoint annulus_point(int n, double r_lo, double r_hi) {
    const double r = uniform(r_lo, r_hi);
    ComplexPoint p = sphere_direction(n);
    for (int i = 0; i < n; ++i) p[i] *= r;
    return p;
  }

  /// Point of the torus with the given per-complex-coordinate periods.
  ComplexPoint torus_point(const std::vector<double>& periods) {
    std::vector<cplx> z(periods.size());
    for (std::size_t k = 0; k < periods.size(); ++k)
      z[k] = cplx(uniform(0.0, periods[k]), uniform(0.0, periods[k]));
    return ComplexPoint(std::move(z));
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crflow

#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include "crflow/errors.hpp"

namespace crflow {

using cplx = std::complex<double>;

/// A point in local holomorphic coordinates. The real-coordinate view
/// interleaves as axis 2k = Re z_k, axis 2k+1 = Im z_k.
class ComplexPoint {
 public:
  ComplexPoint() = default;
  explicit ComplexPoint(std::vector<cplx> coords) : z_(std::move(coords)) {
    if (z_.empty()) throw ContractViolation("ComplexPoint needs dimension >= 1");
  }
  ComplexPoint(std::initializer_list<cplx> coords)
      : ComplexPoint(std::vector<cplx>(coords)) {}

  int dim() const { return static_cast<int>(z_.size()); }
  const cplx& operator[](int i) const { return z_[static_cast<std::size_t>(i)]; }
  cplx& operator[](int i) { return z_[static_cast<std::size_t>(i)]; }
  const std::vector<cplx>& coords() const { return z_; }

  double r2() const {
    double s = 0.0;
    for (const auto& z : z_) s += std::norm(z);
    return s;
  }

  double real_coord(int axis) const {
    const cplx& z = z_[static_cast<std::size_t>(axis / 2)];
    return (axis % 2 == 0) ? z.real() : z.imag();
  }

  /// Copy of this point shifted by `delta` along one real axis.
  ComplexPoint shifted(int axis, double delta) const {
    ComplexPoint p = *this;
    auto& z = p.z_[static_cast<std::size_t>(axis / 2)];
    if (axis % 2 == 0)
      z = cplx(z.real() + delta, z.imag());
    else
      z = cplx(z.real(), z.imag() + delta);
    return p;
  }

 private:
  std::vector<cplx> z_;
};

}  // namespace crflow

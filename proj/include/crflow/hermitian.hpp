#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "crflow/errors.hpp"
#include "crflow/point.hpp"

namespace crflow {

/// n x n complex matrix with conjugate symmetry, entry (i,j) = g_{i j̄}.
///
/// Index conventions used throughout: with G the entry matrix, the inverse
/// metric has g^{i j̄} = (G^{-1})_{ji}, so that g^{i j̄} h_{i j̄} = tr(G^{-1} H).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Validates conjugate symmetry to `tol` (relative to the entry scale) and
  /// then symmetrizes, so downstream arithmetic cannot drift.
  static HermitianMatrix from(const Eigen::MatrixXcd& m, double tol = 1e-10);

  /// Skips the symmetry check; for matrices Hermitian by construction.
  static HermitianMatrix trusted(Eigen::MatrixXcd m) {
    HermitianMatrix h;
    h.m_ = std::move(m);
    return h;
  }

  const Eigen::MatrixXcd& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  cplx operator()(int i, int j) const { return m_(i, j); }

  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd m_;
};

struct PositivityResult {
  bool is_positive = false;
  double min_eigenvalue = 0.0;
};

/// Min eigenvalue of a Hermitian matrix; positive iff min eigenvalue exceeds
/// the tolerance (default 1e-12).
PositivityResult positivity(const HermitianMatrix& g, double tol = 1e-12);

struct TraceAndNorm {
  double trace = 0.0;    // tr_g h = g^{i j̄} h_{i j̄}
  double norm_sq = 0.0;  // |h|^2_g = g^{k j̄} g^{i p̄} h_{k p̄} h_{i j̄}
};

/// Metric trace and squared norm of `h` with respect to positive `g`.
TraceAndNorm trace_and_norms(const HermitianMatrix& g, const HermitianMatrix& h);

/// Hermiticity residual max_ij |M - M^H| used by symmetry assertions.
double hermiticity_residual(const Eigen::MatrixXcd& m);

/// Min eigenvalue of a raw Hermitian entry matrix (closed form for n <= 2).
double min_eig_hermitian(const Eigen::MatrixXcd& m);

}  // namespace crflow

#pragma once

#include <vector>

#include "crflow/kernel.hpp"
#include "crflow/metric_field.hpp"

namespace crflow {

/// Flow evaluated at or beyond its maximal existence time.
struct SingularTimeError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Trigonometric polynomials: closed-form periodic fields whose Wirtinger
// derivatives of any order stay in the same class (cos(w x + phase) cycles
// under d/dx by a phase shift of pi/2 and a factor w).

struct TrigFactor {
  int axis = 0;       // real axis, 2k = Re z_k, 2k+1 = Im z_k
  double freq = 1.0;  // radians per unit of the real coordinate
  double phase = 0.0;
};

struct TrigTerm {
  cplx coeff{0.0, 0.0};
  std::vector<TrigFactor> factors;  // at most one per axis
  cplx eval(const ComplexPoint& p) const;
};

struct TrigPoly {
  std::vector<TrigTerm> terms;
  cplx eval(const ComplexPoint& p) const;
  TrigPoly dx(int axis) const;
  TrigPoly wirt_d(int i) const;     // (dx - i dy)/2 on complex coordinate i
  TrigPoly wirt_dbar(int j) const;  // (dx + i dy)/2
  TrigPoly conjugate() const;
  TrigPoly operator+(const TrigPoly& other) const;
  TrigPoly scaled(cplx s) const;
  static TrigPoly constant(cplx c);
};

// ---------------------------------------------------------------------------
// Hopf manifolds

struct HopfModel {
  int n = 2;
  double alpha_modulus = 2.0;
  HopfModel(int n, double alpha_modulus);
};

/// The standard metric g_{i jbar} = delta_ij / r^2 on the annulus.
MetricField hopf_metric(const HopfModel& m,
                        DerivativeMode mode = DerivativeMode::closed_form,
                        double h = 1e-3, bool richardson = false);

/// The exact flow line g(t) = (1 - nt) delta / r^2 + nt (zbar_i z_j) / r^4,
/// i.e. g(0) minus t times the Ricci form of g(0). Positive for t < 1/n.
MetricField hopf_exact_flow(const HopfModel& m, double t,
                            DerivativeMode mode = DerivativeMode::closed_form,
                            double h = 1e-3, bool richardson = false);

/// Scalar curvature along the exact flow line: (n-1) / (1/n - t), spatially
/// constant.
double hopf_exact_scalar(const HopfModel& m, double t);

/// Maximal existence time 1/n.
double hopf_singular_time(const HopfModel& m);

// ---------------------------------------------------------------------------
// Tori

struct CosineEntry {
  int row = 0;
  int col = 0;
  cplx coeff{0.0, 0.0};  // must be real when row == col
  std::vector<TrigFactor> factors;
};

/// delta + sum of cosine entry perturbations + ddbar(potential). Positivity is
/// probed on a lattice at construction. Potential-type perturbations stay
/// Kahler; entry perturbations generally do not.
class TorusModel {
 public:
  TorusModel(int n, std::vector<double> periods,
             std::vector<CosineEntry> entries = {},
             std::vector<TrigTerm> potential = {});

  int n() const { return n_; }
  const std::vector<double>& periods() const { return periods_; }
  const std::vector<CosineEntry>& entries() const { return entries_; }
  const std::vector<TrigTerm>& potential() const { return potential_; }
  const std::vector<TrigPoly>& entry_polys() const { return entry_polys_; }
  bool is_flat() const { return entries_.empty() && potential_.empty(); }

 private:
  int n_ = 1;
  std::vector<double> periods_;
  std::vector<CosineEntry> entries_;
  std::vector<TrigTerm> potential_;
  std::vector<TrigPoly> entry_polys_;  // n*n row-major, hermitian by build
};

MetricField torus_metric(const TorusModel& m,
                         DerivativeMode mode = DerivativeMode::closed_form,
                         double h = 1e-3, bool richardson = false);

}  // namespace crflow

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "crflow/hermitian.hpp"
#include "crflow/kernel.hpp"
#include "crflow/metric_field.hpp"

namespace crflow {

/// Uniform periodic lattice over the 2n real coordinates of an n-dimensional
/// torus, N points per real axis. Axis 0 is slowest in the flat layout.
class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  PeriodicGrid(int n, int N, std::vector<double> periods);

  int n() const { return n_; }
  int N() const { return N_; }
  int axes() const { return 2 * n_; }
  std::size_t size() const { return size_; }
  const std::vector<double>& periods() const { return periods_; }
  double spacing(int axis) const { return periods_[static_cast<std::size_t>(axis / 2)] / N_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  std::size_t neighbor(std::size_t flat, int axis, int offset) const {
    const std::size_t s = stride(axis);
    const int ia = static_cast<int>((flat / s) % static_cast<std::size_t>(N_));
    int ib = (ia + offset) % N_;
    if (ib < 0) ib += N_;
    return flat + (static_cast<std::size_t>(ib) - static_cast<std::size_t>(ia)) * s;
  }

  ComplexPoint point(std::size_t flat) const;

  bool compatible(const PeriodicGrid& o) const {
    return n_ == o.n_ && N_ == o.N_ && periods_ == o.periods_;
  }

 private:
  int n_ = 0;
  int N_ = 0;
  std::vector<double> periods_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

struct ScalarGrid {
  PeriodicGrid grid;
  std::vector<double> v;
  ScalarGrid() = default;
  explicit ScalarGrid(const PeriodicGrid& g) : grid(g), v(g.size(), 0.0) {}
};

struct ComplexGrid {
  PeriodicGrid grid;
  std::vector<cplx> v;
  ComplexGrid() = default;
  explicit ComplexGrid(const PeriodicGrid& g) : grid(g), v(g.size(), cplx(0.0)) {}
};

/// Grid of Hermitian entry matrices, point-major: v[p*n*n + i*n + j].
struct HermitianGrid {
  PeriodicGrid grid;
  int n = 0;
  std::vector<cplx> v;
  HermitianGrid() = default;
  explicit HermitianGrid(const PeriodicGrid& g)
      : grid(g), n(g.n()), v(g.size() * static_cast<std::size_t>(g.n()) * g.n()) {}

  cplx& at(std::size_t p, int i, int j) {
    return v[(p * n + i) * n + j];
  }
  const cplx& at(std::size_t p, int i, int j) const {
    return v[(p * n + i) * n + j];
  }
  Eigen::MatrixXcd matrix(std::size_t p) const {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = at(p, i, j);
    return m;
  }
  void set_matrix(std::size_t p, const Eigen::MatrixXcd& m) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) at(p, i, j) = m(i, j);
  }
};

// --- stencil sweeps (4th-order central, periodic wrap) ---------------------

ScalarGrid d_axis(const ScalarGrid& f, int axis);
ScalarGrid d2_axis(const ScalarGrid& f, int axis);
ComplexGrid d_axis(const ComplexGrid& f, int axis);
ComplexGrid d2_axis(const ComplexGrid& f, int axis);

/// Wirtinger first derivatives of a complex field.
ComplexGrid wirt_d(const ComplexGrid& f, int i);
ComplexGrid wirt_dbar(const ComplexGrid& f, int j);

/// Full ddbar Hessian of a real field; Hermitian at every point by build.
HermitianGrid hermitian_hessian(const ScalarGrid& f);

// --- pointwise / curvature operators ----------------------------------------

/// Sampled metric of a closed-form (or any) metric field on the lattice.
HermitianGrid sample_metric(const MetricField& g, const PeriodicGrid& grid);

/// log det g per point. Throws PositivityLossError at the first point whose
/// matrix fails positivity.
ScalarGrid logdet_grid(const HermitianGrid& g);

/// Chern-Ricci by the determinant route: -ddbar(log det g).
HermitianGrid ricci_logdet(const HermitianGrid& g);

/// Chern-Ricci by the connection-trace route: -d_jbar tr(G^{-1} d_i G).
/// Symmetrized after the Hermiticity residual is checked against
/// sym_tol * (1 + entry scale); pass the lattice-appropriate tolerance.
HermitianGrid ricci_trace(const HermitianGrid& g, double sym_tol);

/// R = Re tr(G^{-1} Ric) per point.
ScalarGrid scalar_curvature(const HermitianGrid& g, const HermitianGrid& ric);

/// Canonical Laplacian tr(G^{-1} ddbar f) per point.
ScalarGrid laplacian(const HermitianGrid& g, const ScalarGrid& f);

/// |Ric|^2_g = Re tr(G^{-1} Ric G^{-1} Ric) per point.
ScalarGrid ric_norm_sq(const HermitianGrid& g, const HermitianGrid& ric);

ScalarGrid det_grid(const HermitianGrid& g);

/// Min eigenvalue over the grid; argmin written when requested.
double grid_min_eig(const HermitianGrid& g, std::size_t* argmin = nullptr);

/// Kahler and Gauduchon residual sup-norms of a sampled metric (0 for n = 1).
FormResiduals grid_form_residuals(const HermitianGrid& g);

/// Wraps a sampled grid as a MetricField (stencil mode, h = lattice spacing,
/// exact lookup at lattice points, DomainError off-lattice). Requires equal
/// periods so all axes share one spacing.
MetricField grid_metric_field(std::shared_ptr<const HermitianGrid> g);

// --- small linear-combination helpers for time stepping --------------------

void axpy(ScalarGrid& y, double a, const ScalarGrid& x);
void axpy(HermitianGrid& y, double a, const HermitianGrid& x);

}  // namespace crflow

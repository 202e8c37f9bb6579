#include "crflow/grid.hpp"

#include <Eigen/LU>
#include <cmath>

#include "crflow/parallel.hpp"
#include "crflow/stencil.hpp"

namespace crflow {

PeriodicGrid::PeriodicGrid(int n, int N, std::vector<double> periods)
    : n_(n), N_(N), periods_(std::move(periods)) {
  if (n_ < 1) throw ContractViolation("PeriodicGrid: dimension must be >= 1");
  if (N_ < 5) throw ContractViolation("PeriodicGrid: need at least 5 points per axis");
  if (static_cast<int>(periods_.size()) != n_)
    throw ContractViolation("PeriodicGrid: one period per complex coordinate");
  strides_.assign(static_cast<std::size_t>(axes()), 1);
  for (int a = axes() - 2; a >= 0; --a)
    strides_[static_cast<std::size_t>(a)] =
        strides_[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(N_);
  size_ = strides_[0] * static_cast<std::size_t>(N_);
}

ComplexPoint PeriodicGrid::point(std::size_t flat) const {
  std::vector<cplx> z(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) {
    const double h = periods_[static_cast<std::size_t>(k)] / N_;
    const auto ix = (flat / stride(2 * k)) % static_cast<std::size_t>(N_);
    const auto iy = (flat / stride(2 * k + 1)) % static_cast<std::size_t>(N_);
    z[static_cast<std::size_t>(k)] =
        cplx(static_cast<double>(ix) * h, static_cast<double>(iy) * h);
  }
  return ComplexPoint(std::move(z));
}

namespace {

template <class T>
void sweep_d1(const PeriodicGrid& grid, const std::vector<T>& in,
              std::vector<T>& out, int axis) {
  const double inv_h = 1.0 / grid.spacing(axis);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      T acc = stencil::kD1Weights[0] * in[grid.neighbor(p, axis, stencil::kD1Offsets[0])];
      for (std::size_t s = 1; s < stencil::kD1Offsets.size(); ++s)
        acc += stencil::kD1Weights[s] * in[grid.neighbor(p, axis, stencil::kD1Offsets[s])];
      out[p] = acc * inv_h;
    }
  });
}

template <class T>
void sweep_d2(const PeriodicGrid& grid, const std::vector<T>& in,
              std::vector<T>& out, int axis) {
  const double h = grid.spacing(axis);
  const double inv_h2 = 1.0 / (h * h);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      T acc = stencil::kD2Weights[0] * in[grid.neighbor(p, axis, stencil::kD2Offsets[0])];
      for (std::size_t s = 1; s < stencil::kD2Offsets.size(); ++s)
        acc += stencil::kD2Weights[s] * in[grid.neighbor(p, axis, stencil::kD2Offsets[s])];
      out[p] = acc * inv_h2;
    }
  });
}

}  // namespace

ScalarGrid d_axis(const ScalarGrid& f, int axis) {
  ScalarGrid out(f.grid);
  sweep_d1(f.grid, f.v, out.v, axis);
  return out;
}

ScalarGrid d2_axis(const ScalarGrid& f, int axis) {
  ScalarGrid out(f.grid);
  sweep_d2(f.grid, f.v, out.v, axis);
  return out;
}

ComplexGrid d_axis(const ComplexGrid& f, int axis) {
  ComplexGrid out(f.grid);
  sweep_d1(f.grid, f.v, out.v, axis);
  return out;
}

ComplexGrid d2_axis(const ComplexGrid& f, int axis) {
  ComplexGrid out(f.grid);
  sweep_d2(f.grid, f.v, out.v, axis);
  return out;
}

ComplexGrid wirt_d(const ComplexGrid& f, int i) {
  const ComplexGrid dx = d_axis(f, 2 * i);
  const ComplexGrid dy = d_axis(f, 2 * i + 1);
  ComplexGrid out(f.grid);
  for (std::size_t p = 0; p < out.v.size(); ++p)
    out.v[p] = 0.5 * (dx.v[p] + cplx(0, -1) * dy.v[p]);
  return out;
}

ComplexGrid wirt_dbar(const ComplexGrid& f, int j) {
  const ComplexGrid dx = d_axis(f, 2 * j);
  const ComplexGrid dy = d_axis(f, 2 * j + 1);
  ComplexGrid out(f.grid);
  for (std::size_t p = 0; p < out.v.size(); ++p)
    out.v[p] = 0.5 * (dx.v[p] + cplx(0, 1) * dy.v[p]);
  return out;
}

HermitianGrid hermitian_hessian(const ScalarGrid& f) {
  const PeriodicGrid& grid = f.grid;
  const int n = grid.n();
  HermitianGrid out(grid);

  // Diagonal: (d_xx + d_yy)/4, kept exactly real.
  for (int i = 0; i < n; ++i) {
    const ScalarGrid fxx = d2_axis(f, 2 * i);
    const ScalarGrid fyy = d2_axis(f, 2 * i + 1);
    for (std::size_t p = 0; p < grid.size(); ++p)
      out.at(p, i, i) = 0.25 * (fxx.v[p] + fyy.v[p]);
  }
  if (n == 1) return out;

  // Off-diagonal (i < j): composed first-derivative sweeps.
  std::vector<ScalarGrid> d1(static_cast<std::size_t>(2 * n));
  for (int a = 0; a < 2 * n; ++a) d1[static_cast<std::size_t>(a)] = d_axis(f, a);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const ScalarGrid xx = d_axis(d1[static_cast<std::size_t>(2 * j)], 2 * i);
      const ScalarGrid yy = d_axis(d1[static_cast<std::size_t>(2 * j + 1)], 2 * i + 1);
      const ScalarGrid xy = d_axis(d1[static_cast<std::size_t>(2 * j + 1)], 2 * i);
      const ScalarGrid yx = d_axis(d1[static_cast<std::size_t>(2 * j)], 2 * i + 1);
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const cplx val(0.25 * (xx.v[p] + yy.v[p]), 0.25 * (xy.v[p] - yx.v[p]));
        out.at(p, i, j) = val;
        out.at(p, j, i) = std::conj(val);
      }
    }
  return out;
}

HermitianGrid sample_metric(const MetricField& g, const PeriodicGrid& grid) {
  if (domain_dim(g.domain()) != grid.n())
    throw ContractViolation("sample_metric: dimension mismatch");
  HermitianGrid out(grid);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) out.set_matrix(p, g.value(grid.point(p)));
  });
  return out;
}

namespace {

double min_eig_at(const HermitianGrid& g, std::size_t p) {
  if (g.n == 1) return g.at(p, 0, 0).real();
  if (g.n == 2) {
    const double a = g.at(p, 0, 0).real();
    const double c = g.at(p, 1, 1).real();
    const double mid = 0.5 * (a + c);
    const double d = 0.5 * (a - c);
    return mid - std::sqrt(d * d + std::norm(g.at(p, 0, 1)));
  }
  return min_eig_hermitian(g.matrix(p));
}

}  // namespace

ScalarGrid logdet_grid(const HermitianGrid& g) {
  ScalarGrid out(g.grid);
  const int n = g.n;
  for (std::size_t p = 0; p < g.grid.size(); ++p) {
    const double eig = min_eig_at(g, p);
    if (!(eig > 0.0)) throw PositivityLossError(p, eig);
    if (n == 1) {
      out.v[p] = std::log(g.at(p, 0, 0).real());
    } else if (n == 2) {
      const double det = g.at(p, 0, 0).real() * g.at(p, 1, 1).real() -
                         std::norm(g.at(p, 0, 1));
      out.v[p] = std::log(det);
    } else {
      out.v[p] = std::log(g.matrix(p).determinant().real());
    }
  }
  return out;
}

ScalarGrid det_grid(const HermitianGrid& g) {
  ScalarGrid out(g.grid);
  for (std::size_t p = 0; p < g.grid.size(); ++p) {
    if (g.n == 1)
      out.v[p] = g.at(p, 0, 0).real();
    else if (g.n == 2)
      out.v[p] = g.at(p, 0, 0).real() * g.at(p, 1, 1).real() - std::norm(g.at(p, 0, 1));
    else
      out.v[p] = g.matrix(p).determinant().real();
  }
  return out;
}

HermitianGrid ricci_logdet(const HermitianGrid& g) {
  const HermitianGrid hess = hermitian_hessian(logdet_grid(g));
  HermitianGrid out(g.grid);
  for (std::size_t e = 0; e < out.v.size(); ++e) out.v[e] = -hess.v[e];
  return out;
}

namespace {

/// Inverse of the point matrix into `inv` (closed form for n <= 2).
void invert_at(const HermitianGrid& g, std::size_t p, Eigen::MatrixXcd& inv) {
  const int n = g.n;
  if (n == 1) {
    const double a = g.at(p, 0, 0).real();
    if (!(a > 0.0)) throw PositivityLossError(p, a);
    inv(0, 0) = 1.0 / a;
    return;
  }
  if (n == 2) {
    const double a = g.at(p, 0, 0).real();
    const double c = g.at(p, 1, 1).real();
    const cplx b = g.at(p, 0, 1);
    const double det = a * c - std::norm(b);
    const double eig = min_eig_at(g, p);
    if (!(eig > 0.0)) throw PositivityLossError(p, eig);
    const double inv_det = 1.0 / det;
    inv(0, 0) = c * inv_det;
    inv(1, 1) = a * inv_det;
    inv(0, 1) = -b * inv_det;
    inv(1, 0) = -std::conj(b) * inv_det;
    return;
  }
  const double eig = min_eig_at(g, p);
  if (!(eig > 0.0)) throw PositivityLossError(p, eig);
  inv = g.matrix(p).inverse();
}

}  // namespace

HermitianGrid ricci_trace(const HermitianGrid& g, double sym_tol) {
  const PeriodicGrid& grid = g.grid;
  const int n = g.n;

  // v_i = tr(G^{-1} d_i G) per complex direction.
  std::vector<ComplexGrid> entry(static_cast<std::size_t>(n) * n, ComplexGrid(grid));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (std::size_t p = 0; p < grid.size(); ++p)
        entry[static_cast<std::size_t>(i) * n + j].v[p] = g.at(p, i, j);

  std::vector<ComplexGrid> vfield;
  vfield.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<ComplexGrid> dg(static_cast<std::size_t>(n) * n, ComplexGrid(grid));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        dg[static_cast<std::size_t>(r) * n + c] =
            wirt_d(entry[static_cast<std::size_t>(r) * n + c], i);
    ComplexGrid vi(grid);
    Eigen::MatrixXcd inv(n, n);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      invert_at(g, p, inv);
      cplx tr = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          tr += inv(c, r) * dg[static_cast<std::size_t>(r) * n + c].v[p];
      vi.v[p] = tr;
    }
    vfield.push_back(std::move(vi));
  }

  HermitianGrid raw(grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const ComplexGrid rij = wirt_dbar(vfield[static_cast<std::size_t>(i)], j);
      for (std::size_t p = 0; p < grid.size(); ++p) raw.at(p, i, j) = -rij.v[p];
    }
  }

  // Hermiticity check, then symmetrize.
  double max_residual = 0.0;
  double scale = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const cplx a = raw.at(p, i, j);
        const cplx b = raw.at(p, j, i);
        max_residual = std::max(max_residual, std::abs(a - std::conj(b)));
        scale = std::max(scale, std::abs(a));
      }
  if (max_residual > sym_tol * (1.0 + scale))
    throw ContractViolation("ricci_trace: Hermiticity residual above tolerance");
  HermitianGrid out(grid);
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.at(p, i, j) = 0.5 * (raw.at(p, i, j) + std::conj(raw.at(p, j, i)));
  return out;
}

ScalarGrid scalar_curvature(const HermitianGrid& g, const HermitianGrid& ric) {
  ScalarGrid out(g.grid);
  const int n = g.n;
  Eigen::MatrixXcd inv(n, n);
  for (std::size_t p = 0; p < g.grid.size(); ++p) {
    invert_at(g, p, inv);
    cplx tr = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) tr += inv(c, r) * ric.at(p, r, c);
    out.v[p] = tr.real();
  }
  return out;
}

ScalarGrid laplacian(const HermitianGrid& g, const ScalarGrid& f) {
  const HermitianGrid hess = hermitian_hessian(f);
  return scalar_curvature(g, hess);
}

ScalarGrid ric_norm_sq(const HermitianGrid& g, const HermitianGrid& ric) {
  ScalarGrid out(g.grid);
  const int n = g.n;
  Eigen::MatrixXcd inv(n, n), r(n, n), m(n, n);
  for (std::size_t p = 0; p < g.grid.size(); ++p) {
    invert_at(g, p, inv);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = ric.at(p, i, j);
    m.noalias() = inv * r;
    out.v[p] = (m * m).trace().real();
  }
  return out;
}

double grid_min_eig(const HermitianGrid& g, std::size_t* argmin) {
  double best = min_eig_at(g, 0);
  std::size_t where = 0;
  for (std::size_t p = 1; p < g.grid.size(); ++p) {
    const double e = min_eig_at(g, p);
    if (e < best) {
      best = e;
      where = p;
    }
  }
  if (argmin) *argmin = where;
  return best;
}

FormResiduals grid_form_residuals(const HermitianGrid& g) {
  FormResiduals res;
  const int n = g.n;
  if (n < 2) return res;
  const PeriodicGrid& grid = g.grid;

  std::vector<ComplexGrid> entry(static_cast<std::size_t>(n) * n, ComplexGrid(grid));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (std::size_t p = 0; p < grid.size(); ++p)
        entry[static_cast<std::size_t>(i) * n + j].v[p] = g.at(p, i, j);

  // d omega: antisymmetrize d_k g_{i jbar} in (k, i).
  std::vector<ComplexGrid> dg(static_cast<std::size_t>(n) * n * n, ComplexGrid(grid));
  auto dgat = [&](int k, int i, int j) -> ComplexGrid& {
    return dg[(static_cast<std::size_t>(k) * n + i) * n + j];
  };
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dgat(k, i, j) = wirt_d(entry[static_cast<std::size_t>(i) * n + j], k);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (std::size_t p = 0; p < grid.size(); ++p)
          res.dbar = std::max(res.dbar,
                              std::abs(dgat(k, i, j).v[p] - dgat(i, k, j).v[p]));

  // d dbar omega: antisymmetrize d_k d_lbar g_{i jbar} in (k,i) and (l,j).
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i)
      for (int l = 0; l < n; ++l)
        for (int j = l + 1; j < n; ++j) {
          const ComplexGrid a = wirt_dbar(dgat(k, i, j), l);
          const ComplexGrid b = wirt_dbar(dgat(i, k, j), l);
          const ComplexGrid c = wirt_dbar(dgat(k, i, l), j);
          const ComplexGrid d = wirt_dbar(dgat(i, k, l), j);
          for (std::size_t p = 0; p < grid.size(); ++p)
            res.gauduchon = std::max(
                res.gauduchon, std::abs(a.v[p] - b.v[p] - c.v[p] + d.v[p]));
        }
  return res;
}

MetricField grid_metric_field(std::shared_ptr<const HermitianGrid> g) {
  const PeriodicGrid& grid = g->grid;
  const double h0 = grid.spacing(0);
  for (int a = 1; a < grid.axes(); ++a)
    if (std::abs(grid.spacing(a) - h0) > 1e-15 * h0)
      throw ContractViolation("grid_metric_field needs equal spacings on all axes");
  Domain dom = TorusDomain{grid.n(), grid.periods()};
  auto eval = [g](const ComplexPoint& p) -> Eigen::MatrixXcd {
    const PeriodicGrid& gr = g->grid;
    const double h = gr.spacing(0);
    std::size_t flat = 0;
    for (int a = 0; a < gr.axes(); ++a) {
      const double x = p.real_coord(a);
      const double ratio = x / h;
      const long long idx = std::llround(ratio);
      if (std::abs(ratio - static_cast<double>(idx)) > 1e-6)
        throw DomainError("grid-sampled field evaluated off-lattice");
      long long wrapped = idx % gr.N();
      if (wrapped < 0) wrapped += gr.N();
      flat += static_cast<std::size_t>(wrapped) * gr.stride(a);
    }
    return g->matrix(flat);
  };
  return MetricField::with_stencil(std::move(dom), std::move(eval), h0);
}

void axpy(ScalarGrid& y, double a, const ScalarGrid& x) {
  for (std::size_t p = 0; p < y.v.size(); ++p) y.v[p] += a * x.v[p];
}

void axpy(HermitianGrid& y, double a, const HermitianGrid& x) {
  for (std::size_t p = 0; p < y.v.size(); ++p) y.v[p] += a * x.v[p];
}

}  // namespace crflow

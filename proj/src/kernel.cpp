#include "crflow/kernel.hpp"

#include <Eigen/LU>
#include <cmath>

namespace crflow {
namespace {

struct PointData {
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd ginv;
  double cond = 1.0;  // crude conditioning estimate, >= 1
};

PointData metric_at(const MetricField& field, const ComplexPoint& p) {
  PointData d;
  d.g = field.value(p);
  const double eig = min_eig_hermitian(d.g);
  if (!(eig > 0.0))
    throw SingularMetricError("metric not positive at evaluation point");
  d.ginv = d.g.inverse();
  d.cond = std::max(1.0, d.g.cwiseAbs().maxCoeff() * d.ginv.cwiseAbs().maxCoeff());
  return d;
}

// Symmetry/reality tolerance. Closed-form curvature combines two inverse
// factors, so its rounding noise grows like eps * cond^2; stencil routes pick
// up one inverse factor on top of the h-dependent mode tolerance. Values
// noisier than these bounds are rejected rather than symmetrized away.
double mode_tol(const MetricField& g, const PointData& pd) {
  constexpr double kEps = 2.22e-16;
  if (g.mode() == DerivativeMode::closed_form)
    return std::max(1e-10, 100.0 * kEps * pd.cond * pd.cond);
  return g.symmetry_tol() * pd.cond;
}

}  // namespace

Tensor3 chern_connection(const MetricField& g, const ComplexPoint& p) {
  const int n = g.dim();
  const PointData pd = metric_at(g, p);
  Tensor3 gamma(n);
  for (int i = 0; i < n; ++i) {
    // Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar} = ((d_i G) G^{-1})_{jk}
    const Eigen::MatrixXcd m = g.d1(p, i) * pd.ginv;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) gamma(i, j, k) = m(j, k);
  }
  return gamma;
}

Tensor4 chern_curvature(const MetricField& g, const ComplexPoint& p) {
  const int n = g.dim();
  const PointData pd = metric_at(g, p);
  Tensor4 curv(n);
  std::vector<Eigen::MatrixXcd> dg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dg[static_cast<std::size_t>(i)] = g.d1(p, i);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // d_jbar Gamma_i = (d_i d_jbar G) G^{-1} - (d_i G) G^{-1} (d_jbar G) G^{-1}
      const Eigen::MatrixXcd dbar_g = dg[static_cast<std::size_t>(j)].adjoint();
      const Eigen::MatrixXcd m =
          g.d11(p, i, j) * pd.ginv -
          dg[static_cast<std::size_t>(i)] * pd.ginv * dbar_g * pd.ginv;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) curv(i, j, k, l) = -m(k, l);
    }
  }
  return curv;
}

HermitianMatrix chern_ricci(const MetricField& g, const ComplexPoint& p,
                            RicciMethod method) {
  const int n = g.dim();
  const PointData pd = metric_at(g, p);
  Eigen::MatrixXcd ric(n, n);

  if (method == RicciMethod::trace) {
    const Tensor4 curv = chern_curvature(g, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // Lower the last slot with g_{m lbar}, then contract with g^{k lbar}.
        cplx sum = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx lowered = 0.0;
            for (int m = 0; m < n; ++m) lowered += curv(i, j, k, m) * pd.g(m, l);
            sum += pd.ginv(l, k) * lowered;
          }
        ric(i, j) = sum;
      }
  } else if (g.mode() == DerivativeMode::closed_form) {
    // -d_i d_jbar log det g by matrix calculus on the analytic derivatives.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Eigen::MatrixXcd di = g.d1(p, i);
        const Eigen::MatrixXcd djbar = g.d1(p, j).adjoint();
        ric(i, j) = (pd.ginv * di * pd.ginv * djbar).trace() -
                    (pd.ginv * g.d11(p, i, j)).trace();
      }
  } else {
    // Stencil of the scalar field log det g.
    auto logdet_field = [&g](const ComplexPoint& q) -> cplx {
      const Eigen::MatrixXcd m = g.value(q);
      const cplx det = Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
      if (!(det.real() > 0.0))
        throw SingularMetricError("log det g: determinant not positive");
      return std::log(det);
    };
    const double h = g.stencil_h();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto eval = [&](double hh) {
          return stencil::wirtinger_dd(logdet_field, p, i, j, hh);
        };
        ric(i, j) = -(g.richardson() ? stencil::richardson(eval, h) : eval(h));
      }
  }

  return HermitianMatrix::from(ric, mode_tol(g, pd));
}

double chern_scalar(const MetricField& g, const ComplexPoint& p,
                    RicciMethod method) {
  const PointData pd = metric_at(g, p);
  const HermitianMatrix ric = chern_ricci(g, p, method);
  const cplx r = (pd.ginv * ric.mat()).trace();
  if (std::abs(r.imag()) > mode_tol(g, pd) * (1.0 + std::abs(r.real())))
    throw ContractViolation("chern_scalar: non-real scalar curvature");
  return r.real();
}

TorsionResult torsion(const MetricField& g, const ComplexPoint& p) {
  const int n = g.dim();
  const Tensor3 gamma = chern_connection(g, p);
  TorsionResult out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.tensor(i, j, k) = gamma(i, j, k) - gamma(j, i, k);
  for (int k = 0; k < n; ++k) {
    cplx tt = 0.0;
    for (int q = 0; q < n; ++q) tt += out.tensor(k, q, q);
    out.trace[static_cast<std::size_t>(k)] = tt;
  }
  return out;
}

ChernPackage chern_package(const MetricField& g, const ComplexPoint& p) {
  const int n = g.dim();
  ChernPackage pkg(n);
  pkg.gamma = chern_connection(g, p);
  pkg.curvature = chern_curvature(g, p);
  pkg.ricci = chern_ricci(g, p, RicciMethod::trace);
  pkg.scalar = chern_scalar(g, p, RicciMethod::logdet);
  pkg.torsion = torsion(g, p);
  return pkg;
}

FormResiduals kahler_gauduchon_residuals(const MetricField& g,
                                         std::span<const ComplexPoint> points) {
  const int n = g.dim();
  FormResiduals res;
  for (const ComplexPoint& p : points) {
    std::vector<Eigen::MatrixXcd> dg(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) dg[static_cast<std::size_t>(k)] = g.d1(p, k);
    // d omega coefficients, antisymmetrized in the two holomorphic slots.
    for (int k = 0; k < n; ++k)
      for (int i = k + 1; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const cplx a = dg[static_cast<std::size_t>(k)](i, j) -
                         dg[static_cast<std::size_t>(i)](k, j);
          res.dbar = std::max(res.dbar, std::abs(a));
        }
    if (n < 2) continue;
    // d dbar omega coefficients, antisymmetrized in (k,i) and (l,j).
    std::vector<Eigen::MatrixXcd> ddg(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        ddg[static_cast<std::size_t>(k) * n + l] = g.d11(p, k, l);
    auto dd = [&](int k, int l) -> const Eigen::MatrixXcd& {
      return ddg[static_cast<std::size_t>(k) * n + l];
    };
    for (int k = 0; k < n; ++k)
      for (int i = k + 1; i < n; ++i)
        for (int l = 0; l < n; ++l)
          for (int j = l + 1; j < n; ++j) {
            const cplx b = dd(k, l)(i, j) - dd(i, l)(k, j) - dd(k, j)(i, l) +
                           dd(i, j)(k, l);
            res.gauduchon = std::max(res.gauduchon, std::abs(b));
          }
  }
  return res;
}

}  // namespace crflow

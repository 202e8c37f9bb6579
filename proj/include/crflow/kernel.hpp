#pragma once

#include <span>
#include <vector>

#include "crflow/hermitian.hpp"
#include "crflow/metric_field.hpp"

namespace crflow {

/// Rank-3 coefficient array t(i,j,k), sized n^3.
struct Tensor3 {
  int n = 0;
  std::vector<cplx> v;
  explicit Tensor3(int dim) : n(dim), v(static_cast<std::size_t>(dim) * dim * dim) {}
  cplx& operator()(int i, int j, int k) {
    return v[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
  const cplx& operator()(int i, int j, int k) const {
    return v[(static_cast<std::size_t>(i) * n + j) * n + k];
  }
};

/// Rank-4 coefficient array t(i,j,k,l), sized n^4.
struct Tensor4 {
  int n = 0;
  std::vector<cplx> v;
  explicit Tensor4(int dim)
      : n(dim), v(static_cast<std::size_t>(dim) * dim * dim * dim) {}
  cplx& operator()(int i, int j, int k, int l) {
    return v[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
  const cplx& operator()(int i, int j, int k, int l) const {
    return v[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
  }
};

enum class RicciMethod { trace, logdet };

/// Connection coefficients: gamma(i,j,k) = Gamma^k_{ij} = g^{k lbar} d_i g_{j lbar}.
Tensor3 chern_connection(const MetricField& g, const ComplexPoint& p);

/// Curvature tensor: curv(i,j,k,l) = R_{i jbar k}^{l} = -d_jbar Gamma^l_{ik}.
Tensor4 chern_curvature(const MetricField& g, const ComplexPoint& p);

/// Ricci form coefficients, by tracing the curvature tensor over its last two
/// slots (trace) or as -d_i d_jbar log det g (logdet). The two routes agree to
/// discretization tolerance and both return a conjugate-symmetric matrix.
HermitianMatrix chern_ricci(const MetricField& g, const ComplexPoint& p,
                            RicciMethod method = RicciMethod::logdet);

/// Scalar curvature R = g^{i jbar} Ric_{i jbar}; the imaginary residue is
/// checked against tolerance and discarded.
double chern_scalar(const MetricField& g, const ComplexPoint& p,
                    RicciMethod method = RicciMethod::logdet);

struct TorsionResult {
  Tensor3 tensor;            // T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}
  std::vector<cplx> trace;   // trace(k) = T^p_{kp}
  explicit TorsionResult(int n) : tensor(n), trace(static_cast<std::size_t>(n)) {}
};

TorsionResult torsion(const MetricField& g, const ComplexPoint& p);

/// Everything at one point. `ricci` uses the trace route; `scalar` the logdet
/// route, so the package internally exercises both.
struct ChernPackage {
  Tensor3 gamma;
  Tensor4 curvature;
  HermitianMatrix ricci;
  double scalar = 0.0;
  TorsionResult torsion;
  ChernPackage(int n) : gamma(n), curvature(n), torsion(n) {}
};

ChernPackage chern_package(const MetricField& g, const ComplexPoint& p);

struct FormResiduals {
  double dbar = 0.0;       // sup over points of max |(d omega)| coefficient
  double gauduchon = 0.0;  // sup over points of max |(d dbar omega)| coefficient
};

/// Kahler and Gauduchon residuals over a sample of points. Kahler metrics give
/// (0, 0); Gauduchon non-Kahler gives (positive, ~0).
FormResiduals kahler_gauduchon_residuals(const MetricField& g,
                                         std::span<const ComplexPoint> points);

}  // namespace crflow

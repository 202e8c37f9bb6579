#include "crflow/hermitian.hpp"

#include <Eigen/LU>
#include <cmath>

namespace crflow {

double hermiticity_residual(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eig_hermitian(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0).real();
  if (n == 2) {
    const double a = m(0, 0).real();
    const double c = m(1, 1).real();
    const double mid = 0.5 * (a + c);
    const double d = 0.5 * (a - c);
    return mid - std::sqrt(d * d + std::norm(m(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

HermitianMatrix HermitianMatrix::from(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols())
    throw ContractViolation("HermitianMatrix: matrix must be square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (hermiticity_residual(m) > tol * scale)
    throw ContractViolation("HermitianMatrix: conjugate symmetry violated");
  return trusted(0.5 * (m + m.adjoint().eval()));
}

double HermitianMatrix::min_eigenvalue() const { return min_eig_hermitian(m_); }

PositivityResult positivity(const HermitianMatrix& g, double tol) {
  PositivityResult r;
  r.min_eigenvalue = g.min_eigenvalue();
  r.is_positive = r.min_eigenvalue > tol;
  return r;
}

TraceAndNorm trace_and_norms(const HermitianMatrix& g, const HermitianMatrix& h) {
  const auto pos = positivity(g);
  if (!pos.is_positive)
    throw SingularMetricError("trace_and_norms: metric not positive");
  const Eigen::MatrixXcd ginv = g.mat().inverse();
  const Eigen::MatrixXcd gh = ginv * h.mat();
  TraceAndNorm out;
  out.trace = gh.trace().real();
  out.norm_sq = (gh * gh).trace().real();
  return out;
}

}  // namespace crflow

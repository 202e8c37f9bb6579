#include <doctest.h>

#include "crflow/hermitian.hpp"
#include "crflow/models.hpp"
#include "oracles.hpp"

using namespace crflow;

TEST_CASE("positivity flags and min eigenvalues") {
  const auto id = positivity(HermitianMatrix::from(Eigen::MatrixXcd::Identity(2, 2)));
  CHECK(id.is_positive);
  CHECK(id.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXcd neg(2, 2);
  neg << 1.0, 0.0, 0.0, -0.1;
  const auto r = positivity(HermitianMatrix::from(neg));
  CHECK_FALSE(r.is_positive);
  CHECK(r.min_eigenvalue == doctest::Approx(-0.1).epsilon(1e-14));
}

TEST_CASE("hopf alpha_t degenerates exactly at t = 1/n") {
  // Transverse eigenvalue (1 - n t)/r^2 goes to zero; the eigen-split oracle
  // provides the expected minimum.
  const HopfModel m(2, 2.0);
  const ComplexPoint p{cplx(1.2, 0.1), cplx(0.3, -0.4)};
  for (double t : {0.3, 0.45, 0.499, 0.4999}) {
    const oracles::HopfSplit split{2, t};
    const auto g = HermitianMatrix::from(hopf_exact_flow(m, t).value(p));
    CHECK(g.min_eigenvalue() ==
          doctest::Approx(split.metric_min_eigenvalue(p)).epsilon(1e-10));
  }
  const auto near = positivity(
      HermitianMatrix::from(hopf_exact_flow(m, 0.5 - 1e-10).value(p)));
  CHECK(near.is_positive);
  CHECK(near.min_eigenvalue < 1e-9);
}

TEST_CASE("trace and norm of diagonal example match hand summation") {
  Eigen::MatrixXcd g(2, 2), h(2, 2);
  g << 2.0, 0.0, 0.0, 1.0;
  h << 4.0, 0.0, 0.0, 3.0;
  const auto tn = trace_and_norms(HermitianMatrix::from(g), HermitianMatrix::from(h));
  // g^{i jbar} h_{i jbar} = 4/2 + 3/1, |h|^2_g = (4/2)^2 + (3/1)^2.
  CHECK(tn.trace == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(tn.norm_sq == doctest::Approx(13.0).epsilon(1e-15));
}

TEST_CASE("metric trace of the metric itself is the dimension") {
  Eigen::MatrixXcd a(3, 3);
  a << 2.0, cplx(0.3, 0.1), 0.0, cplx(0.3, -0.1), 1.5, cplx(0.0, 0.2), 0.0,
      cplx(0.0, -0.2), 1.0;
  const auto g = HermitianMatrix::from(a);
  CHECK(trace_and_norms(g, g).trace == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(trace_and_norms(g, g).norm_sq == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("zero argument gives zero trace and norm") {
  const auto g = HermitianMatrix::from(Eigen::MatrixXcd::Identity(2, 2));
  const auto z = HermitianMatrix::from(Eigen::MatrixXcd::Zero(2, 2));
  const auto tn = trace_and_norms(g, z);
  CHECK(tn.trace == 0.0);
  CHECK(tn.norm_sq == 0.0);
}

TEST_CASE("contract violations and singular metrics are rejected") {
  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, cplx(0.5, 0.0), cplx(0.1, 0.0), 1.0;  // not conjugate-symmetric
  CHECK_THROWS_AS(HermitianMatrix::from(bad), ContractViolation);

  Eigen::MatrixXcd sing(2, 2);
  sing << 1.0, 0.0, 0.0, 0.0;
  const auto g = HermitianMatrix::from(sing);
  const auto h = HermitianMatrix::from(Eigen::MatrixXcd::Identity(2, 2));
  CHECK_THROWS_AS(trace_and_norms(g, h), SingularMetricError);
}

TEST_CASE("construction symmetrizes small asymmetries after the check") {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, cplx(0.25, 1e-13), cplx(0.25, 0.0), 2.0;
  const auto g = HermitianMatrix::from(m);
  CHECK(g(0, 1) == std::conj(g(1, 0)));
}

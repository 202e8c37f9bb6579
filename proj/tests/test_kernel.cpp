#include <doctest.h>

#include "crflow/kernel.hpp"
#include "crflow/models.hpp"
#include "crflow/rng.hpp"
#include "oracles.hpp"

using namespace crflow;

namespace {

constexpr double kTwoPi = 6.28318530717958647692529;

TorusModel perturbed_n1() {
  std::vector<CosineEntry> e;
  e.push_back(CosineEntry{0, 0, cplx(0.1, 0.0), {TrigFactor{0, 1.0, 0.0}}});
  e.push_back(CosineEntry{0, 0, cplx(0.05, 0.0),
                          {TrigFactor{0, 2.0, 0.0}, TrigFactor{1, 2.0, 0.0}}});
  return TorusModel(1, {kTwoPi}, e);
}

TorusModel nonkahler_n2() {
  std::vector<CosineEntry> e;
  e.push_back(CosineEntry{0, 0, cplx(0.1, 0.0), {TrigFactor{2, 1.0, 0.0}}});
  return TorusModel(2, {kTwoPi, kTwoPi}, e);
}

}  // namespace

TEST_CASE("flat metric: every chern quantity vanishes") {
  const TorusModel flat(2, {kTwoPi, kTwoPi});
  const MetricField g = torus_metric(flat);
  const ComplexPoint p{cplx(0.7, 1.1), cplx(2.9, 0.4)};
  const ChernPackage pkg = chern_package(g, p);
  for (const auto& v : pkg.gamma.v) CHECK(std::abs(v) == 0.0);
  for (const auto& v : pkg.curvature.v) CHECK(std::abs(v) == 0.0);
  CHECK(pkg.ricci.mat().cwiseAbs().maxCoeff() == 0.0);
  CHECK(pkg.scalar == 0.0);
  for (const auto& v : pkg.torsion.tensor.v) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("hopf connection matches hand-differentiated closed form") {
  const HopfModel m(2, 2.0);
  const MetricField g = hopf_metric(m);
  Rng rng(5);
  for (int s = 0; s < 10; ++s) {
    const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
    const Tensor3 gamma = chern_connection(g, p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(std::abs(gamma(i, j, k) - oracles::hopf_gamma(p, i, j, k)) < 1e-13);
  }
  // Gamma^1_{11} = -1 at z = (1, 0).
  const ComplexPoint e1{cplx(1.0, 0.0), cplx(0.0, 0.0)};
  CHECK(std::abs(chern_connection(g, e1)(0, 0, 0) - cplx(-1.0)) < 1e-14);
}

TEST_CASE("kahler metrics have a symmetric connection") {
  std::vector<TrigTerm> pot;
  pot.push_back(TrigTerm{cplx(0.2, 0.0), {TrigFactor{0, 1.0, 0.0}, TrigFactor{3, 1.0, 0.0}}});
  const TorusModel kahler(2, {kTwoPi, kTwoPi}, {}, pot);
  const MetricField g = torus_metric(kahler);
  Rng rng(6);
  for (int s = 0; s < 10; ++s) {
    const ComplexPoint p = rng.torus_point({kTwoPi, kTwoPi});
    const Tensor3 gamma = chern_connection(g, p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(std::abs(gamma(i, j, k) - gamma(j, i, k)) < 1e-11);
  }
}

TEST_CASE("curvature traced over its last two slots gives the ricci form") {
  const HopfModel m(2, 2.0);
  const MetricField g = hopf_metric(m);
  Rng rng(7);
  const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
  const Tensor4 curv = chern_curvature(g, p);
  const Eigen::MatrixXcd gm = g.value(p);
  const Eigen::MatrixXcd ginv = gm.inverse();
  Eigen::MatrixXcd traced(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cplx sum = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          cplx lowered = 0.0;
          for (int mm = 0; mm < 2; ++mm) lowered += curv(i, j, k, mm) * gm(mm, l);
          sum += ginv(l, k) * lowered;
        }
      traced(i, j) = sum;
    }
  CHECK((traced - chern_ricci(g, p).mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lowered curvature is conjugate-symmetric to stencil tolerance") {
  const double h = 1e-2;
  const MetricField g = torus_metric(perturbed_n1(), DerivativeMode::stencil, h);
  const MetricField g2 = torus_metric(nonkahler_n2(), DerivativeMode::stencil, h);
  Rng rng(8);
  for (const MetricField* field : {&g, &g2}) {
    const int n = field->dim();
    const ComplexPoint p = rng.torus_point(std::vector<double>(n, kTwoPi));
    const Tensor4 curv = chern_curvature(*field, p);
    const Eigen::MatrixXcd gm = field->value(p);
    double resid = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx lo = 0.0, hi = 0.0;
            for (int mm = 0; mm < n; ++mm) {
              lo += curv(i, j, k, mm) * gm(mm, l);
              hi += curv(j, i, l, mm) * gm(mm, k);
            }
            resid = std::max(resid, std::abs(lo - std::conj(hi)));
            scale = std::max(scale, std::abs(lo));
          }
    CHECK(resid < (10.0 * h * h * h * h + 1e-10) * (1.0 + scale));
  }
}

TEST_CASE("ricci of the hopf metric matches the closed form") {
  const HopfModel m(2, 2.0);
  const MetricField g = hopf_metric(m);
  const ComplexPoint e1{cplx(1.0, 0.0), cplx(0.0, 0.0)};
  const Eigen::MatrixXcd ric = chern_ricci(g, e1).mat();
  CHECK(std::abs(ric(0, 0)) < 1e-13);
  CHECK(std::abs(ric(1, 1) - 2.0) < 1e-13);
  CHECK(std::abs(ric(0, 1)) < 1e-13);

  Rng rng(9);
  for (int s = 0; s < 10; ++s) {
    const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
    const oracles::HopfSplit split{2, 0.0};
    CHECK((chern_ricci(g, p, RicciMethod::trace).mat() - split.ricci(p))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("trace and logdet ricci agree at random points") {
  Rng rng(10);
  const MetricField closed = torus_metric(perturbed_n1());
  for (int s = 0; s < 100; ++s) {
    const ComplexPoint p = rng.torus_point({kTwoPi});
    const Eigen::MatrixXcd a = chern_ricci(closed, p, RicciMethod::trace).mat();
    const Eigen::MatrixXcd b = chern_ricci(closed, p, RicciMethod::logdet).mat();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
  const MetricField st = torus_metric(nonkahler_n2(), DerivativeMode::stencil, 1e-2);
  for (int s = 0; s < 10; ++s) {
    const ComplexPoint p = rng.torus_point({kTwoPi, kTwoPi});
    const Eigen::MatrixXcd a = chern_ricci(st, p, RicciMethod::trace).mat();
    const Eigen::MatrixXcd b = chern_ricci(st, p, RicciMethod::logdet).mat();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("hopf scalar curvature along the exact flow") {
  const HopfModel m(2, 2.0);
  Rng rng(11);
  const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
  CHECK(chern_scalar(hopf_metric(m), p) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(chern_scalar(hopf_exact_flow(m, 0.25), p) ==
        doctest::Approx(4.0).epsilon(1e-12));
  const HopfModel m3(3, 2.0);
  const ComplexPoint q = rng.annulus_point(3, 1.0, 2.0);
  CHECK(chern_scalar(hopf_metric(m3), q) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("singular metric errors propagate") {
  // A positive closed-form field evaluated where it is not positive.
  auto eval = [](const ComplexPoint& p) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd g(1, 1);
    g(0, 0) = p[0].real();  // positive only for Re z > 0
    return g;
  };
  const MetricField g = MetricField::with_stencil(TorusDomain{1, {kTwoPi}}, eval, 1e-3);
  CHECK_THROWS_AS(chern_connection(g, ComplexPoint{cplx(-1.0, 0.0)}),
                  SingularMetricError);
}

TEST_CASE("hopf torsion and its trace match the antisymmetrized connection") {
  const HopfModel m(2, 2.0);
  const MetricField g = hopf_metric(m);
  const ComplexPoint e1{cplx(1.0, 0.0), cplx(0.0, 0.0)};
  const TorsionResult tor = torsion(g, e1);
  CHECK(std::abs(tor.tensor(0, 1, 1) - cplx(-1.0)) < 1e-14);  // T^2_{12} = -1
  Rng rng(12);
  for (int s = 0; s < 10; ++s) {
    const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
    const TorsionResult t = torsion(g, p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(std::abs(t.tensor(i, j, k) - (oracles::hopf_gamma(p, i, j, k) -
                                              oracles::hopf_gamma(p, j, i, k))) <
                1e-13);
    // Trace: -(n-1) conj(z_k)/r^2.
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(t.trace[static_cast<std::size_t>(k)] +
                     std::conj(p[k]) / p.r2()) < 1e-13);
  }
}

TEST_CASE("torsion vanishes identically in complex dimension one") {
  const MetricField g = torus_metric(perturbed_n1());
  Rng rng(13);
  for (int s = 0; s < 5; ++s) {
    const TorsionResult t = torsion(g, rng.torus_point({kTwoPi}));
    for (const auto& v : t.tensor.v) CHECK(std::abs(v) == 0.0);
  }
}

TEST_CASE("torsion is antisymmetric in its lower indices") {
  const MetricField g = torus_metric(nonkahler_n2());
  Rng rng(14);
  for (int s = 0; s < 10; ++s) {
    const TorsionResult t = torsion(g, rng.torus_point({kTwoPi, kTwoPi}));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          CHECK(t.tensor(i, j, k) == -t.tensor(j, i, k));
  }
}

TEST_CASE("form residuals classify flat, hopf, and conformal metrics") {
  Rng rng(15);

  const TorusModel flat(2, {kTwoPi, kTwoPi});
  std::vector<ComplexPoint> pts;
  for (int s = 0; s < 8; ++s) pts.push_back(rng.torus_point({kTwoPi, kTwoPi}));
  const FormResiduals fr_flat = kahler_gauduchon_residuals(torus_metric(flat), pts);
  CHECK(fr_flat.dbar == 0.0);
  CHECK(fr_flat.gauduchon == 0.0);

  std::vector<ComplexPoint> apts;
  for (int s = 0; s < 8; ++s) apts.push_back(rng.annulus_point(2, 1.0, 2.0));
  const FormResiduals fr_hopf =
      kahler_gauduchon_residuals(hopf_metric(HopfModel(2, 2.0)), apts);
  CHECK(fr_hopf.dbar > 0.1);
  CHECK(fr_hopf.gauduchon < 1e-10);

  // Conformally flat e^u delta with nonconstant u is not Kahler for n = 2.
  auto eval = [](const ComplexPoint& p) -> Eigen::MatrixXcd {
    return std::exp(0.3 * std::cos(p[0].real())) * Eigen::MatrixXcd::Identity(2, 2);
  };
  const MetricField conf =
      MetricField::with_stencil(TorusDomain{2, {kTwoPi, kTwoPi}}, eval, 1e-3);
  const FormResiduals fr_conf = kahler_gauduchon_residuals(conf, pts);
  CHECK(fr_conf.dbar > 0.01);
}

TEST_CASE("n=1 form residuals are identically zero") {
  const MetricField g = torus_metric(perturbed_n1());
  Rng rng(16);
  std::vector<ComplexPoint> pts{rng.torus_point({kTwoPi})};
  const FormResiduals fr = kahler_gauduchon_residuals(g, pts);
  CHECK(fr.dbar == 0.0);
  CHECK(fr.gauduchon == 0.0);
}

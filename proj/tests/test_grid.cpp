#include <doctest.h>

#include <memory>

#include "crflow/flow.hpp"
#include "crflow/grid.hpp"
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
}  // namespace

TEST_CASE("grid sweeps are 4th-order accurate on trigonometric fields") {
  auto err_at = [&](int N) {
    const PeriodicGrid grid(1, N, {kTwoPi});
    ScalarGrid f(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const ComplexPoint z = grid.point(p);
      f.v[p] = std::sin(2.0 * z[0].real()) * std::cos(z[0].imag());
    }
    const ScalarGrid dx = d_axis(f, 0);
    const ScalarGrid dyy = d2_axis(f, 1);
    double e = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const ComplexPoint z = grid.point(p);
      const double x = z[0].real(), y = z[0].imag();
      e = std::max(e, std::abs(dx.v[p] - 2.0 * std::cos(2.0 * x) * std::cos(y)));
      e = std::max(e, std::abs(dyy.v[p] + std::sin(2.0 * x) * std::cos(y)));
    }
    return e;
  };
  const double e16 = err_at(16);
  const double e32 = err_at(32);
  CHECK(e32 < e16 / 12.0);
}

TEST_CASE("hermitian hessian is hermitian and matches meshfree stencils") {
  const PeriodicGrid grid(2, 8, {kTwoPi, kTwoPi});
  ScalarGrid f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const ComplexPoint z = grid.point(p);
    f.v[p] = std::cos(z[0].real()) * std::sin(z[1].imag()) +
             0.3 * std::cos(z[0].imag() + 0.2);
  }
  const HermitianGrid hess = hermitian_hessian(f);
  auto field = [&](const ComplexPoint& q) -> cplx {
    return std::cos(q[0].real()) * std::sin(q[1].imag()) +
           0.3 * std::cos(q[0].imag() + 0.2);
  };
  const double h = grid.spacing(0);
  for (std::size_t p = 0; p < grid.size(); p += 7) {
    const ComplexPoint z = grid.point(p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(hess.at(p, i, j) == std::conj(hess.at(p, j, i)));
        const cplx mesh = stencil::wirtinger_dd(field, z, i, j, h);
        CHECK(std::abs(hess.at(p, i, j) - mesh) < 1e-11);
      }
  }
}

TEST_CASE("grid ricci routes agree with each other and with the kernel") {
  const TorusModel model = perturbed_n1();
  const PeriodicGrid grid(1, 32, {kTwoPi});
  const MetricField closed = torus_metric(model);
  const HermitianGrid g = sample_metric(closed, grid);

  const HermitianGrid ric_l = ricci_logdet(g);
  const double tol = 1000.0 * std::pow(grid.spacing(0), 4);
  const HermitianGrid ric_t = ricci_trace(g, tol);
  const double h = grid.spacing(0);
  double route_gap = 0.0, kernel_gap = 0.0;
  for (std::size_t p = 0; p < grid.size(); p += 5) {
    route_gap = std::max(route_gap, std::abs(ric_l.at(p, 0, 0) - ric_t.at(p, 0, 0)));
    const Eigen::MatrixXcd exact = chern_ricci(closed, grid.point(p)).mat();
    kernel_gap = std::max(kernel_gap, std::abs(ric_l.at(p, 0, 0) - exact(0, 0)));
  }
  CHECK(route_gap < 50.0 * h * h * h * h);
  CHECK(route_gap > 0.0);  // genuinely different discretizations
  CHECK(kernel_gap < 50.0 * h * h * h * h);
}

TEST_CASE("grid-backed metric field feeds the pointwise kernel") {
  const TorusModel model = perturbed_n1();
  const PeriodicGrid grid(1, 32, {kTwoPi});
  auto g = std::make_shared<HermitianGrid>(sample_metric(torus_metric(model), grid));
  const MetricField field = grid_metric_field(g);

  const HermitianGrid ric_grid = ricci_logdet(*g);
  for (std::size_t p = 0; p < grid.size(); p += 11) {
    const Eigen::MatrixXcd ric_pt =
        chern_ricci(field, grid.point(p), RicciMethod::logdet).mat();
    CHECK(std::abs(ric_pt(0, 0) - ric_grid.at(p, 0, 0)) < 1e-11);
  }

  const ComplexPoint off{cplx(0.1234567, 0.0)};
  CHECK_THROWS_AS(field.value(off), DomainError);
}

TEST_CASE("logdet grid reports the first non-positive point") {
  const PeriodicGrid grid(1, 8, {kTwoPi});
  HermitianGrid g(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) g.at(p, 0, 0) = 1.0;
  g.at(17, 0, 0) = -0.5;
  try {
    logdet_grid(g);
    FAIL("expected PositivityLossError");
  } catch (const PositivityLossError& e) {
    CHECK(e.point_index == 17);
    CHECK(e.min_eigenvalue == doctest::Approx(-0.5));
  }
}

TEST_CASE("alpha_t assembly freezes the initial ricci form") {
  const TorusFlowContext ctx = make_torus_context(perturbed_n1(), 16);
  const HermitianGrid a0 = assemble_alpha(ctx, 0.0);
  for (std::size_t e = 0; e < a0.v.size(); ++e) CHECK(a0.v[e] == ctx.g0.v[e]);
  const double t = 0.37;
  const HermitianGrid at = assemble_alpha(ctx, t);
  for (std::size_t e = 0; e < at.v.size(); e += 13)
    CHECK(at.v[e] == ctx.g0.v[e] - t * ctx.ric0.v[e]);
}

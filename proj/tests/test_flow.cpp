#include <doctest.h>

#include <cmath>

#include "crflow/config.hpp"
#include "crflow/flow.hpp"
#include "crflow/models.hpp"
#include "oracles.hpp"

using namespace crflow;

namespace {
constexpr double kTwoPi = 6.28318530717958647692529;

TorusModel smooth_n1(double amp = 0.1) {
  std::vector<CosineEntry> e{CosineEntry{0, 0, cplx(amp, 0.0), {TrigFactor{0, 1.0, 0.0}}}};
  return TorusModel(1, {kTwoPi}, e);
}
}  // namespace

TEST_CASE("flat torus: tensor and potential steps are exact fixed points") {
  const TorusModel flat(1, {kTwoPi});
  const TorusFlowContext ctx = make_torus_context(flat, 16);

  const TensorState s0{0.0, ctx.g0};
  const TensorState s1 = tensor_step(ctx, s0, 0.05);
  CHECK(s1.g.v == s0.g.v);  // rhs is exactly zero on constants

  PotentialState p0{0.0, ScalarGrid(ctx.grid), ScalarGrid(ctx.grid)};
  const PotentialState p1 = potential_step(ctx, p0, 0.05);
  for (const double v : p1.phi.v) CHECK(v == 0.0);
  for (const double v : p1.phi_dot.v) CHECK(v == 0.0);
}

TEST_CASE("phi_dot at t=0 is exactly zero") {
  const TorusFlowContext ctx = make_torus_context(smooth_n1(), 16);
  const ScalarGrid rhs = potential_rhs(ctx, 0.0, ScalarGrid(ctx.grid));
  for (const double v : rhs.v) CHECK(v == 0.0);
}

TEST_CASE("tensor rhs matches the hand-rolled stencil oracle on an x-line") {
  // n = 1 metric depending on x only; the trace-route right-hand side reduces
  // to (1/4) D(Dg/g) with the 4-point first-derivative stencil.
  const int N = 8;
  std::vector<CosineEntry> e{CosineEntry{0, 0, cplx(0.2, 0.0), {TrigFactor{0, 1.0, 0.0}}}};
  const TorusModel model(1, {kTwoPi}, e);
  const TorusFlowContext ctx = make_torus_context(model, N);
  const HermitianGrid rhs = tensor_rhs(ctx, ctx.g0);

  const double h = ctx.grid.spacing(0);
  std::vector<double> gline(N);
  for (int j = 0; j < N; ++j) gline[static_cast<std::size_t>(j)] =
      1.0 + 0.2 * std::cos(j * h);
  const std::vector<double> hand = oracles::hand_tensor_rhs_line(gline, h);

  for (int j = 0; j < N; ++j) {
    // x index is axis 0 (slowest), y arbitrary.
    const std::size_t flat = static_cast<std::size_t>(j) * ctx.grid.stride(0);
    CHECK(rhs.at(flat, 0, 0).real() ==
          doctest::Approx(hand[static_cast<std::size_t>(j)]).epsilon(1e-12));
    CHECK(std::abs(rhs.at(flat, 0, 0).imag()) < 1e-15);
  }
}

TEST_CASE("one small step diffuses log det toward uniformity") {
  const TorusFlowContext ctx = make_torus_context(smooth_n1(), 16);
  const TensorState s0{0.0, ctx.g0};
  const TensorState s1 = tensor_step(ctx, s0, 1e-3);
  auto variance = [&](const HermitianGrid& g) {
    const ScalarGrid ld = logdet_grid(g);
    double mean = 0.0;
    for (const double v : ld.v) mean += v;
    mean /= static_cast<double>(ld.v.size());
    double var = 0.0;
    for (const double v : ld.v) var += (v - mean) * (v - mean);
    return var;
  };
  CHECK(variance(s1.g) < variance(s0.g));
}

TEST_CASE("time stepping shows 4th-order self-convergence") {
  // A stiffer harmonic keeps the truncation error well above roundoff.
  std::vector<CosineEntry> e{CosineEntry{0, 0, cplx(0.3, 0.0), {TrigFactor{0, 4.0, 0.0}}}};
  const TorusFlowContext ctx = make_torus_context(TorusModel(1, {kTwoPi}, e), 16);
  auto integrate = [&](double dt, int steps) {
    TensorState s{0.0, ctx.g0};
    for (int k = 0; k < steps; ++k) s = tensor_step(ctx, s, dt);
    return s;
  };
  const double T = 0.32;
  const TensorState a = integrate(T / 10, 10);
  const TensorState b = integrate(T / 20, 20);
  const TensorState c = integrate(T / 40, 40);
  auto dist = [](const HermitianGrid& x, const HermitianGrid& y) {
    double d = 0.0;
    for (std::size_t e = 0; e < x.v.size(); ++e)
      d = std::max(d, std::abs(x.v[e] - y.v[e]));
    return d;
  };
  const double e1 = dist(a.g, c.g);
  const double e2 = dist(b.g, c.g);
  CHECK(e1 / e2 > 8.0);
}

TEST_CASE("a step forward then backward returns the state to 4th order") {
  const TorusFlowContext ctx = make_torus_context(smooth_n1(), 16);
  const double dt = 0.05;
  const TensorState s0{0.0, ctx.g0};
  const TensorState fwd = tensor_step(ctx, s0, dt);
  const TensorState back = tensor_step(ctx, fwd, -dt);
  double d = 0.0;
  for (std::size_t e = 0; e < s0.g.v.size(); ++e)
    d = std::max(d, std::abs(back.g.v[e] - s0.g.v[e]));
  CHECK(d < 1e-9);
  CHECK(d < 10.0 * dt * dt * dt * dt * dt);
}

TEST_CASE("flat torus run reaches t_end with vanishing curvature diagnostics") {
  RunConfig cfg = builtin_scenario("flat-torus");
  const Trajectory tr = run_flow(cfg);
  CHECK(tr.termination == Termination::reached_t_end);
  CHECK(tr.label.empty());
  CHECK(tr.t_final == doctest::Approx(1.0));
  for (const auto& r : tr.rows) {
    CHECK(std::abs(r.sup_R) < 1e-13);
    CHECK(std::abs(r.inf_R) < 1e-13);
    CHECK(r.min_eig == doctest::Approx(1.0));
  }
  CHECK(tr.determinant_bound_ok);
  CHECK_FALSE(tr.entered_abort_band);
}

TEST_CASE("perturbed torus run smooths out") {
  // g0 = 1 + 0.1 cos(2 pi x) on the unit-period torus; curvature decays.
  std::vector<CosineEntry> e{CosineEntry{0, 0, cplx(0.1, 0.0), {TrigFactor{0, kTwoPi, 0.0}}}};
  RunConfig cfg;
  cfg.model_kind = RunConfig::ModelKind::torus;
  cfg.n = 1;
  cfg.N = 32;
  cfg.periods = {1.0};
  cfg.entries = e;
  cfg.formulation = Formulation::tensor;
  cfg.dt0 = 1e-4;
  cfg.dt_min = 1e-8;
  cfg.t_end = 0.05;
  cfg.checkpoint_every = 50;
  const Trajectory tr = run_flow(cfg);
  CHECK(tr.termination == Termination::reached_t_end);
  CHECK(tr.rows.back().sup_R < 0.8 * tr.rows.front().sup_R);
  CHECK(tr.rows.back().sup_R > 0.0);
  for (const auto& r : tr.rows) CHECK(r.min_eig > 0.0);
  CHECK(tr.determinant_bound_ok);
}

TEST_CASE("kahler initial data keeps the dbar residual in a thin band") {
  RunConfig cfg = builtin_scenario("kahler-torus-n2");
  cfg.t_end = 0.1;
  const Trajectory tr = run_flow(cfg);
  CHECK(tr.termination == Termination::reached_t_end);
  const double h = kTwoPi / cfg.N;
  const double band = 5.0 * h * h * h * h;
  for (const auto& r : tr.rows) CHECK(r.dbar_residual < band);
}

TEST_CASE("hopf closed-form run terminates at the singular time with blow-up") {
  RunConfig cfg = builtin_scenario("hopf-n2");
  const Trajectory tr = run_flow(cfg);
  CHECK(tr.termination == Termination::step_underflow);
  CHECK(tr.label == "curvature_blowup");
  CHECK(std::abs(tr.t_final - 0.5) < 5e-4);
  CHECK(tr.entered_abort_band);
  CHECK(tr.determinant_bound_ok);

  // sup R = inf R = (n-1)/(1/n - t) along the run.
  for (std::size_t i = 0; i < tr.rows.size(); i += 50) {
    const auto& r = tr.rows[i];
    const oracles::HopfSplit split{2, r.t};
    CHECK(r.sup_R == doctest::Approx(split.scalar()).epsilon(1e-9));
    CHECK(r.inf_R == doctest::Approx(split.scalar()).epsilon(1e-9));
  }
}

TEST_CASE("unstable step size falls back and underflow is a resolution failure") {
  // dt0 far above the explicit stability limit makes the first attempts fail;
  // with dt_min just below dt0 the halving cascade underflows immediately and
  // the flat sup-R tail reads "resolution_failure", not curvature blow-up.
  std::vector<CosineEntry> e{CosineEntry{0, 0, cplx(0.3, 0.0), {TrigFactor{0, 4.0, 0.0}}}};
  RunConfig cfg;
  cfg.model_kind = RunConfig::ModelKind::torus;
  cfg.n = 1;
  cfg.N = 64;
  cfg.periods = {kTwoPi};
  cfg.entries = e;
  cfg.formulation = Formulation::tensor;
  cfg.dt0 = 0.5;  // wildly unstable for h = 2 pi / 64
  cfg.dt_min = 0.3;
  cfg.t_end = 1.0;
  const Trajectory tr = run_flow(cfg);
  CHECK(tr.termination == Termination::step_underflow);
  CHECK(tr.label == "resolution_failure");
  CHECK(tr.entered_abort_band);
}

TEST_CASE("cross validation contracts") {
  RunConfig cfg = builtin_scenario("smooth-torus-n1");
  cfg.t_end = 0.02;
  cfg.formulation = Formulation::tensor;
  const Trajectory a = run_flow(cfg);
  cfg.formulation = Formulation::potential;
  const Trajectory b = run_flow(cfg);

  const DeviationReport rep = cross_validate(a, b);
  CHECK(rep.max_deviation < 1e-5);
  CHECK(rep.max_deviation > 0.0);
  CHECK(cross_validate(a, a).max_deviation == 0.0);

  RunConfig other = cfg;
  other.checkpoint_every = 7;
  const Trajectory c = run_flow(other);
  CHECK_THROWS_AS(cross_validate(a, c), ContractViolation);

  RunConfig smaller = cfg;
  smaller.N = 32;
  const Trajectory d = run_flow(smaller);
  CHECK_THROWS_AS(cross_validate(a, d), ContractViolation);
}

TEST_CASE("phi_dot identity residual on flat, smooth, and closed-form runs") {
  {
    RunConfig cfg = builtin_scenario("flat-torus");
    cfg.formulation = Formulation::potential;
    cfg.t_end = 0.1;
    cfg.checkpoint_every = 2;
    const Trajectory tr = run_flow(cfg);
    for (const double r : phi_dot_identity_residual(tr)) CHECK(r < 1e-14);
  }
  {
    RunConfig cfg = builtin_scenario("smooth-torus-n1");
    cfg.formulation = Formulation::potential;
    cfg.t_end = 0.05;
    const Trajectory tr = run_flow(cfg);
    double sup = 0.0;
    for (const double r : phi_dot_identity_residual(tr)) sup = std::max(sup, r);
    CHECK(sup < 1e-4);
    CHECK(sup > 0.0);
  }
  {
    RunConfig cfg = builtin_scenario("hopf-n2");
    cfg.t_end = 0.3;  // stop before the adaptive tail so spacing stays uniform
    const Trajectory tr = run_flow(cfg);
    CHECK(tr.termination == Termination::reached_t_end);
    double sup = 0.0;
    for (const double r : phi_dot_identity_residual(tr)) sup = std::max(sup, r);
    CHECK(sup < 1e-3);
  }
  {
    RunConfig cfg = builtin_scenario("flat-torus");
    cfg.formulation = Formulation::potential;
    cfg.t_end = 0.02;
    cfg.checkpoint_every = 1000;  // initial + final checkpoint only
    const Trajectory tr = run_flow(cfg);
    CHECK(tr.checkpoints.size() < 3);
    CHECK_THROWS_AS(phi_dot_identity_residual(tr), ContractViolation);
  }
}

TEST_CASE("volume diagnostics match the closed-form references") {
  constexpr double kPi = 3.14159265358979323846;
  {
    // Flat n=1 torus of period 2 pi: vol = 2 (2 pi)^2.
    RunConfig cfg = builtin_scenario("flat-torus");
    cfg.t_end = 0.05;
    const Trajectory tr = run_flow(cfg);
    CHECK(tr.rows.front().volume ==
          doctest::Approx(2.0 * 4.0 * kPi * kPi).epsilon(1e-12));
  }
  {
    // Hopf annulus 1 <= r < 2: vol(t) = 2^n (2 pi^n/(n-1)!) (1-nt)^{n-1} ln 2.
    RunConfig cfg = builtin_scenario("hopf-n2");
    cfg.t_end = 0.3;
    const Trajectory tr = run_flow(cfg);
    const double vol0 = 8.0 * kPi * kPi * std::log(2.0);
    CHECK(tr.rows.front().volume == doctest::Approx(vol0).epsilon(1e-8));
    // Collapsing family: the volume shrinks by (1 - n t)^{n-1}.
    const auto& last = tr.rows.back();
    CHECK(last.volume ==
          doctest::Approx(vol0 * (1.0 - 2.0 * last.t)).epsilon(1e-6));
    for (std::size_t i = 1; i < tr.rows.size(); ++i)
      CHECK(tr.rows[i].volume < tr.rows[i - 1].volume);
  }
}

TEST_CASE("hopf run q1 bookkeeping follows the integrated theta") {
  // phi(t) integrates theta = (n-1) log(1 - n t), so
  // Q1 = t theta - phi - n t = (n-1) log(1 - n t)/n - t.
  RunConfig cfg = builtin_scenario("hopf-n2");
  cfg.t_end = 0.35;
  const Trajectory tr = run_flow(cfg);
  for (std::size_t i = 0; i < tr.rows.size(); i += 40) {
    const auto& r = tr.rows[i];
    const double expect = 0.5 * std::log(1.0 - 2.0 * r.t) - r.t;
    CHECK(r.q1_min == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("stored phi_dot is the log-determinant bookkeeping theta") {
  RunConfig cfg = builtin_scenario("smooth-torus-n1");
  cfg.formulation = Formulation::potential;
  cfg.t_end = 0.02;
  const Trajectory tr = run_flow(cfg);
  const auto& ctx = *tr.torus_ctx;
  for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
    const auto& c = tr.checkpoints[i];
    const HermitianGrid g = checkpoint_metric(tr, i);
    const ScalarGrid ld = logdet_grid(g);
    for (std::size_t p = 0; p < ld.v.size(); ++p)
      CHECK(std::abs(c.phi_dot[p] - (ld.v[p] - ctx.logdet_g0.v[p])) < 1e-14);
  }
}

TEST_CASE("tensor trajectories reject phi-based diagnostics") {
  RunConfig cfg = builtin_scenario("flat-torus");
  cfg.t_end = 0.05;
  const Trajectory tr = run_flow(cfg);
  CHECK_THROWS_AS(phi_dot_identity_residual(tr), ContractViolation);
}

TEST_CASE("diagnostics csv is deterministic and carries the fixed schema") {
  RunConfig cfg = builtin_scenario("smooth-torus-n1");
  cfg.t_end = 0.01;
  const std::string a = diagnostics_csv(run_flow(cfg).rows);
  const std::string b = diagnostics_csv(run_flow(cfg).rows);
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == std::string(kDiagnosticsColumns));
}

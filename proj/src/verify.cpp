#include "crflow/verify.hpp"

#include <cmath>
#include <cstdio>

#include "crflow/config.hpp"
#include "crflow/kernel.hpp"
#include "crflow/models.hpp"
#include "crflow/rng.hpp"
#include "crflow/singularity.hpp"

namespace crflow {

namespace {

constexpr double kTwoPi = 6.28318530717958647692529;

void push(std::vector<Check>& out, const std::string& name, double observed,
          double bound, const std::string& detail = "") {
  out.push_back(Check{name, observed < bound, observed, bound, detail});
}

void push_flag(std::vector<Check>& out, const std::string& name, bool ok,
               double observed, const std::string& detail = "") {
  out.push_back(Check{name, ok, observed, 0.0, detail});
}

TorusModel perturbed_torus_n1() {
  std::vector<CosineEntry> entries;
  entries.push_back(CosineEntry{0, 0, cplx(0.10, 0.0), {TrigFactor{0, 1.0, 0.0}}});
  entries.push_back(
      CosineEntry{0, 0, cplx(0.05, 0.0), {TrigFactor{0, 2.0, 0.0}, TrigFactor{1, 2.0, 0.0}}});
  return TorusModel(1, {kTwoPi}, entries);
}

TorusModel nonkahler_torus_n2() {
  std::vector<CosineEntry> entries;
  entries.push_back(CosineEntry{0, 0, cplx(0.1, 0.0), {TrigFactor{2, 1.0, 0.0}}});
  entries.push_back(CosineEntry{0, 1, cplx(0.03, 0.02), {TrigFactor{0, 1.0, 0.0}}});
  return TorusModel(2, {kTwoPi, kTwoPi}, entries);
}

TorusModel kahler_torus_n2() {
  std::vector<TrigTerm> pot;
  pot.push_back(TrigTerm{cplx(0.2, 0.0), {TrigFactor{0, 1.0, 0.0}, TrigFactor{3, 1.0, 0.0}}});
  return TorusModel(2, {kTwoPi, kTwoPi}, {}, pot);
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd hopf_ricci_expected(const ComplexPoint& p) {
  const int n = p.dim();
  const double r2 = p.r2();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx v = -std::conj(p[i]) * p[j] / r2;
      if (i == j) v += 1.0;
      m(i, j) = v * (static_cast<double>(n) / r2);
    }
  return m;
}

}  // namespace

std::vector<Check> verify_kernel() {
  std::vector<Check> out;
  Rng rng(2024);

  // Flat metric: every package entry vanishes.
  {
    const TorusModel flat(1, {kTwoPi});
    const MetricField g = torus_metric(flat);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      const ComplexPoint p = rng.torus_point(flat.periods());
      const ChernPackage pkg = chern_package(g, p);
      for (const auto& v : pkg.gamma.v) worst = std::max(worst, std::abs(v));
      for (const auto& v : pkg.curvature.v) worst = std::max(worst, std::abs(v));
      worst = std::max(worst, max_abs(pkg.ricci.mat()));
      worst = std::max(worst, std::abs(pkg.scalar));
      for (const auto& v : pkg.torsion.tensor.v) worst = std::max(worst, std::abs(v));
    }
    push(out, "kernel.flat_package_zero", worst, 1e-13);
  }

  // Two-way Ricci agreement, closed form, across models.
  {
    double worst = 0.0;
    const HopfModel h2(2, 2.0), h3(3, 2.0);
    const MetricField fields[] = {torus_metric(perturbed_torus_n1()),
                                  torus_metric(nonkahler_torus_n2()),
                                  hopf_metric(h2), hopf_metric(h3)};
    for (const MetricField& g : fields) {
      const bool hopf = std::holds_alternative<HopfDomain>(g.domain());
      for (int s = 0; s < 25; ++s) {
        const ComplexPoint p =
            hopf ? rng.annulus_point(g.dim(), 1.0, 2.0)
                 : rng.torus_point(std::get<TorusDomain>(g.domain()).periods);
        const Eigen::MatrixXcd a = chern_ricci(g, p, RicciMethod::trace).mat();
        const Eigen::MatrixXcd b = chern_ricci(g, p, RicciMethod::logdet).mat();
        worst = std::max(worst, max_abs(a - b));
      }
    }
    push(out, "kernel.ricci_two_way_closed_form", worst, 1e-10);
  }

  // Two-way Ricci agreement, stencil mode.
  {
    double worst = 0.0;
    const MetricField g = torus_metric(perturbed_torus_n1(), DerivativeMode::stencil, 1e-2);
    for (int s = 0; s < 10; ++s) {
      const ComplexPoint p = rng.torus_point({kTwoPi});
      const Eigen::MatrixXcd a = chern_ricci(g, p, RicciMethod::trace).mat();
      const Eigen::MatrixXcd b = chern_ricci(g, p, RicciMethod::logdet).mat();
      worst = std::max(worst, max_abs(a - b));
    }
    push(out, "kernel.ricci_two_way_stencil", worst, 1e-5);
  }

  // Hopf connection, Ricci, scalar, torsion closed forms.
  {
    const HopfModel m(2, 2.0);
    const MetricField g = hopf_metric(m);
    double worst_gamma = 0.0, worst_ric = 0.0, worst_scal = 0.0, worst_tor = 0.0;
    for (int s = 0; s < 20; ++s) {
      const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
      const double r2 = p.r2();
      const Tensor3 gamma = chern_connection(g, p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) {
            const cplx expect = (j == k) ? -std::conj(p[i]) / r2 : cplx(0.0);
            worst_gamma = std::max(worst_gamma, std::abs(gamma(i, j, k) - expect));
          }
      worst_ric = std::max(
          worst_ric, max_abs(chern_ricci(g, p).mat() - hopf_ricci_expected(p)));
      worst_scal = std::max(worst_scal, std::abs(chern_scalar(g, p) - 2.0));
      const TorsionResult tor = torsion(g, p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) {
            const cplx expect = (j == k ? -std::conj(p[i]) / r2 : cplx(0.0)) -
                                (i == k ? -std::conj(p[j]) / r2 : cplx(0.0));
            worst_tor = std::max(worst_tor, std::abs(tor.tensor(i, j, k) - expect));
          }
      // torsion trace: -(n-1) zbar_k / r^2
      for (int k = 0; k < 2; ++k)
        worst_tor = std::max(worst_tor, std::abs(tor.trace[static_cast<std::size_t>(k)] -
                                                 (-(2.0 - 1.0) * std::conj(p[k]) / r2)));
    }
    push(out, "kernel.hopf_connection", worst_gamma, 1e-12);
    push(out, "kernel.hopf_ricci_value", worst_ric, 1e-12);
    push(out, "kernel.hopf_scalar_value", worst_scal, 1e-12);
    push(out, "kernel.hopf_torsion", worst_tor, 1e-12);
  }

  // Torsion antisymmetry is exact by construction; assert anyway.
  {
    double worst = 0.0;
    const MetricField g = torus_metric(nonkahler_torus_n2());
    for (int s = 0; s < 10; ++s) {
      const ComplexPoint p = rng.torus_point({kTwoPi, kTwoPi});
      const TorsionResult tor = torsion(g, p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            worst = std::max(worst,
                             std::abs(tor.tensor(i, j, k) + tor.tensor(j, i, k)));
    }
    push(out, "kernel.torsion_antisymmetry", worst, 1e-15);
  }

  // Kahler implies vanishing torsion and d-omega residual.
  {
    const MetricField g = torus_metric(kahler_torus_n2());
    std::vector<ComplexPoint> pts;
    for (int s = 0; s < 10; ++s) pts.push_back(rng.torus_point({kTwoPi, kTwoPi}));
    double worst_tor = 0.0;
    for (const auto& p : pts) {
      const TorsionResult tor = torsion(g, p);
      for (const auto& v : tor.tensor.v) worst_tor = std::max(worst_tor, std::abs(v));
    }
    const FormResiduals fr = kahler_gauduchon_residuals(g, pts);
    push(out, "kernel.kahler_torsion_zero", worst_tor, 1e-11);
    push(out, "kernel.kahler_dbar_zero", fr.dbar, 1e-11);
    push(out, "kernel.kahler_gauduchon_zero", fr.gauduchon, 1e-11);
  }

  // Hopf n=2 is Gauduchon but not Kahler.
  {
    const MetricField g = hopf_metric(HopfModel(2, 2.0));
    std::vector<ComplexPoint> pts;
    for (int s = 0; s < 10; ++s) pts.push_back(rng.annulus_point(2, 1.0, 2.0));
    const FormResiduals fr = kahler_gauduchon_residuals(g, pts);
    push(out, "kernel.hopf_gauduchon_residual", fr.gauduchon, 1e-10);
    push_flag(out, "kernel.hopf_dbar_positive", fr.dbar > 0.1, fr.dbar,
              "expected > 0.1");
  }

  // Non-Kahler entry perturbation has torsion at generic points.
  {
    const MetricField g = torus_metric(nonkahler_torus_n2());
    const ComplexPoint p{cplx(0.9, 0.4), cplx(0.8, 1.3)};
    const TorsionResult tor = torsion(g, p);
    double mx = 0.0;
    for (const auto& v : tor.tensor.v) mx = std::max(mx, std::abs(v));
    push_flag(out, "kernel.nonkahler_torsion_nonzero", mx > 1e-3, mx, "expected > 1e-3");
  }

  // Stencil order: halving h shrinks the error at least 8x, both for
  // first-derivative quantities (connection) and second-derivative ones
  // (Ricci).
  {
    const HopfModel m(2, 2.0);
    const MetricField exact = hopf_metric(m);
    const ComplexPoint p = rng.annulus_point(2, 1.1, 1.9);
    const Eigen::MatrixXcd ric_exact = chern_ricci(exact, p).mat();
    const Tensor3 gamma_exact = chern_connection(exact, p);
    auto ric_err = [&](double h) {
      const MetricField g = hopf_metric(m, DerivativeMode::stencil, h);
      return max_abs(chern_ricci(g, p, RicciMethod::logdet).mat() - ric_exact);
    };
    auto gamma_err = [&](double h) {
      const MetricField g = hopf_metric(m, DerivativeMode::stencil, h);
      const Tensor3 gamma = chern_connection(g, p);
      double e = 0.0;
      for (std::size_t k = 0; k < gamma.v.size(); ++k)
        e = std::max(e, std::abs(gamma.v[k] - gamma_exact.v[k]));
      return e;
    };
    const double r1 = ric_err(0.02), r2 = ric_err(0.01);
    const double c1 = gamma_err(0.02), c2 = gamma_err(0.01);
    push_flag(out, "kernel.stencil_order_ricci", r1 / r2 >= 8.0, r1 / r2,
              "error ratio under h halving, expected >= 8");
    push_flag(out, "kernel.stencil_order_connection", c1 / c2 >= 8.0, c1 / c2,
              "error ratio under h halving, expected >= 8");
  }

  // Two-way Ricci agreement in stencil mode on the Hopf metric.
  {
    const MetricField g = hopf_metric(HopfModel(2, 2.0), DerivativeMode::stencil, 1e-2);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      const ComplexPoint p = rng.annulus_point(2, 1.1, 1.9);
      const Eigen::MatrixXcd a = chern_ricci(g, p, RicciMethod::trace).mat();
      const Eigen::MatrixXcd b = chern_ricci(g, p, RicciMethod::logdet).mat();
      worst = std::max(worst, max_abs(a - b));
    }
    push(out, "kernel.ricci_two_way_stencil_hopf", worst, 1e-4);
  }

  // trace_and_norms examples.
  {
    Eigen::MatrixXcd gm(2, 2), hm(2, 2);
    gm << 2.0, 0.0, 0.0, 1.0;
    hm << 4.0, 0.0, 0.0, 3.0;
    const auto tn = trace_and_norms(HermitianMatrix::from(gm), HermitianMatrix::from(hm));
    const double err =
        std::max(std::abs(tn.trace - 5.0), std::abs(tn.norm_sq - 13.0));
    push(out, "kernel.trace_and_norms_example", err, 1e-14);
  }

  // Positivity flags.
  {
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    Eigen::MatrixXcd neg(2, 2);
    neg << 1.0, 0.0, 0.0, -0.1;
    const auto a = positivity(HermitianMatrix::from(id));
    const auto b = positivity(HermitianMatrix::from(neg));
    push_flag(out, "kernel.positivity_flags",
              a.is_positive && std::abs(a.min_eigenvalue - 1.0) < 1e-14 &&
                  !b.is_positive && std::abs(b.min_eigenvalue + 0.1) < 1e-14,
              b.min_eigenvalue);
  }

  return out;
}

std::vector<Check> verify_hopf() {
  std::vector<Check> out;
  Rng rng(9);

  for (int n : {2, 3}) {
    const HopfModel m(n, 2.0);
    const double T = hopf_singular_time(m);
    double worst_flow = 0.0, worst_const = 0.0, worst_scal = 0.0;
    for (int s = 0; s < 50; ++s) {
      const ComplexPoint p = rng.annulus_point(n, 1.0, 2.0);
      const double t = rng.uniform(0.0, 0.85 * T);
      const MetricField gt = hopf_exact_flow(m, t);
      // d/dt g is exactly -Ric(g(0)); the flow requires it to equal -Ric(g(t)).
      const Eigen::MatrixXcd dgdt = -hopf_ricci_expected(p);
      const Eigen::MatrixXcd ric_t = chern_ricci(gt, p, RicciMethod::trace).mat();
      const Eigen::MatrixXcd ric_l = chern_ricci(gt, p, RicciMethod::logdet).mat();
      worst_flow = std::max(worst_flow, max_abs(dgdt + ric_t));
      worst_flow = std::max(worst_flow, max_abs(dgdt + ric_l));
      const MetricField g0 = hopf_metric(m);
      worst_const = std::max(worst_const, max_abs(ric_t - chern_ricci(g0, p).mat()));
      worst_scal = std::max(worst_scal,
                            std::abs(chern_scalar(gt, p) - hopf_exact_scalar(m, t)));
    }
    const std::string tag = "hopf.n" + std::to_string(n);
    push(out, tag + ".flow_residual_closed_form", worst_flow, 1e-8);
    push(out, tag + ".ricci_constancy", worst_const, 1e-8);
    push(out, tag + ".scalar_law", worst_scal, 1e-10);
  }

  // Stencil-mode flow residual with Richardson at h = 1e-3.
  {
    const HopfModel m(2, 2.0);
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
      const double t = rng.uniform(0.0, 0.4);
      const MetricField gt = hopf_exact_flow(m, t, DerivativeMode::stencil, 1e-3, true);
      const Eigen::MatrixXcd ric = chern_ricci(gt, p, RicciMethod::logdet).mat();
      worst = std::max(worst, max_abs(ric - hopf_ricci_expected(p)));
    }
    push(out, "hopf.flow_residual_stencil", worst, 1e-4);
  }

  // Singular time by bisection on the positivity margin.
  {
    const HopfModel m(2, 2.0);
    std::vector<HermitianMatrix> g0s, rics;
    const MetricField g0 = hopf_metric(m);
    for (int s = 0; s < 20; ++s) {
      const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
      g0s.push_back(HermitianMatrix::from(g0.value(p)));
      rics.push_back(chern_ricci(g0, p));
    }
    const double t_star = maximal_time_proxy(g0s, rics);
    push(out, "hopf.singular_time_bisection", std::abs(t_star - 0.5), 1e-9);
  }

  // Pullback identity g(alpha z) = g(z) / |alpha|^2 for the diagonal metric.
  {
    const HopfModel m(2, 2.0);
    const MetricField g = hopf_metric(m);
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
      ComplexPoint q = p;
      for (int i = 0; i < 2; ++i) q[i] *= 2.0;
      worst = std::max(worst, max_abs(4.0 * g.value(q) - g.value(p)));
    }
    push(out, "hopf.pullback_identity", worst, 1e-13);
  }

  // Volume-form law d/dt log det g = -R, 4th-order finite difference in t.
  {
    const HopfModel m(2, 2.0);
    const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
    auto logdet_at = [&](double t) {
      const Eigen::MatrixXcd g = hopf_exact_flow(m, t).value(p);
      return std::log((g(0, 0).real() * g(1, 1).real() - std::norm(g(0, 1))));
    };
    double worst = 0.0;
    for (double t : {0.1, 0.2, 0.3}) {
      const double d = 1e-4;
      const double fd = (-logdet_at(t + 2 * d) + 8 * logdet_at(t + d) -
                         8 * logdet_at(t - d) + logdet_at(t - 2 * d)) /
                        (12 * d);
      worst = std::max(worst, std::abs(fd + hopf_exact_scalar(m, t)));
    }
    push(out, "hopf.volume_form_law", worst, 1e-8);
  }

  // Degeneration at T: the positivity margin collapses linearly.
  {
    const HopfModel m(2, 2.0);
    const ComplexPoint p{cplx(1.0, 0.0), cplx(0.0, 0.0)};
    const double eig = min_eig_hermitian(hopf_exact_flow(m, 0.5 - 1e-9).value(p));
    push(out, "hopf.degeneration_at_T", std::abs(eig - 2e-9), 1e-12,
         "min eigenvalue (1 - n t)/r^2 at t = 1/n - 1e-9");
  }

  return out;
}

std::vector<Check> verify_equivalence() {
  std::vector<Check> out;

  // Flat torus: both formulations stay exactly at g0.
  {
    RunConfig cfg = builtin_scenario("flat-torus");
    cfg.t_end = 0.05;
    Trajectory a = run_flow(cfg);
    cfg.formulation = Formulation::potential;
    Trajectory b = run_flow(cfg);
    const DeviationReport rep = cross_validate(a, b);
    push(out, "equivalence.flat_deviation", rep.max_deviation, 1e-14);
    const DeviationReport self = cross_validate(a, a);
    push_flag(out, "equivalence.self_deviation", self.max_deviation == 0.0,
              self.max_deviation, "identical trajectory compares to exactly 0");
  }

  // Canonical smoothing torus at a reduced horizon.
  {
    RunConfig cfg = builtin_scenario("smooth-torus-n1");
    cfg.t_end = 0.1;
    cfg.formulation = Formulation::tensor;
    const Trajectory a = run_flow(cfg);
    cfg.formulation = Formulation::potential;
    const Trajectory b = run_flow(cfg);
    const DeviationReport rep = cross_validate(a, b);
    push(out, "equivalence.smooth_torus_deviation", rep.max_deviation, 1e-5);
  }

  return out;
}

std::vector<Check> verify_lemma() {
  std::vector<Check> out;

  // Hopf closed form: dR/dt = |Ric|^2 (Lap R = 0 by spatial constancy).
  {
    Rng rng(31);
    const HopfModel m(2, 2.0);
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      const ComplexPoint p = rng.annulus_point(2, 1.0, 2.0);
      const double t = rng.uniform(0.05, 0.35);
      const double d = 2e-4;
      auto R_at = [&](double tt) {
        return chern_scalar(hopf_exact_flow(m, tt), p);
      };
      const double dRdt =
          (-R_at(t + 2 * d) + 8 * R_at(t + d) - 8 * R_at(t - d) + R_at(t - 2 * d)) /
          (12 * d);
      const MetricField gt = hopf_exact_flow(m, t);
      const HermitianMatrix gm = HermitianMatrix::from(gt.value(p));
      const double nrm = trace_and_norms(gm, chern_ricci(gt, p)).norm_sq;
      worst = std::max(worst, std::abs(dRdt - nrm));
    }
    push(out, "lemma.hopf_dRdt_equals_ric_norm", worst, 1e-8);
  }

  // Hopf: analytic d(phi_dot)/dt = -(n-1)/(1/n - t) equals -R(t).
  {
    const HopfModel m(3, 2.0);
    double worst = 0.0;
    for (double t : {0.05, 0.15, 0.25}) {
      const double lhs = -(m.n - 1.0) * m.n / (1.0 - m.n * t);
      worst = std::max(worst, std::abs(lhs + hopf_exact_scalar(m, t)));
    }
    push(out, "lemma.hopf_phi_dot_identity", worst, 1e-12);
  }

  // Perturbed torus refinement: the evolution residual drops >= 4x when both
  // h and dt are halved.
  {
    RunConfig cfg = builtin_scenario("smooth-torus-n1");
    cfg.t_end = 0.1;
    cfg.formulation = Formulation::potential;
    const Trajectory coarse = run_flow(cfg);
    RunConfig fine_cfg = cfg;
    fine_cfg.N = cfg.N * 2;
    fine_cfg.dt0 = cfg.dt0 / 2;
    const Trajectory fine = run_flow(fine_cfg);
    auto sup_of = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s = std::max(s, x);
      return s;
    };
    const double rc = sup_of(scalar_evolution_residual(coarse));
    const double rf = sup_of(scalar_evolution_residual(fine));
    push_flag(out, "lemma.evolution_residual_refinement", rc / rf >= 4.0, rc / rf,
              "residual ratio under (h, dt) halving, expected >= 4");

    const double pc = sup_of(phi_dot_identity_residual(coarse));
    const double pf = sup_of(phi_dot_identity_residual(fine));
    push(out, "lemma.phi_dot_residual", pc, 1e-4);
    push_flag(out, "lemma.phi_dot_residual_refinement", pc / pf >= 3.5, pc / pf,
              "residual ratio under (h, dt) halving, expected >= 3.5");
  }

  return out;
}

std::vector<Check> run_verify_suite(const std::string& suite) {
  if (suite == "kernel") return verify_kernel();
  if (suite == "hopf") return verify_hopf();
  if (suite == "equivalence") return verify_equivalence();
  if (suite == "lemma") return verify_lemma();
  throw ConfigError("unknown verify suite '" + suite +
                    "' (expected kernel|hopf|equivalence|lemma)");
}

std::string format_checks(const std::vector<Check>& checks) {
  std::string out;
  char buf[160];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof(buf), "%s %s observed=%.6g bound=%.6g %s\n",
                  c.passed ? "ok" : "FAIL", c.name.c_str(), c.observed, c.bound,
                  c.detail.c_str());
    out += buf;
  }
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

}  // namespace crflow

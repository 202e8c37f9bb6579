#include "crflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>

#include "crflow/config.hpp"
#include "crflow/kernel.hpp"

namespace crflow {

const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::tensor: return "tensor";
    case Formulation::potential: return "potential";
    case Formulation::closed_form: return "closed_form";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::positivity_loss: return "positivity_loss";
    case Termination::step_underflow: return "step_underflow";
  }
  return "?";
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::string out = kDiagnosticsColumns;
  out += '\n';
  char buf[64];
  auto append = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
    out += sep;
  };
  for (const auto& r : rows) {
    append(r.t, ',');
    append(r.sup_R, ',');
    append(r.inf_R, ',');
    append(r.sup_ric_norm_sq, ',');
    append(r.min_eig, ',');
    append(r.sup_abs_phi, ',');
    append(r.sup_abs_phidot, ',');
    append(r.q1_min, ',');
    append(r.q1_max, ',');
    append(r.volume, ',');
    append(r.dbar_residual, ',');
    append(r.gauduchon_residual, '\n');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Torus machinery

TorusFlowContext make_torus_context(const TorusModel& model, int N) {
  TorusFlowContext ctx{model, PeriodicGrid(model.n(), N, model.periods()),
                       HermitianGrid(), ScalarGrid(), HermitianGrid(), 0.0};
  ctx.g0 = sample_metric(torus_metric(model), ctx.grid);
  ctx.logdet_g0 = logdet_grid(ctx.g0);
  ctx.ric0 = ricci_logdet(ctx.g0);
  double hmax = 0.0;
  for (int a = 0; a < ctx.grid.axes(); ++a) hmax = std::max(hmax, ctx.grid.spacing(a));
  ctx.sym_tol = 1000.0 * hmax * hmax * hmax * hmax;
  return ctx;
}

HermitianGrid tensor_rhs(const TorusFlowContext& ctx, const HermitianGrid& g) {
  HermitianGrid ric = ricci_trace(g, ctx.sym_tol);
  for (auto& e : ric.v) e = -e;
  return ric;
}

HermitianGrid assemble_alpha(const TorusFlowContext& ctx, double t) {
  HermitianGrid a = ctx.g0;
  axpy(a, -t, ctx.ric0);
  return a;
}

HermitianGrid reconstruct_metric(const TorusFlowContext& ctx, double t,
                                 const ScalarGrid& phi) {
  HermitianGrid g = assemble_alpha(ctx, t);
  const HermitianGrid hess = hermitian_hessian(phi);
  axpy(g, 1.0, hess);
  return g;
}

ScalarGrid potential_rhs(const TorusFlowContext& ctx, double t, const ScalarGrid& phi) {
  const HermitianGrid g = reconstruct_metric(ctx, t, phi);
  ScalarGrid theta = logdet_grid(g);  // throws PositivityLossError when not > 0
  for (std::size_t p = 0; p < theta.v.size(); ++p) theta.v[p] -= ctx.logdet_g0.v[p];
  return theta;
}

TensorState tensor_step(const TorusFlowContext& ctx, const TensorState& s, double dt) {
  if (!(dt != 0.0)) throw ContractViolation("tensor_step: dt must be nonzero");
  const HermitianGrid k1 = tensor_rhs(ctx, s.g);
  HermitianGrid y = s.g;
  axpy(y, 0.5 * dt, k1);
  const HermitianGrid k2 = tensor_rhs(ctx, y);
  y = s.g;
  axpy(y, 0.5 * dt, k2);
  const HermitianGrid k3 = tensor_rhs(ctx, y);
  y = s.g;
  axpy(y, dt, k3);
  const HermitianGrid k4 = tensor_rhs(ctx, y);

  TensorState out{s.t + dt, s.g};
  const double w = dt / 6.0;
  for (std::size_t e = 0; e < out.g.v.size(); ++e)
    out.g.v[e] += w * (k1.v[e] + 2.0 * k2.v[e] + 2.0 * k3.v[e] + k4.v[e]);
  // Hermitian symmetrization against roundoff drift in long runs.
  const int n = out.g.n;
  for (std::size_t p = 0; p < out.g.grid.size(); ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const cplx m = 0.5 * (out.g.at(p, i, j) + std::conj(out.g.at(p, j, i)));
        out.g.at(p, i, j) = m;
        out.g.at(p, j, i) = std::conj(m);
      }
  std::size_t argmin = 0;
  const double eig = grid_min_eig(out.g, &argmin);
  if (!(eig > 0.0)) throw PositivityLossError(argmin, eig);
  return out;
}

PotentialState potential_step(const TorusFlowContext& ctx, const PotentialState& s,
                              double dt) {
  if (!(dt != 0.0)) throw ContractViolation("potential_step: dt must be nonzero");
  const ScalarGrid k1 = potential_rhs(ctx, s.t, s.phi);
  ScalarGrid y = s.phi;
  axpy(y, 0.5 * dt, k1);
  const ScalarGrid k2 = potential_rhs(ctx, s.t + 0.5 * dt, y);
  y = s.phi;
  axpy(y, 0.5 * dt, k2);
  const ScalarGrid k3 = potential_rhs(ctx, s.t + 0.5 * dt, y);
  y = s.phi;
  axpy(y, dt, k3);
  const ScalarGrid k4 = potential_rhs(ctx, s.t + dt, y);

  PotentialState out{s.t + dt, s.phi, ScalarGrid(ctx.grid)};
  const double w = dt / 6.0;
  for (std::size_t p = 0; p < out.phi.v.size(); ++p)
    out.phi.v[p] += w * (k1.v[p] + 2.0 * k2.v[p] + 2.0 * k3.v[p] + k4.v[p]);
  out.phi_dot = potential_rhs(ctx, out.t, out.phi);  // re-checks positivity
  return out;
}

// ---------------------------------------------------------------------------
// Hopf closed-form machinery

HopfFlowContext make_hopf_context(const HopfModel& model, int num_samples,
                                  std::uint64_t seed) {
  HopfFlowContext ctx{model, {}};
  Rng rng(seed);
  ctx.samples.reserve(static_cast<std::size_t>(num_samples));
  for (int s = 0; s < num_samples; ++s)
    ctx.samples.push_back(rng.annulus_point(model.n, 1.0, model.alpha_modulus));
  return ctx;
}

namespace {

double det_of(const MetricField& g, const ComplexPoint& p) {
  const Eigen::MatrixXcd m = g.value(p);
  if (m.rows() == 1) return m(0, 0).real();
  if (m.rows() == 2)
    return m(0, 0).real() * m(1, 1).real() - std::norm(m(0, 1));
  return m.determinant().real();
}

double hopf_volume(const HopfModel& model, const MetricField& g) {
  // vol = 2^n * Vol(S^{2n-1}) * int_1^{|a|} det g(r e_1) r^{2n-1} dr, Simpson.
  constexpr double kPi = 3.14159265358979323846;
  const int n = model.n;
  double sphere = 2.0;  // 2 pi^n / (n-1)!
  for (int k = 1; k <= n; ++k) sphere *= kPi;
  for (int k = 2; k <= n - 1; ++k) sphere /= static_cast<double>(k);
  const int segments = 64;
  const double lo = 1.0, hi = model.alpha_modulus;
  const double dr = (hi - lo) / segments;
  auto f = [&](double r) {
    std::vector<cplx> z(static_cast<std::size_t>(n), cplx(0.0));
    z[0] = r;
    const double det = det_of(g, ComplexPoint(std::move(z)));
    double rp = 1.0;
    for (int k = 0; k < 2 * n - 1; ++k) rp *= r;
    return det * rp;
  };
  double acc = f(lo) + f(hi);
  for (int s = 1; s < segments; ++s) acc += (s % 2 ? 4.0 : 2.0) * f(lo + s * dr);
  double scale = 1.0;
  for (int k = 0; k < n; ++k) scale *= 2.0;
  return scale * sphere * acc * dr / 3.0;
}

struct HopfPointDiag {
  double sup_R, inf_R, sup_norm_sq, min_eig, dbar, gauduchon;
};

HopfPointDiag hopf_point_diagnostics(const HopfFlowContext& ctx, double t) {
  const MetricField g = hopf_exact_flow(ctx.model, t);
  HopfPointDiag d{-std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  0.0,
                  std::numeric_limits<double>::infinity(),
                  0.0,
                  0.0};
  for (const auto& p : ctx.samples) {
    const double R = chern_scalar(g, p);
    d.sup_R = std::max(d.sup_R, R);
    d.inf_R = std::min(d.inf_R, R);
    const HermitianMatrix gm = HermitianMatrix::from(g.value(p));
    const HermitianMatrix ric = chern_ricci(g, p);
    d.sup_norm_sq = std::max(d.sup_norm_sq, trace_and_norms(gm, ric).norm_sq);
    d.min_eig = std::min(d.min_eig, gm.min_eigenvalue());
  }
  const std::size_t nres = std::min<std::size_t>(16, ctx.samples.size());
  const FormResiduals fr = kahler_gauduchon_residuals(
      g, std::span<const ComplexPoint>(ctx.samples.data(), nres));
  d.dbar = fr.dbar;
  d.gauduchon = fr.gauduchon;
  return d;
}

double hopf_theta(const HopfFlowContext& ctx, double t) {
  // theta = log det g(t) - log det g(0), spatially constant; evaluated
  // numerically at the first sample.
  const MetricField gt = hopf_exact_flow(ctx.model, t);
  const MetricField g0 = hopf_metric(ctx.model);
  const ComplexPoint& p = ctx.samples.front();
  return std::log(det_of(gt, p)) - std::log(det_of(g0, p));
}

}  // namespace

// ---------------------------------------------------------------------------
// Adaptive driver

namespace {

struct DriverOps {
  std::function<DiagnosticsRow()> diagnose;
  std::function<CheckpointData()> make_checkpoint;
  // Attempt a step from the committed state; returns the tentative state's
  // min eigenvalue or nullopt on positivity loss. Never commits.
  std::function<std::optional<double>(double dt)> attempt;
  std::function<void()> commit;
  std::function<double()> time;
};

void integrate_adaptive(const RunConfig& cfg, const DriverOps& ops, Trajectory& tr) {
  const double kPosTol = cfg.positivity_tol;
  double dt = cfg.dt0;
  DiagnosticsRow row = ops.diagnose();
  tr.rows.push_back(row);
  tr.checkpoints.push_back(ops.make_checkpoint());
  double margin = row.min_eig;
  if (!(margin > kPosTol)) {
    tr.termination = Termination::positivity_loss;
    tr.t_final = ops.time();
    return;
  }

  long step_index = 0;
  tr.termination = Termination::reached_t_end;
  while (ops.time() < cfg.t_end - 1e-15) {
    const double dt_eff = std::min(dt, cfg.t_end - ops.time());
    const std::optional<double> next = ops.attempt(dt_eff);
    bool ok = next.has_value() && *next > kPosTol;
    if (ok) {
      const double decrement = margin - *next;
      if (decrement > 0.0 && *next < 10.0 * decrement) ok = false;
    }
    if (!ok) {
      tr.entered_abort_band = true;
      dt *= 0.5;
      if (dt < cfg.dt_min) {
        tr.termination = Termination::step_underflow;
        break;
      }
      continue;
    }
    ops.commit();
    margin = *next;
    ++step_index;
    row = ops.diagnose();
    tr.rows.push_back(row);
    if (step_index % cfg.checkpoint_every == 0)
      tr.checkpoints.push_back(ops.make_checkpoint());
  }
  tr.t_final = ops.time();
  if (tr.checkpoints.empty() || tr.checkpoints.back().t != tr.t_final)
    tr.checkpoints.push_back(ops.make_checkpoint());
}

void finalize_trajectory(Trajectory& tr) {
  tr.sup_R_overall = -std::numeric_limits<double>::infinity();
  tr.min_eig_overall = std::numeric_limits<double>::infinity();
  double c_r = 0.0;
  for (const auto& r : tr.rows) {
    tr.sup_R_overall = std::max(tr.sup_R_overall, r.sup_R);
    tr.min_eig_overall = std::min(tr.min_eig_overall, r.min_eig);
    c_r = std::max(c_r, std::max(std::abs(r.sup_R), std::abs(r.inf_R)));
  }
  // Discrete determinant bound: |phi_dot(t)| <= |phi_dot(0)| + sup|R| * t.
  tr.determinant_bound_ok = true;
  if (!tr.rows.empty() && std::isfinite(tr.rows.front().sup_abs_phidot)) {
    const double base = tr.rows.front().sup_abs_phidot;
    for (const auto& r : tr.rows) {
      const double bound = base + c_r * r.t + 1e-8 * (1.0 + c_r * r.t);
      if (r.sup_abs_phidot > bound) {
        tr.determinant_bound_ok = false;
        break;
      }
    }
  }
  // Label step-underflow terminations by the sup-R tail.
  if (tr.termination == Termination::step_underflow) {
    const std::size_t k = std::min<std::size_t>(10, tr.rows.size());
    bool growing = k >= 2;
    for (std::size_t i = tr.rows.size() - k + 1; growing && i < tr.rows.size(); ++i)
      if (tr.rows[i].sup_R < tr.rows[i - 1].sup_R - 1e-12) growing = false;
    if (growing && k >= 2)
      growing = tr.rows.back().sup_R > tr.rows[tr.rows.size() - k].sup_R;
    tr.label = growing ? "curvature_blowup" : "resolution_failure";
  }
}

// --- torus diagnostics -------------------------------------------------------

struct TorusDiag {
  DiagnosticsRow row;
  ScalarGrid R;
};

TorusDiag torus_diagnostics(const TorusFlowContext& ctx, double t,
                            const HermitianGrid& g, const ScalarGrid* phi,
                            const ScalarGrid* phi_dot) {
  TorusDiag out;
  DiagnosticsRow& r = out.row;
  r.t = t;
  const HermitianGrid ric = ricci_logdet(g);
  out.R = scalar_curvature(g, ric);
  r.sup_R = -std::numeric_limits<double>::infinity();
  r.inf_R = std::numeric_limits<double>::infinity();
  for (const double v : out.R.v) {
    r.sup_R = std::max(r.sup_R, v);
    r.inf_R = std::min(r.inf_R, v);
  }
  const ScalarGrid nrm = ric_norm_sq(g, ric);
  r.sup_ric_norm_sq = 0.0;
  for (const double v : nrm.v) r.sup_ric_norm_sq = std::max(r.sup_ric_norm_sq, v);
  r.min_eig = grid_min_eig(g);

  const int n = ctx.grid.n();
  const ScalarGrid det = det_grid(g);
  double mean_det = 0.0;
  for (const double v : det.v) mean_det += v;
  mean_det /= static_cast<double>(det.v.size());
  double cell = 1.0;
  for (int k = 0; k < n; ++k) {
    const double P = ctx.grid.periods()[static_cast<std::size_t>(k)];
    cell *= 2.0 * P * P;  // 2^n prod P_k^2
  }
  r.volume = cell * mean_det;

  const FormResiduals fr = grid_form_residuals(g);
  r.dbar_residual = fr.dbar;
  r.gauduchon_residual = fr.gauduchon;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (phi && phi_dot) {
    double sup_phi = 0.0, sup_pd = 0.0;
    double q1_min = std::numeric_limits<double>::infinity();
    double q1_max = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < phi->v.size(); ++p) {
      sup_phi = std::max(sup_phi, std::abs(phi->v[p]));
      sup_pd = std::max(sup_pd, std::abs(phi_dot->v[p]));
      const double q1 = t * phi_dot->v[p] - phi->v[p] - n * t;
      q1_min = std::min(q1_min, q1);
      q1_max = std::max(q1_max, q1);
    }
    r.sup_abs_phi = sup_phi;
    r.sup_abs_phidot = sup_pd;
    r.q1_min = q1_min;
    r.q1_max = q1_max;
  } else {
    // theta = log det g - log det g0 doubles as phi_dot along the flow.
    double sup_pd = 0.0;
    const ScalarGrid ld = logdet_grid(g);
    for (std::size_t p = 0; p < ld.v.size(); ++p)
      sup_pd = std::max(sup_pd, std::abs(ld.v[p] - ctx.logdet_g0.v[p]));
    r.sup_abs_phi = nan;
    r.sup_abs_phidot = sup_pd;
    r.q1_min = nan;
    r.q1_max = nan;
  }
  return out;
}

Trajectory run_torus_tensor(const RunConfig& cfg) {
  Trajectory tr;
  tr.formulation = Formulation::tensor;
  auto ctx = std::make_shared<TorusFlowContext>(
      make_torus_context(cfg.torus_model(), cfg.N));
  tr.torus_ctx = ctx;

  TensorState state{0.0, ctx->g0};
  std::optional<TensorState> tentative;

  DriverOps ops;
  ops.time = [&] { return state.t; };
  ops.diagnose = [&] {
    return torus_diagnostics(*ctx, state.t, state.g, nullptr, nullptr).row;
  };
  ops.make_checkpoint = [&] {
    CheckpointData c;
    c.t = state.t;
    c.metric = state.g.v;
    c.scalar_R = scalar_curvature(state.g, ricci_logdet(state.g)).v;
    return c;
  };
  ops.attempt = [&](double dt) -> std::optional<double> {
    try {
      tentative = tensor_step(*ctx, state, dt);
    } catch (const PositivityLossError&) {
      tentative.reset();
      return std::nullopt;
    }
    return grid_min_eig(tentative->g);
  };
  ops.commit = [&] { state = std::move(*tentative); };

  integrate_adaptive(cfg, ops, tr);
  finalize_trajectory(tr);
  return tr;
}

Trajectory run_torus_potential(const RunConfig& cfg) {
  Trajectory tr;
  tr.formulation = Formulation::potential;
  auto ctx = std::make_shared<TorusFlowContext>(
      make_torus_context(cfg.torus_model(), cfg.N));
  tr.torus_ctx = ctx;

  PotentialState state{0.0, ScalarGrid(ctx->grid), ScalarGrid(ctx->grid)};
  state.phi_dot = potential_rhs(*ctx, 0.0, state.phi);
  std::optional<PotentialState> tentative;

  DriverOps ops;
  ops.time = [&] { return state.t; };
  ops.diagnose = [&] {
    const HermitianGrid g = reconstruct_metric(*ctx, state.t, state.phi);
    return torus_diagnostics(*ctx, state.t, g, &state.phi, &state.phi_dot).row;
  };
  ops.make_checkpoint = [&] {
    CheckpointData c;
    c.t = state.t;
    c.phi = state.phi.v;
    c.phi_dot = state.phi_dot.v;
    const HermitianGrid g = reconstruct_metric(*ctx, state.t, state.phi);
    c.scalar_R = scalar_curvature(g, ricci_logdet(g)).v;
    return c;
  };
  ops.attempt = [&](double dt) -> std::optional<double> {
    try {
      tentative = potential_step(*ctx, state, dt);
    } catch (const PositivityLossError&) {
      tentative.reset();
      return std::nullopt;
    }
    const HermitianGrid g = reconstruct_metric(*ctx, tentative->t, tentative->phi);
    return grid_min_eig(g);
  };
  ops.commit = [&] { state = std::move(*tentative); };

  integrate_adaptive(cfg, ops, tr);
  finalize_trajectory(tr);
  return tr;
}

Trajectory run_hopf_closed_form(const RunConfig& cfg) {
  Trajectory tr;
  tr.formulation = Formulation::closed_form;
  auto ctx = std::make_shared<HopfFlowContext>(
      make_hopf_context(cfg.hopf_model(), cfg.hopf_samples, cfg.seed));
  tr.hopf_ctx = ctx;
  const int n = ctx->model.n;
  const double t_max = hopf_singular_time(ctx->model);

  double t = 0.0;
  double phi = 0.0;        // trapezoid-integrated theta bookkeeping
  double theta = 0.0;      // theta(0) = 0
  double t_tent = 0.0;

  DriverOps ops;
  ops.time = [&] { return t; };
  ops.diagnose = [&] {
    const HopfPointDiag d = hopf_point_diagnostics(*ctx, t);
    DiagnosticsRow r;
    r.t = t;
    r.sup_R = d.sup_R;
    r.inf_R = d.inf_R;
    r.sup_ric_norm_sq = d.sup_norm_sq;
    r.min_eig = d.min_eig;
    r.sup_abs_phi = std::abs(phi);
    r.sup_abs_phidot = std::abs(theta);
    const double q1 = t * theta - phi - n * t;
    r.q1_min = q1;
    r.q1_max = q1;
    r.volume = hopf_volume(ctx->model, hopf_exact_flow(ctx->model, t));
    r.dbar_residual = d.dbar;
    r.gauduchon_residual = d.gauduchon;
    return r;
  };
  ops.make_checkpoint = [&] {
    CheckpointData c;
    c.t = t;
    c.phi = {phi};
    c.phi_dot = {theta};
    const MetricField g = hopf_exact_flow(ctx->model, t);
    c.scalar_R.reserve(ctx->samples.size());
    for (const auto& p : ctx->samples) c.scalar_R.push_back(chern_scalar(g, p));
    return c;
  };
  ops.attempt = [&](double dt) -> std::optional<double> {
    const double tn = t + dt;
    if (tn >= t_max) return std::nullopt;
    t_tent = tn;
    const MetricField g = hopf_exact_flow(ctx->model, tn);
    double eig = std::numeric_limits<double>::infinity();
    for (const auto& p : ctx->samples)
      eig = std::min(eig, min_eig_hermitian(g.value(p)));
    return eig;
  };
  ops.commit = [&] {
    const double theta_new = hopf_theta(*ctx, t_tent);
    phi += 0.5 * (t_tent - t) * (theta + theta_new);
    theta = theta_new;
    t = t_tent;
  };

  integrate_adaptive(cfg, ops, tr);
  finalize_trajectory(tr);
  return tr;
}

}  // namespace

Trajectory run_flow(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.model_kind == RunConfig::ModelKind::hopf) return run_hopf_closed_form(cfg);
  if (cfg.formulation == Formulation::potential) return run_torus_potential(cfg);
  return run_torus_tensor(cfg);
}

// ---------------------------------------------------------------------------
// Cross-validation and identities

HermitianGrid checkpoint_metric(const Trajectory& tr, std::size_t idx) {
  if (!tr.torus_ctx) throw ContractViolation("checkpoint_metric: torus trajectories only");
  const CheckpointData& c = tr.checkpoints.at(idx);
  if (!c.metric.empty()) {
    HermitianGrid g(tr.torus_ctx->grid);
    g.v = c.metric;
    return g;
  }
  ScalarGrid phi(tr.torus_ctx->grid);
  phi.v = c.phi;
  return reconstruct_metric(*tr.torus_ctx, c.t, phi);
}

DeviationReport cross_validate(const Trajectory& a, const Trajectory& b) {
  if (!a.torus_ctx || !b.torus_ctx)
    throw ContractViolation("cross_validate: torus trajectories only");
  if (!a.torus_ctx->grid.compatible(b.torus_ctx->grid))
    throw ContractViolation("cross_validate: grids differ");
  if (a.torus_ctx->g0.v != b.torus_ctx->g0.v)
    throw ContractViolation("cross_validate: models differ");
  if (a.checkpoints.size() != b.checkpoints.size())
    throw ContractViolation("cross_validate: checkpoint counts differ");
  DeviationReport rep;
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    if (std::abs(a.checkpoints[i].t - b.checkpoints[i].t) > 1e-12)
      throw ContractViolation("cross_validate: checkpoint times differ");
    const HermitianGrid ga = checkpoint_metric(a, i);
    const HermitianGrid gb = checkpoint_metric(b, i);
    double dev = 0.0;
    for (std::size_t e = 0; e < ga.v.size(); ++e)
      dev = std::max(dev, std::abs(ga.v[e] - gb.v[e]));
    rep.t.push_back(a.checkpoints[i].t);
    rep.deviation.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

std::vector<double> phi_dot_identity_residual(const Trajectory& tr) {
  if (tr.formulation == Formulation::tensor)
    throw ContractViolation("phi_dot_identity_residual needs phi_dot checkpoints");
  if (tr.checkpoints.size() < 3)
    throw ContractViolation("phi_dot_identity_residual needs >= 3 checkpoints");
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < tr.checkpoints.size(); ++i) {
    const auto& cm = tr.checkpoints[i - 1];
    const auto& c0 = tr.checkpoints[i];
    const auto& cp = tr.checkpoints[i + 1];
    const double hm = c0.t - cm.t;
    const double hp = cp.t - c0.t;
    const double denom = hm * hp * (hm + hp);
    auto fd_at = [&](std::size_t p) {
      return (hm * hm * cp.phi_dot[p] + (hp * hp - hm * hm) * c0.phi_dot[p] -
              hp * hp * cm.phi_dot[p]) /
             denom;
    };
    double sup = 0.0;
    if (c0.phi_dot.size() == 1) {
      // Closed form: phi_dot is spatially constant, R stored per sample.
      const double fd = fd_at(0);
      for (const double R : c0.scalar_R) sup = std::max(sup, std::abs(fd + R));
    } else {
      for (std::size_t p = 0; p < c0.phi_dot.size(); ++p)
        sup = std::max(sup, std::abs(fd_at(p) + c0.scalar_R[p]));
    }
    out.push_back(sup);
  }
  return out;
}

}  // namespace crflow

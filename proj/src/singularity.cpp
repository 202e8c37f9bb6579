#include "crflow/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace crflow {

SupSeries sup_scalar_series(const Trajectory& tr) {
  if (tr.rows.size() < 2)
    throw ContractViolation("sup_scalar_series: need at least 2 rows");
  SupSeries s;
  s.t.reserve(tr.rows.size());
  for (const auto& r : tr.rows) {
    s.t.push_back(r.t);
    s.sup_R.push_back(r.sup_R);
    s.inf_R.push_back(r.inf_R);
  }
  std::size_t start = s.sup_R.size() - 1;
  while (start > 0 && s.sup_R[start] > s.sup_R[start - 1]) --start;
  s.monotone_tail_start = start;
  return s;
}

namespace {

struct LinearFit {
  double log_c = 0.0;
  double k = 0.0;
  double rss = 0.0;
};

/// Least squares of y = log_c - k * x.
LinearFit solve_linear(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = m * sxx - sx * sx;
  LinearFit f;
  f.k = -(m * sxy - sx * sy) / denom;
  f.log_c = (sy + f.k * sx) / m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.log_c - f.k * x[i]);
    f.rss += r * r;
  }
  return f;
}

}  // namespace

BlowupFit fit_blowup(std::span<const double> t, std::span<const double> sup_R,
                     FitWindow window) {
  if (t.size() != sup_R.size())
    throw ContractViolation("fit_blowup: series lengths differ");
  std::vector<double> ts, rs;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= window.t_lo - 1e-15 && t[i] <= window.t_hi + 1e-15) {
      ts.push_back(t[i]);
      rs.push_back(sup_R[i]);
    }
  if (ts.size() < 8)
    throw ContractViolation("fit_blowup: need >= 8 samples in the window");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(rs[i] > 0.0))
      throw ContractViolation("fit_blowup: series must be strictly positive");
    if (i > 0 && !(rs[i] > rs[i - 1]))
      throw ContractViolation("fit_blowup: series must be strictly increasing");
    if (i > 0 && !(ts[i] > ts[i - 1]))
      throw ContractViolation("fit_blowup: times must be strictly increasing");
  }
  const double t_last = ts.back();
  const double span = t_last - ts.front();

  // Reciprocal-slope initialization: 1/R is ~linear in t for k = 1 and hits
  // zero at T.
  double tau0 = span;
  {
    const std::size_t m = std::min<std::size_t>(8, ts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = ts.size() - m; i < ts.size(); ++i) {
      const double x = ts[i], y = 1.0 / rs[i];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double mm = static_cast<double>(m);
    const double slope = (mm * sxy - sx * sy) / (mm * sxx - sx * sx);
    const double b = (sy - slope * sx) / mm;
    if (slope < 0.0) {
      const double root = -b / slope;
      if (root > t_last) tau0 = root - t_last;
    }
  }

  std::vector<double> y(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) y[i] = std::log(rs[i]);
  auto rss_at = [&](double tau) {
    std::vector<double> x(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) x[i] = std::log(t_last + tau - ts[i]);
    return solve_linear(x, y).rss;
  };

  // Coarse scan in log tau, then golden-section refinement.
  const double lo = std::log(std::max(1e-13, 1e-6 * tau0));
  const double hi = std::log(1e3 * tau0 + span);
  const int scan = 400;
  double best_u = lo, best_r = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= scan; ++s) {
    const double u = lo + (hi - lo) * s / scan;
    const double r = rss_at(std::exp(u));
    if (r < best_r) {
      best_r = r;
      best_u = u;
    }
  }
  double a = best_u - (hi - lo) / scan;
  double b = best_u + (hi - lo) / scan;
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = rss_at(std::exp(c));
  double fd = rss_at(std::exp(d));
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = rss_at(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = rss_at(std::exp(d));
    }
  }
  const double tau = std::exp(0.5 * (a + b));

  std::vector<double> x(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) x[i] = std::log(t_last + tau - ts[i]);
  const LinearFit lf = solve_linear(x, y);

  BlowupFit fit;
  fit.T_fit = t_last + tau;
  fit.exponent = lf.k;
  fit.constant = std::exp(lf.log_c);
  fit.rms_residual = std::sqrt(lf.rss / static_cast<double>(ts.size()));
  fit.t_lo = ts.front();
  fit.t_hi = t_last;
  fit.low_confidence = fit.rms_residual > 0.02;
  return fit;
}

const char* blowup_type_label(const BlowupFit& fit) {
  return (fit.exponent >= 0.8 && fit.exponent <= 1.2) ? "Type I" : "undetermined";
}

std::vector<double> scalar_evolution_residual(const Trajectory& tr) {
  if (tr.checkpoints.size() < 3)
    throw ContractViolation("scalar_evolution_residual: need >= 3 checkpoints");
  if (!tr.torus_ctx)
    throw ContractViolation("scalar_evolution_residual: torus trajectories only");
  const auto& cks = tr.checkpoints;
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < cks.size(); ++i) {
    const HermitianGrid g = checkpoint_metric(tr, i);
    const HermitianGrid ric = ricci_logdet(g);
    ScalarGrid R(tr.torus_ctx->grid);
    R.v = cks[i].scalar_R;
    const ScalarGrid lap = laplacian(g, R);
    const ScalarGrid nrm = ric_norm_sq(g, ric);

    // dR/dt: 4th-order five-point difference (central where possible, offset
    // at the window edges) on uniform checkpoint spacing; 3-point fallback
    // when the spacing is irregular.
    auto uniform_window = [&](std::size_t lo) {
      const double d0 = cks[lo + 1].t - cks[lo].t;
      for (int s = 1; s < 4; ++s) {
        const double d = cks[lo + s + 1].t - cks[lo + s].t;
        if (std::abs(d - d0) > 1e-9 * d0) return false;
      }
      return true;
    };
    const double hp = cks[i + 1].t - cks[i].t;
    const double hm = cks[i].t - cks[i - 1].t;
    std::size_t lo = 0;
    bool five = false;
    if (cks.size() >= 5) {
      if (i >= 2 && i + 2 < cks.size())
        lo = i - 2;
      else if (i == 1)
        lo = 0;
      else
        lo = cks.size() - 5;
      five = uniform_window(lo);
    }
    double sup = 0.0;
    if (five) {
      // Weights for f'(x_j) on the 5-point uniform window, j = i - lo.
      static const double w[5][5] = {
          {-25, 48, -36, 16, -3}, {-3, -10, 18, -6, 1}, {1, -8, 0, 8, -1},
          {-1, 6, -18, 10, 3},    {3, -16, 36, -48, 25}};
      const int j = static_cast<int>(i - lo);
      const double inv12h = 1.0 / (12.0 * (cks[lo + 1].t - cks[lo].t));
      for (std::size_t p = 0; p < R.v.size(); ++p) {
        double fd = 0.0;
        for (int s = 0; s < 5; ++s) fd += w[j][s] * cks[lo + s].scalar_R[p];
        const double dRdt = fd * inv12h;
        sup = std::max(sup, std::abs(dRdt - lap.v[p] - nrm.v[p]));
      }
    } else {
      const double denom = hm * hp * (hm + hp);
      for (std::size_t p = 0; p < R.v.size(); ++p) {
        const double dRdt = (hm * hm * cks[i + 1].scalar_R[p] +
                             (hp * hp - hm * hm) * cks[i].scalar_R[p] -
                             hp * hp * cks[i - 1].scalar_R[p]) /
                            denom;
        sup = std::max(sup, std::abs(dRdt - lap.v[p] - nrm.v[p]));
      }
    }
    out.push_back(sup);
  }
  return out;
}

double default_C_tilde(const Trajectory& tr) {
  double c_r = 0.0, base = 0.0;
  for (const auto& r : tr.rows)
    c_r = std::max(c_r, std::max(std::abs(r.sup_R), std::abs(r.inf_R)));
  if (!tr.rows.empty() && std::isfinite(tr.rows.front().sup_abs_phidot))
    base = tr.rows.front().sup_abs_phidot;
  const double t_end = tr.rows.empty() ? 0.0 : tr.rows.back().t;
  return 2.0 + (base + c_r * t_end) * t_end;
}

QDiagnostics q_diagnostics(const Trajectory& tr, double C_tilde, double B) {
  if (tr.formulation == Formulation::tensor)
    throw ContractViolation("q_diagnostics: needs a potential or closed-form trajectory");
  QDiagnostics out;
  const int n = tr.torus_ctx ? tr.torus_ctx->grid.n() : tr.hopf_ctx->model.n;

  for (std::size_t ci = 0; ci < tr.checkpoints.size(); ++ci) {
    const auto& c = tr.checkpoints[ci];
    double q1_min = std::numeric_limits<double>::infinity();
    double q1_max = -q1_min;
    double q2_min = q1_min, q2_max = -q1_min;

    if (tr.torus_ctx) {
      const HermitianGrid g = checkpoint_metric(tr, ci);
      const HermitianGrid& g0 = tr.torus_ctx->g0;
      const int dim = g.n;
      Eigen::MatrixXcd inv(dim, dim);
      for (std::size_t p = 0; p < c.phi.size(); ++p) {
        const double phi = c.phi[p];
        if (phi + C_tilde < 1.0)
          throw ConfigError("q_diagnostics: phi + C~ < 1; raise C~");
        const double q1 = c.t * c.phi_dot[p] - phi - n * c.t;
        // tr_{g0} g = g0^{i jbar} g_{i jbar}
        Eigen::MatrixXcd g0m(dim, dim), gm(dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            g0m(i, j) = g0.at(p, i, j);
            gm(i, j) = g.at(p, i, j);
          }
        const double trg = (g0m.inverse() * gm).trace().real();
        const double q2 = std::log(trg) - phi + 1.0 / (phi + C_tilde) + B * q1;
        q1_min = std::min(q1_min, q1);
        q1_max = std::max(q1_max, q1);
        q2_min = std::min(q2_min, q2);
        q2_max = std::max(q2_max, q2);
      }
    } else {
      const double phi = c.phi.at(0);
      if (phi + C_tilde < 1.0)
        throw ConfigError("q_diagnostics: phi + C~ < 1; raise C~");
      const double q1 = c.t * c.phi_dot.at(0) - phi - n * c.t;
      const MetricField gt = hopf_exact_flow(tr.hopf_ctx->model, c.t);
      const MetricField g0 = hopf_metric(tr.hopf_ctx->model);
      for (const auto& p : tr.hopf_ctx->samples) {
        const double trg =
            (g0.value(p).inverse() * gt.value(p)).trace().real();
        const double q2 = std::log(trg) - phi + 1.0 / (phi + C_tilde) + B * q1;
        q2_min = std::min(q2_min, q2);
        q2_max = std::max(q2_max, q2);
      }
      q1_min = q1_max = q1;
    }
    out.t.push_back(c.t);
    out.q1_min.push_back(q1_min);
    out.q1_max.push_back(q1_max);
    out.q2_min.push_back(q2_min);
    out.q2_max.push_back(q2_max);
  }
  return out;
}

double maximal_time_proxy(std::span<const HermitianMatrix> omega0,
                          std::span<const HermitianMatrix> ric0) {
  if (omega0.size() != ric0.size() || omega0.empty())
    throw ContractViolation("maximal_time_proxy: matching nonempty point sets required");
  auto margin = [&](double t) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < omega0.size(); ++p) {
      const Eigen::MatrixXcd a = omega0[p].mat() - t * ric0[p].mat();
      m = std::min(m, min_eig_hermitian(a));
    }
    return m;
  };
  if (!(margin(0.0) > 0.0))
    throw ContractViolation("maximal_time_proxy: omega0 not positive");

  // ric0 <= 0 everywhere: alpha_t only grows; report the +inf sentinel.
  bool ric_nonpositive = true;
  for (const auto& r : ric0)
    if (-min_eig_hermitian(-r.mat()) > 1e-14) {  // max eigenvalue > 0
      ric_nonpositive = false;
      break;
    }
  if (ric_nonpositive) return kInfiniteTime;

  double hi = 1.0;
  while (margin(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) return kInfiniteTime;
  }
  double lo = 0.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (margin(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::size_t LocusMask::count() const {
  std::size_t c = 0;
  for (const auto m : mask) c += m ? 1 : 0;
  return c;
}

LocusMask singular_locus(const Trajectory& tr, double threshold) {
  if (tr.checkpoints.empty())
    throw ContractViolation("singular_locus: trajectory has no checkpoints");
  const std::vector<double>& r0 = tr.checkpoints.front().scalar_R;
  double sup0 = 0.0;
  for (const double v : r0) sup0 = std::max(sup0, std::abs(v));
  if (threshold <= sup0)
    throw ContractViolation("singular_locus: threshold below sup |R(0)|");

  LocusMask out;
  out.threshold = threshold;
  if (tr.torus_ctx) {
    out.N = tr.torus_ctx->grid.N();
    out.axes = tr.torus_ctx->grid.axes();
  }
  const std::size_t pts = r0.size();
  out.mask.assign(pts, 0);
  out.first_exceedance.assign(pts, std::numeric_limits<double>::quiet_NaN());
  for (const auto& c : tr.checkpoints) {
    for (std::size_t p = 0; p < pts; ++p) {
      if (out.mask[p]) continue;
      if (std::abs(c.scalar_R[p]) > threshold) {
        out.mask[p] = 1;
        out.first_exceedance[p] = c.t;
      }
    }
  }
  return out;
}

namespace {
void append_kv(std::string& out, const char* key, double v) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
  out += buf;
}
}  // namespace

std::string serialize_fit_report(const BlowupFit& fit) {
  std::string out;
  append_kv(out, "T_fit", fit.T_fit);
  append_kv(out, "exponent", fit.exponent);
  append_kv(out, "constant", fit.constant);
  append_kv(out, "rms_residual", fit.rms_residual);
  append_kv(out, "window_lo", fit.t_lo);
  append_kv(out, "window_hi", fit.t_hi);
  out += std::string("confidence = ") + (fit.low_confidence ? "low" : "high") + "\n";
  out += std::string("type = ") + blowup_type_label(fit) + "\n";
  return out;
}

std::string serialize_locus(const LocusMask& mask) {
  std::string out;
  append_kv(out, "threshold", mask.threshold);
  out += "points = " + std::to_string(mask.mask.size()) + "\n";
  out += "marked = " + std::to_string(mask.count()) + "\n";
  out += "N = " + std::to_string(mask.N) + "\n";
  out += "axes = " + std::to_string(mask.axes) + "\n";
  out += "bitmap =\n";
  // Rows of the two fastest axes (or one flat row for sample sets).
  const std::size_t row =
      (mask.N > 0) ? static_cast<std::size_t>(mask.N) : mask.mask.size();
  for (std::size_t p = 0; p < mask.mask.size(); ++p) {
    out += mask.mask[p] ? '1' : '0';
    if ((p + 1) % row == 0) out += '\n';
  }
  if (mask.mask.size() % row != 0) out += '\n';
  return out;
}

}  // namespace crflow

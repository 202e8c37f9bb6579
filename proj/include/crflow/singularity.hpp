#pragma once

#include <span>
#include <string>
#include <vector>

#include "crflow/flow.hpp"

namespace crflow {

/// (t, sup R, inf R) extracted from a trajectory, with the start of the
/// longest strictly-increasing sup-R suffix flagged.
struct SupSeries {
  std::vector<double> t;
  std::vector<double> sup_R;
  std::vector<double> inf_R;
  std::size_t monotone_tail_start = 0;
};

SupSeries sup_scalar_series(const Trajectory& tr);

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Least-squares fit of log sup_R = log C - k log(T_fit - t) over the window.
/// T_fit is found by a 1-d search seeded by reciprocal-slope extrapolation;
/// (log C, k) is a linear solve at fixed T_fit.
struct BlowupFit {
  double T_fit = 0.0;
  double exponent = 0.0;  // k
  double constant = 0.0;  // C
  double rms_residual = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  bool low_confidence = false;
};

BlowupFit fit_blowup(std::span<const double> t, std::span<const double> sup_R,
                     FitWindow window);

/// Classification band for the fitted exponent: k in [0.8, 1.2] reads "Type I".
const char* blowup_type_label(const BlowupFit& fit);

/// Sup over the grid of |dR/dt - Lap R - |Ric|^2| per interior checkpoint.
std::vector<double> scalar_evolution_residual(const Trajectory& tr);

struct QDiagnostics {
  std::vector<double> t;
  std::vector<double> q1_min, q1_max;
  std::vector<double> q2_min, q2_max;
};

/// Q1 = t phi_dot - phi - n t and Q2 = log tr_{g0} g - phi + 1/(phi + C~) + B Q1
/// per checkpoint. Requires phi + C~ >= 1 over the run.
QDiagnostics q_diagnostics(const Trajectory& tr, double C_tilde, double B);

/// Default C~ = 2 + projected sup|phi| from the determinant bound.
double default_C_tilde(const Trajectory& tr);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Largest t with g0 - t ric0 pointwise positive (bisection to 1e-10), a
/// lower-bound proxy for the maximal existence time (psi = 0). Returns
/// kInfiniteTime when ric0 <= 0 everywhere.
double maximal_time_proxy(std::span<const HermitianMatrix> omega0,
                          std::span<const HermitianMatrix> ric0);

struct LocusMask {
  double threshold = 0.0;
  int N = 0;     // torus lattice size (0 for closed-form sample sets)
  int axes = 0;  // 2n for torus grids
  std::vector<std::uint8_t> mask;
  std::vector<double> first_exceedance;  // NaN where |R| never exceeded
  std::size_t count() const;
};

/// Marks points whose running max |R| exceeded the threshold before
/// termination, with first-exceedance times.
LocusMask singular_locus(const Trajectory& tr, double threshold);

std::string serialize_fit_report(const BlowupFit& fit);
std::string serialize_locus(const LocusMask& mask);

}  // namespace crflow

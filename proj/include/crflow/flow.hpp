#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crflow/grid.hpp"
#include "crflow/models.hpp"
#include "crflow/rng.hpp"

namespace crflow {

enum class Formulation { tensor, potential, closed_form };
enum class Termination { reached_t_end, positivity_loss, step_underflow };

const char* to_string(Formulation f);
const char* to_string(Termination t);

/// One diagnostics record. Columns (in order) match the CSV schema exactly.
struct DiagnosticsRow {
  double t = 0.0;
  double sup_R = 0.0;
  double inf_R = 0.0;
  double sup_ric_norm_sq = 0.0;
  double min_eig = 0.0;
  double sup_abs_phi = 0.0;     // NaN for tensor runs
  double sup_abs_phidot = 0.0;  // = sup |theta|
  double q1_min = 0.0;          // NaN for tensor runs
  double q1_max = 0.0;
  double volume = 0.0;
  double dbar_residual = 0.0;
  double gauduchon_residual = 0.0;
};

inline constexpr const char* kDiagnosticsColumns =
    "t,sup_R,inf_R,sup_ric_norm_sq,min_eig,sup_abs_phi,sup_abs_phidot,"
    "q1_min,q1_max,volume,dbar_residual,gauduchon_residual";

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);

// ---------------------------------------------------------------------------
// Torus grid flow

/// Frozen reference data of a torus run: initial metric, its log determinant
/// and its Ricci form (determinant route), from which alpha_t = g0 - t Ric0
/// is assembled.
struct TorusFlowContext {
  TorusModel model;
  PeriodicGrid grid;
  HermitianGrid g0;
  ScalarGrid logdet_g0;
  HermitianGrid ric0;
  double sym_tol = 0.0;  // Hermiticity tolerance for the trace-route Ricci
};

TorusFlowContext make_torus_context(const TorusModel& model, int N);

struct TensorState {
  double t = 0.0;
  HermitianGrid g;
};

struct PotentialState {
  double t = 0.0;
  ScalarGrid phi;
  ScalarGrid phi_dot;  // theta(t), refreshed after each step
};

/// Flow right-hand sides. The tensor route drives the metric with the
/// connection-trace Ricci; the potential route is determinant-based, so the
/// two formulations discretize space independently.
HermitianGrid tensor_rhs(const TorusFlowContext& ctx, const HermitianGrid& g);
ScalarGrid potential_rhs(const TorusFlowContext& ctx, double t, const ScalarGrid& phi);

HermitianGrid assemble_alpha(const TorusFlowContext& ctx, double t);
HermitianGrid reconstruct_metric(const TorusFlowContext& ctx, double t,
                                 const ScalarGrid& phi);

/// One classical 4-stage explicit step. Throws PositivityLossError when any
/// stage metric fails positivity. Output metric is symmetrized.
TensorState tensor_step(const TorusFlowContext& ctx, const TensorState& s, double dt);
PotentialState potential_step(const TorusFlowContext& ctx, const PotentialState& s,
                              double dt);

// ---------------------------------------------------------------------------
// Hopf closed-form flow (analytic stepping of the exact family; no PDE grid)

struct HopfFlowContext {
  HopfModel model;
  std::vector<ComplexPoint> samples;  // diagnostics sample set, seeded draw
};

HopfFlowContext make_hopf_context(const HopfModel& model, int num_samples,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trajectories

struct CheckpointData {
  double t = 0.0;
  std::vector<cplx> metric;       // tensor: point-major n*n entries per point
  std::vector<double> phi;        // potential: grid values; closed form: size 1
  std::vector<double> phi_dot;
  std::vector<double> scalar_R;   // R per grid point / per Hopf sample
};

struct Trajectory {
  Formulation formulation = Formulation::tensor;
  Termination termination = Termination::reached_t_end;
  std::string label;  // "curvature_blowup" | "resolution_failure" | ""
  double t_final = 0.0;
  double sup_R_overall = 0.0;
  double min_eig_overall = 0.0;
  bool entered_abort_band = false;  // any adaptive halving triggered
  bool determinant_bound_ok = true;
  std::vector<DiagnosticsRow> rows;
  std::vector<CheckpointData> checkpoints;
  std::shared_ptr<const TorusFlowContext> torus_ctx;  // set for torus runs
  std::shared_ptr<const HopfFlowContext> hopf_ctx;    // set for closed-form runs
};

struct RunConfig;  // see config.hpp

/// Integrates until t_end or positivity loss, with adaptive step halving when
/// the positivity margin shrinks too fast, and labels step-underflow
/// terminations by the growth of the sup-R tail.
Trajectory run_flow(const RunConfig& config);

/// Sup-norm deviation of the reconstructed metrics of two trajectories of the
/// same model/grid at matching checkpoint times.
struct DeviationReport {
  std::vector<double> t;
  std::vector<double> deviation;
  double max_deviation = 0.0;
};

DeviationReport cross_validate(const Trajectory& a, const Trajectory& b);

/// Per-interval sup residual of d(phi_dot)/dt + R at interior checkpoints.
std::vector<double> phi_dot_identity_residual(const Trajectory& tr);

/// Metric grid at checkpoint `idx` (tensor: stored; potential: alpha_t + ddbar phi).
HermitianGrid checkpoint_metric(const Trajectory& tr, std::size_t idx);

}  // namespace crflow

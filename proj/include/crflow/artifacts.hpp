#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "crflow/config.hpp"
#include "crflow/singularity.hpp"

namespace crflow {

/// Exit-code contract: 0 reached t_end, 2 curvature blow-up, 1 otherwise.
int exit_code_for(const Trajectory& tr);

/// Fit the monotone sup-R tail of a terminated run; nullopt when the tail is
/// too short to fit.
std::optional<BlowupFit> fit_trajectory_tail(const Trajectory& tr);

/// Writes diagnostics CSV, checkpoints, and (on blow-up) the fit report and
/// optional locus mask under cfg.output_dir. No-op when output_dir is empty.
void write_run_artifacts(const RunConfig& cfg, const Trajectory& tr,
                         const std::string& suffix = "");

/// Full `run` command: executes the configured run (both formulations when
/// requested, with cross-validation artifact), writes outputs, returns the
/// exit code.
int run_command(const RunConfig& cfg, std::ostream& log);

}  // namespace crflow

#include "crflow/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crflow/checkpoint.hpp"

namespace crflow {

int exit_code_for(const Trajectory& tr) {
  if (tr.termination == Termination::reached_t_end) return 0;
  return tr.label == "curvature_blowup" ? 2 : 1;
}

std::optional<BlowupFit> fit_trajectory_tail(const Trajectory& tr) {
  if (tr.rows.size() < 8) return std::nullopt;
  const SupSeries s = sup_scalar_series(tr);
  if (s.sup_R.size() - s.monotone_tail_start < 8) return std::nullopt;
  if (!(s.sup_R[s.monotone_tail_start] > 0.0)) return std::nullopt;
  FitWindow w{s.t[s.monotone_tail_start], s.t.back()};
  return fit_blowup(s.t, s.sup_R, w);
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for write: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace

void write_run_artifacts(const RunConfig& cfg, const Trajectory& tr,
                         const std::string& suffix) {
  if (cfg.output_dir.empty()) return;
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);

  write_text(dir / ("diagnostics" + suffix + ".csv"), diagnostics_csv(tr.rows));

  const CheckpointMeta meta = checkpoint_meta(tr);
  for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint%s_%06zu.crfc", suffix.c_str(), i);
    write_checkpoint((dir / name).string(), meta, tr.checkpoints[i]);
  }

  if (tr.label == "curvature_blowup") {
    if (const auto fit = fit_trajectory_tail(tr))
      write_text(dir / ("fit_report" + suffix + ".txt"), serialize_fit_report(*fit));
    if (cfg.locus_threshold > 0.0)
      write_text(dir / ("locus" + suffix + ".txt"),
                 serialize_locus(singular_locus(tr, cfg.locus_threshold)));
  }
}

int run_command(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();

  if (cfg.run_both) {
    RunConfig a = cfg;
    a.formulation = Formulation::tensor;
    a.run_both = false;
    RunConfig b = a;
    b.formulation = Formulation::potential;
    const Trajectory ta = run_flow(a);
    const Trajectory tb = run_flow(b);
    write_run_artifacts(cfg, ta, "_tensor");
    write_run_artifacts(cfg, tb, "_potential");
    const DeviationReport rep = cross_validate(ta, tb);
    if (!cfg.output_dir.empty()) {
      std::string txt;
      char buf[96];
      std::snprintf(buf, sizeof(buf), "max_deviation = %.17g\n", rep.max_deviation);
      txt += buf;
      for (std::size_t i = 0; i < rep.t.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", rep.t[i], rep.deviation[i]);
        txt += buf;
      }
      write_text(std::filesystem::path(cfg.output_dir) / "crossval.csv", txt);
    }
    if (!cfg.quiet)
      log << "formulations " << to_string(ta.termination) << "/"
          << to_string(tb.termination) << ", max deviation " << rep.max_deviation
          << "\n";
    return std::max(exit_code_for(ta), exit_code_for(tb));
  }

  const Trajectory tr = run_flow(cfg);
  write_run_artifacts(cfg, tr, "");
  if (!cfg.quiet) {
    log << to_string(tr.termination);
    if (!tr.label.empty()) log << " (" << tr.label << ")";
    log << " at t = " << tr.t_final << ", sup R = " << tr.sup_R_overall << "\n";
    if (tr.label == "curvature_blowup") {
      if (const auto fit = fit_trajectory_tail(tr))
        log << "T_fit = " << fit->T_fit << ", exponent = " << fit->exponent
            << ", constant = " << fit->constant << " (" << blowup_type_label(*fit)
            << ")\n";
    }
  }
  return exit_code_for(tr);
}

}  // namespace crflow

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crflow/artifacts.hpp"
#include "crflow/verify.hpp"

namespace {

int cmd_fit(const std::string& csv_path, const std::string& window,
            const std::string& output_dir, bool quiet) {
  using namespace crflow;
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "fit: cannot open " << csv_path << "\n";
    return 1;
  }
  std::vector<double> t, sup;
  std::string line;
  bool header_checked = false;
  int t_col = 0, sup_col = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      parts.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!header_checked) {
      header_checked = true;
      bool is_header = false;
      for (std::size_t c = 0; c < parts.size(); ++c) {
        if (parts[c] == "t") {
          t_col = static_cast<int>(c);
          is_header = true;
        }
        if (parts[c] == "sup_R") {
          sup_col = static_cast<int>(c);
          is_header = true;
        }
      }
      if (is_header) continue;
    }
    try {
      if (static_cast<int>(parts.size()) <= std::max(t_col, sup_col))
        throw std::invalid_argument("short row");
      t.push_back(std::stod(parts[static_cast<std::size_t>(t_col)]));
      sup.push_back(std::stod(parts[static_cast<std::size_t>(sup_col)]));
    } catch (const std::exception&) {
      std::cerr << "fit: malformed CSV row: " << line << "\n";
      return 1;
    }
  }
  if (t.size() < 2) {
    std::cerr << "fit: need a (t, sup_R) series\n";
    return 1;
  }

  FitWindow w{t.front(), t.back()};
  if (!window.empty()) {
    const auto colon = window.find(':');
    if (colon == std::string::npos) {
      std::cerr << "fit: --window expects t_lo:t_hi\n";
      return 1;
    }
    try {
      w.t_lo = std::stod(window.substr(0, colon));
      w.t_hi = std::stod(window.substr(colon + 1));
    } catch (const std::exception&) {
      std::cerr << "fit: --window expects numbers t_lo:t_hi\n";
      return 1;
    }
  }

  try {
    const BlowupFit fit = fit_blowup(t, sup, w);
    const std::string report = serialize_fit_report(fit);
    if (!quiet) std::cout << report;
    if (!output_dir.empty()) {
      std::filesystem::create_directories(output_dir);
      std::ofstream out(std::filesystem::path(output_dir) / "fit_report.txt");
      out << report;
    }
    return fit.low_confidence ? 1 : 0;
  } catch (const ContractViolation& e) {
    std::cerr << "fit: contract violation: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Chern-Ricci flow engine: curvature kernels, torus/Hopf flows, "
      "blow-up analysis. CRFLOW_THREADS selects the worker count for "
      "point-parallel kernels."};
  app.require_subcommand(1);

  std::string config_path, builtin, output_dir, window, suite, csv_path;
  int checkpoint_every = 0;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "integrate a flow from a config file");
  run->add_option("config", config_path, "flat key/value config file");
  run->add_option("--builtin", builtin, "builtin scenario name instead of a file");
  run->add_option("--output-dir", output_dir, "artifact directory");
  run->add_option("--checkpoint-every", checkpoint_every, "steps between checkpoints");
  run->add_flag("--quiet", quiet, "suppress the summary line");

  CLI::App* verify = app.add_subcommand("verify", "run a named property suite");
  verify->add_option("suite", suite, "kernel | hopf | equivalence | lemma")->required();
  verify->add_flag("--quiet", quiet, "suppress per-check lines");

  CLI::App* fit = app.add_subcommand("fit", "fit a blow-up law to a sup-R series");
  fit->add_option("csv", csv_path, "CSV with t and sup_R columns")->required();
  fit->add_option("--window", window, "fit window t_lo:t_hi");
  fit->add_option("--output-dir", output_dir, "artifact directory");
  fit->add_flag("--quiet", quiet, "suppress the report");

  CLI11_PARSE(app, argc, argv);
  std::cout.precision(17);

  try {
    if (run->parsed()) {
      if (config_path.empty() == builtin.empty()) {
        std::cerr << "run: provide exactly one of <config> or --builtin\n";
        return 1;
      }
      crflow::RunConfig cfg = config_path.empty()
                                  ? crflow::builtin_scenario(builtin)
                                  : crflow::parse_config_file(config_path);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      if (checkpoint_every > 0) cfg.checkpoint_every = checkpoint_every;
      if (quiet) cfg.quiet = true;
      return crflow::run_command(cfg, std::cout);
    }
    if (verify->parsed()) {
      const auto checks = crflow::run_verify_suite(suite);
      if (!quiet) std::cout << crflow::format_checks(checks);
      if (!crflow::all_passed(checks)) {
        for (const auto& c : checks)
          if (!c.passed) std::cerr << "verify: FAILED " << c.name << "\n";
        return 1;
      }
      return 0;
    }
    if (fit->parsed()) return cmd_fit(csv_path, window, output_dir, quiet);
  } catch (const crflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const crflow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

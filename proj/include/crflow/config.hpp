#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crflow/flow.hpp"

namespace crflow {

/// A run described by a flat key/value config (dotted sections). See
/// configs/*.cfg for examples of the on-disk format.
struct RunConfig {
  enum class ModelKind { hopf, torus };

  // model
  ModelKind model_kind = ModelKind::torus;
  int n = 1;
  double alpha_modulus = 2.0;          // hopf: |alpha|
  int N = 32;                          // torus: lattice points per real axis
  std::vector<double> periods;         // torus: defaults to 2*pi per coordinate
  std::vector<CosineEntry> entries;    // torus perturbation, entry cosines
  std::vector<TrigTerm> potential;     // torus perturbation, ddbar-potential

  // flow
  Formulation formulation = Formulation::tensor;
  bool run_both = false;  // torus only: tensor + potential with cross-validation
  double dt0 = 1e-3;
  double dt_min = 1e-9;
  double t_end = 0.2;
  int checkpoint_every = 5;
  std::uint64_t seed = 1;
  int hopf_samples = 64;

  // tolerances
  double positivity_tol = 1e-12;  // flag threshold for the positivity margin

  // outputs
  std::string output_dir;
  double locus_threshold = 0.0;  // > 0: emit the singular-locus mask on blow-up
  bool quiet = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  TorusModel torus_model() const;
  HopfModel hopf_model() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// The canonical scenario suite: flat torus, three perturbed tori, Hopf n=2,3.
std::vector<std::pair<std::string, RunConfig>> builtin_scenarios();
RunConfig builtin_scenario(const std::string& name);

}  // namespace crflow

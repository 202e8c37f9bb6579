#pragma once

#include <stdexcept>
#include <string>

namespace crflow {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Metric matrix is singular or fails positivity where positivity is required.
struct SingularMetricError : Error {
  using Error::Error;
};

/// Point (or a stencil footprint around it) lies outside the field's domain.
struct DomainError : Error {
  using Error::Error;
};

/// Caller violated a documented precondition.
struct ContractViolation : Error {
  using Error::Error;
};

/// Invalid run configuration; the message names the offending field.
struct ConfigError : Error {
  using Error::Error;
};

/// Model construction failed (e.g. a perturbation breaks positivity).
struct ConstructionError : Error {
  using Error::Error;
};

/// Raised while stepping when a metric loses positivity. Carries the offending
/// sample so the integrator can report (point, min eigenvalue).
struct PositivityLossError : Error {
  PositivityLossError(std::size_t point_index, double min_eigenvalue)
      : Error("positivity lost at point " + std::to_string(point_index) +
              " (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        point_index(point_index),
        min_eigenvalue(min_eigenvalue) {}
  std::size_t point_index;
  double min_eigenvalue;
};

}  // namespace crflow

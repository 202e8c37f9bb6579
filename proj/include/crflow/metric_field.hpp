#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <utility>

#include "crflow/domain.hpp"
#include "crflow/stencil.hpp"

namespace crflow {

enum class DerivativeMode { closed_form, stencil };

/// A Hermitian metric as a callable on complex coordinates.
///
/// Closed-form fields carry analytic first and mixed-second derivatives of the
/// entry matrix; everything downstream (connection, curvature, Ricci) is then
/// exact. Stencil fields differentiate the evaluator with 4th-order central
/// Wirtinger stencils of step h (optionally Richardson-extrapolated), meshfree:
/// the footprint is evaluated at arbitrary points of the domain.
class MetricField {
 public:
  using Evaluator = std::function<Eigen::MatrixXcd(const ComplexPoint&)>;
  using FirstDeriv = std::function<Eigen::MatrixXcd(const ComplexPoint&, int)>;
  using MixedDeriv = std::function<Eigen::MatrixXcd(const ComplexPoint&, int, int)>;

  static MetricField closed_form(Domain domain, Evaluator eval, FirstDeriv d1,
                                 MixedDeriv d11) {
    MetricField f;
    f.domain_ = std::move(domain);
    f.eval_ = std::move(eval);
    f.d1_ = std::move(d1);
    f.d11_ = std::move(d11);
    f.mode_ = DerivativeMode::closed_form;
    return f;
  }

  static MetricField with_stencil(Domain domain, Evaluator eval, double h,
                                  bool richardson = false) {
    if (!(h > 0.0)) throw ContractViolation("stencil step h must be positive");
    MetricField f;
    f.domain_ = std::move(domain);
    f.eval_ = std::move(eval);
    f.mode_ = DerivativeMode::stencil;
    f.h_ = h;
    f.richardson_ = richardson;
    return f;
  }

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_dim(domain_); }
  DerivativeMode mode() const { return mode_; }
  double stencil_h() const { return h_; }
  bool richardson() const { return richardson_; }

  /// Stencil reach in real coordinates (0 for closed form); used for domain
  /// checks and symmetry tolerances.
  double reach() const {
    return mode_ == DerivativeMode::stencil ? 2.0 * h_ : 0.0;
  }

  Eigen::MatrixXcd value(const ComplexPoint& p) const {
    check_in_domain(domain_, p);
    return eval_(p);
  }

  /// d_i g (entry-wise holomorphic derivative).
  Eigen::MatrixXcd d1(const ComplexPoint& p, int i) const {
    check_in_domain(domain_, p, reach());
    if (mode_ == DerivativeMode::closed_form) return d1_(p, i);
    auto eval = [this, &p, i](double hh) {
      return stencil::wirtinger_d(eval_, p, i, hh);
    };
    return richardson_ ? stencil::richardson(eval, h_) : eval(h_);
  }

  /// d_jbar g; by Hermiticity the adjoint of d_j g.
  Eigen::MatrixXcd d1bar(const ComplexPoint& p, int j) const {
    return d1(p, j).adjoint();
  }

  /// d_i d_jbar g.
  Eigen::MatrixXcd d11(const ComplexPoint& p, int i, int j) const {
    check_in_domain(domain_, p, reach());
    if (mode_ == DerivativeMode::closed_form) return d11_(p, i, j);
    auto eval = [this, &p, i, j](double hh) {
      return stencil::wirtinger_dd(eval_, p, i, j, hh);
    };
    return richardson_ ? stencil::richardson(eval, h_) : eval(h_);
  }

  /// Hermiticity tolerance appropriate to the derivative mode, relative to a
  /// unit scale (callers multiply by 1 + max entry). Stencil mode adds the
  /// eps/h^2 rounding floor of second-derivative stencils.
  double symmetry_tol() const {
    if (mode_ == DerivativeMode::closed_form) return 1e-10;
    const double h_eff = richardson_ ? 0.5 * h_ : h_;
    return 100.0 * h_ * h_ * h_ * h_ + 2e-14 / (h_eff * h_eff);
  }

  /// Same field with stencil differentiation swapped in (for cross-checks).
  MetricField restenciled(double h, bool richardson = false) const {
    return with_stencil(domain_, eval_, h, richardson);
  }

 private:
  MetricField() = default;
  Domain domain_;
  Evaluator eval_;
  FirstDeriv d1_;
  MixedDeriv d11_;
  DerivativeMode mode_ = DerivativeMode::closed_form;
  double h_ = 0.0;
  bool richardson_ = false;
};

}  // namespace crflow

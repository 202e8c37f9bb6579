#pragma once

#include <array>

#include "crflow/point.hpp"

namespace crflow {
namespace stencil {

// 4th-order central coefficients. First derivative uses the 4-point
// antisymmetric stencil, second derivative the 5-point symmetric one.
inline constexpr std::array<int, 4> kD1Offsets{-2, -1, 1, 2};
inline constexpr std::array<double, 4> kD1Weights{1.0 / 12.0, -8.0 / 12.0,
                                                  8.0 / 12.0, -1.0 / 12.0};
inline constexpr std::array<int, 5> kD2Offsets{-2, -1, 0, 1, 2};
inline constexpr std::array<double, 5> kD2Weights{-1.0 / 12.0, 16.0 / 12.0,
                                                  -30.0 / 12.0, 16.0 / 12.0,
                                                  -1.0 / 12.0};

/// d/dx_axis f at p, error O(h^4).
template <class F>
auto d_real(const F& f, const ComplexPoint& p, int axis, double h)
    -> decltype(f(p)) {
  using T = decltype(f(p));
  T acc = kD1Weights[0] * f(p.shifted(axis, kD1Offsets[0] * h));
  for (std::size_t s = 1; s < kD1Offsets.size(); ++s)
    acc = acc + kD1Weights[s] * f(p.shifted(axis, kD1Offsets[s] * h));
  return (1.0 / h) * acc;
}

/// d^2/dx_axis^2 f at p, error O(h^4).
template <class F>
auto d2_real(const F& f, const ComplexPoint& p, int axis, double h)
    -> decltype(f(p)) {
  using T = decltype(f(p));
  T acc = kD2Weights[0] * f(p.shifted(axis, kD2Offsets[0] * h));
  for (std::size_t s = 1; s < kD2Offsets.size(); ++s)
    acc = acc + kD2Weights[s] * f(p.shifted(axis, kD2Offsets[s] * h));
  return (1.0 / (h * h)) * acc;
}

/// d^2/(dx_a dx_b) f at p for a != b, via the 4x4 cross stencil.
template <class F>
auto cross_real(const F& f, const ComplexPoint& p, int axis_a, int axis_b,
                double h) -> decltype(f(p)) {
  using T = decltype(f(p));
  bool first = true;
  T acc{};
  for (std::size_t sa = 0; sa < kD1Offsets.size(); ++sa) {
    const ComplexPoint pa = p.shifted(axis_a, kD1Offsets[sa] * h);
    for (std::size_t sb = 0; sb < kD1Offsets.size(); ++sb) {
      const double w = kD1Weights[sa] * kD1Weights[sb];
      T val = w * f(pa.shifted(axis_b, kD1Offsets[sb] * h));
      if (first) {
        acc = val;
        first = false;
      } else {
        acc = acc + val;
      }
    }
  }
  return (1.0 / (h * h)) * acc;
}

// Wirtinger operators: with z_i = x_i + i y_i,
//   d_i = (d/dx_i - i d/dy_i) / 2,   d_ibar = (d/dx_i + i d/dy_i) / 2.

/// Holomorphic derivative d_i f. The callable must return cplx or a complex
/// Eigen matrix (real-valued fields should be wrapped to return cplx).
template <class F>
auto wirtinger_d(const F& f, const ComplexPoint& p, int i, double h)
    -> decltype(f(p)) {
  using T = decltype(f(p));
  return T(0.5 * (d_real(f, p, 2 * i, h) + cplx(0, -1) * d_real(f, p, 2 * i + 1, h)));
}

template <class F>
auto wirtinger_dbar(const F& f, const ComplexPoint& p, int j, double h)
    -> decltype(f(p)) {
  using T = decltype(f(p));
  return T(0.5 * (d_real(f, p, 2 * j, h) + cplx(0, 1) * d_real(f, p, 2 * j + 1, h)));
}

/// Mixed d_i d_jbar f. The i == j case reduces to (d_xx + d_yy)/4 because the
/// discrete cross terms cancel exactly; it is special-cased to skip them.
template <class F>
auto wirtinger_dd(const F& f, const ComplexPoint& p, int i, int j, double h)
    -> decltype(f(p)) {
  using T = decltype(f(p));
  const int xi = 2 * i, yi = 2 * i + 1;
  const int xj = 2 * j, yj = 2 * j + 1;
  if (i == j)
    return T(0.25 * (d2_real(f, p, xi, h) + d2_real(f, p, yi, h)));
  const T xx = cross_real(f, p, xi, xj, h);
  const T yy = cross_real(f, p, yi, yj, h);
  const T xy = cross_real(f, p, xi, yj, h);
  const T yx = cross_real(f, p, yi, xj, h);
  return T(0.25 * (xx + yy + cplx(0, 1) * (xy + (-1.0) * yx)));
}

/// Richardson combination of a stencil evaluation at h and h/2; cancels the
/// leading h^4 error term.
template <class Eval>
auto richardson(const Eval& eval, double h) -> decltype(eval(h)) {
  return (1.0 / 15.0) * (16.0 * eval(0.5 * h) + (-1.0) * eval(h));
}

}  // namespace stencil

/// All first and mixed-second Wirtinger partials of a scalar field at a point.
struct WirtingerDerivatives {
  std::vector<cplx> d;     // d_i f
  std::vector<cplx> dbar;  // d_jbar f
  std::vector<cplx> dd;    // d_i d_jbar f, row-major (i, j); empty if order 1
};

/// Stencil evaluation of Wirtinger partials of a scalar callable, order 1 or
/// 2, error O(h^4) (O(h^6) with richardson).
template <class F>
WirtingerDerivatives wirtinger_derivatives(const F& f, const ComplexPoint& p,
                                           int order, double h,
                                           bool use_richardson = false) {
  if (order != 1 && order != 2)
    throw ContractViolation("wirtinger_derivatives: order must be 1 or 2");
  const int n = p.dim();
  WirtingerDerivatives out;
  out.d.resize(static_cast<std::size_t>(n));
  out.dbar.resize(static_cast<std::size_t>(n));
  auto eval_d = [&](int i, double hh) { return stencil::wirtinger_d(f, p, i, hh); };
  auto eval_dbar = [&](int j, double hh) { return stencil::wirtinger_dbar(f, p, j, hh); };
  for (int i = 0; i < n; ++i) {
    if (use_richardson) {
      out.d[static_cast<std::size_t>(i)] =
          stencil::richardson([&](double hh) { return eval_d(i, hh); }, h);
      out.dbar[static_cast<std::size_t>(i)] =
          stencil::richardson([&](double hh) { return eval_dbar(i, hh); }, h);
    } else {
      out.d[static_cast<std::size_t>(i)] = eval_d(i, h);
      out.dbar[static_cast<std::size_t>(i)] = eval_dbar(i, h);
    }
  }
  if (order == 2) {
    out.dd.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto eval = [&](double hh) { return stencil::wirtinger_dd(f, p, i, j, hh); };
        out.dd[static_cast<std::size_t>(i * n + j)] =
            use_richardson ? stencil::richardson(eval, h) : eval(h);
      }
  }
  return out;
}

}  // namespace crflow

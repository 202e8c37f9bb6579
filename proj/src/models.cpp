#include "crflow/models.hpp"

#include <cmath>
#include <memory>

namespace crflow {

// ---------------------------------------------------------------------------
// TrigPoly

cplx TrigTerm::eval(const ComplexPoint& p) const {
  double prod = 1.0;
  for (const auto& f : factors)
    prod *= std::cos(f.freq * p.real_coord(f.axis) + f.phase);
  return coeff * prod;
}

cplx TrigPoly::eval(const ComplexPoint& p) const {
  cplx s = 0.0;
  for (const auto& t : terms) s += t.eval(p);
  return s;
}

TrigPoly TrigPoly::dx(int axis) const {
  constexpr double kHalfPi = 1.5707963267948966192313;
  TrigPoly out;
  for (const auto& t : terms) {
    for (std::size_t f = 0; f < t.factors.size(); ++f) {
      if (t.factors[f].axis != axis) continue;
      // d/dx cos(w x + c) = w cos(w x + c + pi/2)
      TrigTerm dt = t;
      dt.coeff *= t.factors[f].freq;
      dt.factors[f].phase += kHalfPi;
      if (dt.coeff != cplx(0.0, 0.0)) out.terms.push_back(std::move(dt));
    }
  }
  return out;
}

TrigPoly TrigPoly::wirt_d(int i) const {
  return dx(2 * i).scaled(0.5) + dx(2 * i + 1).scaled(cplx(0.0, -0.5));
}

TrigPoly TrigPoly::wirt_dbar(int j) const {
  return dx(2 * j).scaled(0.5) + dx(2 * j + 1).scaled(cplx(0.0, 0.5));
}

TrigPoly TrigPoly::conjugate() const {
  TrigPoly out = *this;
  for (auto& t : out.terms) t.coeff = std::conj(t.coeff);
  return out;
}

TrigPoly TrigPoly::operator+(const TrigPoly& other) const {
  TrigPoly out = *this;
  out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
  return out;
}

TrigPoly TrigPoly::scaled(cplx s) const {
  TrigPoly out;
  if (s == cplx(0.0, 0.0)) return out;
  out = *this;
  for (auto& t : out.terms) t.coeff *= s;
  return out;
}

TrigPoly TrigPoly::constant(cplx c) {
  TrigPoly out;
  if (c != cplx(0.0, 0.0)) out.terms.push_back(TrigTerm{c, {}});
  return out;
}

// ---------------------------------------------------------------------------
// Hopf manifolds

HopfModel::HopfModel(int dim, double alpha) : n(dim), alpha_modulus(alpha) {
  if (n < 2) throw ContractViolation("HopfModel: complex dimension must be >= 2");
  if (!(alpha_modulus > 0.0) || alpha_modulus == 1.0)
    throw ContractViolation("HopfModel: |alpha| must be positive and != 1");
}

double hopf_singular_time(const HopfModel& m) { return 1.0 / m.n; }

double hopf_exact_scalar(const HopfModel& m, double t) {
  const double T = hopf_singular_time(m);
  if (t < 0.0 || t >= T)
    throw SingularTimeError("hopf_exact_scalar: t outside [0, 1/n)");
  return (m.n - 1.0) / (T - t);
}

namespace {

/// g(t)_{kl} = a delta_kl / r^2 + b zbar_k z_l / r^4 with a = 1 - n t, b = n t.
struct HopfFamily {
  int n;
  double a, b;

  Eigen::MatrixXcd value(const ComplexPoint& p) const {
    const double r2 = p.r2();
    Eigen::MatrixXcd g(n, n);
    const double inv2 = 1.0 / r2;
    const double inv4 = inv2 * inv2;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        cplx v = b * std::conj(p[k]) * p[l] * inv4;
        if (k == l) v += a * inv2;
        g(k, l) = v;
      }
    return g;
  }

  Eigen::MatrixXcd d1(const ComplexPoint& p, int i) const {
    const double r2 = p.r2();
    const double inv4 = 1.0 / (r2 * r2);
    const double inv6 = inv4 / r2;
    const cplx zbi = std::conj(p[i]);
    Eigen::MatrixXcd m(n, n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        cplx v = -2.0 * b * std::conj(p[k]) * p[l] * zbi * inv6;
        if (k == l) v += -a * zbi * inv4;
        if (i == l) v += b * std::conj(p[k]) * inv4;
        m(k, l) = v;
      }
    return m;
  }

  Eigen::MatrixXcd d11(const ComplexPoint& p, int i, int j) const {
    const double r2 = p.r2();
    const double inv4 = 1.0 / (r2 * r2);
    const double inv6 = inv4 / r2;
    const double inv8 = inv6 / r2;
    const cplx zbi = std::conj(p[i]);
    const cplx zj = p[j];
    Eigen::MatrixXcd m(n, n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const cplx zbk = std::conj(p[k]);
        const cplx zl = p[l];
        cplx v = 6.0 * b * zbi * zbk * zj * zl * inv8;
        if (k == l) v += (i == j ? -a * inv4 : cplx(0.0)) + 2.0 * a * zbi * zj * inv6;
        if (i == l) v += (j == k ? b * inv4 : cplx(0.0)) - 2.0 * b * zbk * zj * inv6;
        if (j == k) v += -2.0 * b * zbi * zl * inv6;
        if (i == j) v += -2.0 * b * zbk * zl * inv6;
        m(k, l) = v;
      }
    return m;
  }
};

MetricField hopf_family_field(const HopfModel& m, double a, double b,
                              DerivativeMode mode, double h, bool richardson) {
  const auto fam = std::make_shared<HopfFamily>(HopfFamily{m.n, a, b});
  Domain dom = HopfDomain{m.n, m.alpha_modulus};
  auto eval = [fam](const ComplexPoint& p) { return fam->value(p); };
  if (mode == DerivativeMode::stencil)
    return MetricField::with_stencil(std::move(dom), std::move(eval), h, richardson);
  return MetricField::closed_form(
      std::move(dom), std::move(eval),
      [fam](const ComplexPoint& p, int i) { return fam->d1(p, i); },
      [fam](const ComplexPoint& p, int i, int j) { return fam->d11(p, i, j); });
}

}  // namespace

MetricField hopf_metric(const HopfModel& m, DerivativeMode mode, double h,
                        bool richardson) {
  return hopf_family_field(m, 1.0, 0.0, mode, h, richardson);
}

MetricField hopf_exact_flow(const HopfModel& m, double t, DerivativeMode mode,
                            double h, bool richardson) {
  if (t < 0.0 || t >= hopf_singular_time(m))
    throw SingularTimeError("hopf_exact_flow: t outside [0, 1/n)");
  return hopf_family_field(m, 1.0 - m.n * t, m.n * t, mode, h, richardson);
}

// ---------------------------------------------------------------------------
// Tori

namespace {

std::vector<TrigPoly> build_entry_polys(int n,
                                        const std::vector<CosineEntry>& entries,
                                        const std::vector<TrigTerm>& potential) {
  std::vector<TrigPoly> polys(static_cast<std::size_t>(n) * n);
  auto at = [&](int i, int j) -> TrigPoly& {
    return polys[static_cast<std::size_t>(i) * n + j];
  };
  for (int i = 0; i < n; ++i) at(i, i) = TrigPoly::constant(1.0);

  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw ConstructionError("torus perturbation: entry index out of range");
    if (e.row == e.col && std::abs(e.coeff.imag()) > 0.0)
      throw ConstructionError("torus perturbation: diagonal entries must be real");
    TrigPoly p;
    p.terms.push_back(TrigTerm{e.coeff, e.factors});
    at(e.row, e.col) = at(e.row, e.col) + p;
    if (e.row != e.col) at(e.col, e.row) = at(e.col, e.row) + p.conjugate();
  }

  if (!potential.empty()) {
    TrigPoly u;
    u.terms = potential;
    for (const auto& t : u.terms)
      if (std::abs(t.coeff.imag()) > 0.0)
        throw ConstructionError("torus potential must be real-valued");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) at(i, j) = at(i, j) + u.wirt_d(i).wirt_dbar(j);
  }
  return polys;
}

Eigen::MatrixXcd eval_poly_matrix(const std::vector<TrigPoly>& polys, int n,
                                  const ComplexPoint& p) {
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = polys[static_cast<std::size_t>(i) * n + j].eval(p);
  return g;
}

}  // namespace

TorusModel::TorusModel(int dim, std::vector<double> periods,
                       std::vector<CosineEntry> entries,
                       std::vector<TrigTerm> potential)
    : n_(dim),
      periods_(std::move(periods)),
      entries_(std::move(entries)),
      potential_(std::move(potential)) {
  if (n_ < 1) throw ContractViolation("TorusModel: dimension must be >= 1");
  if (static_cast<int>(periods_.size()) != n_)
    throw ContractViolation("TorusModel: need one period per complex coordinate");
  for (double P : periods_)
    if (!(P > 0.0)) throw ContractViolation("TorusModel: periods must be positive");
  entry_polys_ = build_entry_polys(n_, entries_, potential_);

  // Positivity probe on a lattice.
  const int probe = 12;
  std::vector<double> x(static_cast<std::size_t>(2 * n_), 0.0);
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (int a = 0; a < 2 * n_; ++a) t *= probe;
    return t;
  }();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    std::vector<cplx> z(static_cast<std::size_t>(n_));
    for (int a = 2 * n_ - 1; a >= 0; --a) {
      x[static_cast<std::size_t>(a)] =
          periods_[static_cast<std::size_t>(a / 2)] *
          (static_cast<double>(rem % probe) / probe);
      rem /= probe;
    }
    for (int k = 0; k < n_; ++k)
      z[static_cast<std::size_t>(k)] =
          cplx(x[static_cast<std::size_t>(2 * k)], x[static_cast<std::size_t>(2 * k + 1)]);
    const ComplexPoint p{std::vector<cplx>(z)};
    if (min_eig_hermitian(eval_poly_matrix(entry_polys_, n_, p)) <= 0.0)
      throw ConstructionError("torus perturbation loses positivity on the probe lattice");
  }
}

MetricField torus_metric(const TorusModel& m, DerivativeMode mode, double h,
                         bool richardson) {
  const int n = m.n();
  Domain dom = TorusDomain{n, m.periods()};

  struct TorusData {
    int n;
    std::vector<TrigPoly> g;
    std::vector<TrigPoly> d1;   // n entries of n*n polys
    std::vector<TrigPoly> d11;  // n*n entries of n*n polys
  };
  auto data = std::make_shared<TorusData>();
  data->n = n;
  data->g = m.entry_polys();
  auto eval = [data](const ComplexPoint& p) {
    return eval_poly_matrix(data->g, data->n, p);
  };
  if (mode == DerivativeMode::stencil)
    return MetricField::with_stencil(std::move(dom), std::move(eval), h, richardson);

  data->d1.resize(static_cast<std::size_t>(n) * n * n);
  data->d11.resize(static_cast<std::size_t>(n) * n * n * n);
  for (int i = 0; i < n; ++i)
    for (std::size_t e = 0; e < data->g.size(); ++e)
      data->d1[static_cast<std::size_t>(i) * n * n + e] = data->g[e].wirt_d(i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (std::size_t e = 0; e < data->g.size(); ++e)
        data->d11[(static_cast<std::size_t>(i) * n + j) * n * n + e] =
            data->g[e].wirt_d(i).wirt_dbar(j);

  auto d1 = [data](const ComplexPoint& p, int i) {
    const int n = data->n;
    Eigen::MatrixXcd out(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out(r, c) =
            data->d1[static_cast<std::size_t>(i) * n * n + static_cast<std::size_t>(r) * n + c]
                .eval(p);
    return out;
  };
  auto d11 = [data](const ComplexPoint& p, int i, int j) {
    const int n = data->n;
    Eigen::MatrixXcd out(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        out(r, c) = data->d11[(static_cast<std::size_t>(i) * n + j) * n * n +
                              static_cast<std::size_t>(r) * n + c]
                        .eval(p);
    return out;
  };
  return MetricField::closed_form(std::move(dom), std::move(eval), std::move(d1),
                                  std::move(d11));
}

}  // namespace crflow

#pragma once

// Conductivity transmission problem with an inclusion of conductivity eps_c
// in a background eps_m:
//   u = H + S[phi],   phi = (lambda I - K*)^{-1}[dH/dnu],
//   lambda = (eps_c + eps_m) / (2 (eps_c - eps_m)).
// Layer potentials of the geometric densities have closed forms in terms of
// Faber polynomials (inside) and the Grunsky series (outside), so the field is
// evaluated without any boundary quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "npfaber/conformal_map.hpp"
#include "npfaber/density.hpp"
#include "npfaber/errors.hpp"
#include "npfaber/faber_grunsky.hpp"
#include "npfaber/np_operator.hpp"
#include "npfaber/parallel.hpp"
#include "npfaber/types.hpp"

namespace npfaber {

enum class Side { interior, exterior };

/// H = Re(p) or Im(p) for a polynomial p given by monomial coefficients.
template <typename Real>
struct BackgroundField {
  enum class Part { real, imaginary };

  std::vector<Complex<Real>> poly;
  Part part = Part::real;

  static BackgroundField x() { return {{Complex<Real>(0), Complex<Real>(1)}, Part::real}; }
  static BackgroundField y() { return {{Complex<Real>(0), Complex<Real>(1)}, Part::imaginary}; }

  int degree() const {
    int d = static_cast<int>(poly.size()) - 1;
    while (d > 0 && poly[d] == Complex<Real>(0)) --d;
    return std::max(d, 0);
  }

  Complex<Real> analytic(Complex<Real> z) const {
    Complex<Real> acc(0);
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Complex<Real> analytic_derivative(Complex<Real> z) const {
    Complex<Real> acc(0);
    for (int j = static_cast<int>(poly.size()) - 1; j >= 1; --j) acc = acc * z + Real(j) * poly[j];
    return acc;
  }

  Real select(Complex<Real> v) const { return part == Part::real ? v.real() : v.imag(); }
  Real value(Complex<Real> z) const { return select(analytic(z)); }
  /// dH/dnu for a unit normal nu given as a complex number.
  Real normal_derivative(Complex<Real> z, Complex<Real> nu) const { return select(analytic_derivative(z) * nu); }
};

using BackgroundFieldd = BackgroundField<double>;

namespace detail {

/// Shared machinery for the layer-potential series of one map, up to degree n.
///
/// Outside the curve, with w~ = w / gamma, the analytic part
///   E_m(w) = F_m(Psi(w)) / gamma^m - w~^m = sum_k c_{m,k} gamma^{-m-k} w~^{-k}
/// can be formed either from the polynomial (exact, but loses about
/// log10 |w~|^m digits to cancellation) or from the truncated Grunsky series
/// (tail of size |w~|^{-N}). Each index picks whichever error bound is smaller.
template <typename Real>
class SeriesEvaluator {
 public:
  using C = Complex<Real>;

  SeriesEvaluator(const LaurentMap<Real>& map, const GrunskyTable<Real>* table, int n)
      : map_(&map), table_(table), n_(n), scaled_(map.normalized_coeffs()), row_max_(n + 1, Real(0)) {
    if (table_ != nullptr) {
      const int rows = std::min(n_, table_->order());
      for (int m = 1; m <= rows; ++m) {
        for (int k = 1; k <= table_->order(); ++k) {
          row_max_[m] = std::max(row_max_[m], std::abs(table_->normalized(m, k)));
        }
      }
    }
  }

  int order() const { return n_; }
  const LaurentMap<Real>& map() const { return *map_; }

  /// F_m(z)/gamma^m and (optionally) F_m'(z)/gamma^{m-1}, m = 0..n.
  void faber(C z, std::vector<C>& values, std::vector<C>* derivatives = nullptr) const {
    values.assign(n_ + 1, C(0));
    if (derivatives != nullptr) {
      derivatives->assign(n_ + 1, C(0));
      normalized_faber_values<Real>(*map_, scaled_, n_, z, values, *derivatives);
    } else {
      normalized_faber_values<Real>(*map_, scaled_, n_, z, values);
    }
  }

  struct Exterior {
    std::vector<C> e;          // E_m, index m = 0..n (entry 0 unused)
    std::vector<C> de;         // d/drho E_m, filled on request
    std::vector<C> reflected;  // conj(w~)^{-m}
    bool truncated = false;
  };

  Exterior exterior(C w, bool with_derivative) const {
    const Real gamma = map_->gamma();
    const C wt = w / gamma;
    const Real r = std::abs(wt);
    const Real eps = std::numeric_limits<Real>::epsilon();
    Exterior out;
    out.e.assign(n_ + 1, C(0));
    out.reflected.assign(n_ + 1, C(0));
    if (with_derivative) out.de.assign(n_ + 1, C(0));

    const C inv_conj = Real(1) / std::conj(wt);
    const C inv = Real(1) / wt;
    {
      C p(1);
      for (int m = 1; m <= n_; ++m) {
        p *= inv_conj;
        out.reflected[m] = p;
      }
    }

    const int N = table_ != nullptr ? table_->order() : 0;
    const Real log_r = std::log(r);
    std::vector<bool> use_series(n_ + 1, false);
    bool any_closed = false;
    for (int m = 1; m <= n_; ++m) {
      const Real closed_err = 64 * eps * std::exp(m * log_r);
      Real series_err = std::numeric_limits<Real>::infinity();
      if (m <= N && r > 1) series_err = row_max_[m] * std::exp(-N * log_r) / (r - 1);
      use_series[m] = series_err < closed_err;
      if (!use_series[m]) any_closed = true;
      if (std::min(closed_err, series_err) > Real(1e-12)) out.truncated = true;
    }

    if (any_closed) {
      const C z = map_->evaluate(w);
      std::vector<C> f;
      std::vector<C> df;
      faber(z, f, with_derivative ? &df : nullptr);
      const C dpsi = with_derivative ? w * map_->derivative(w) / gamma : C(0);
      C p(1);
      for (int m = 1; m <= n_; ++m) {
        p *= wt;
        if (use_series[m]) continue;
        out.e[m] = f[m] - p;
        if (with_derivative) out.de[m] = df[m] * dpsi - Real(m) * p;
      }
    }

    for (int m = 1; m <= n_; ++m) {
      if (!use_series[m]) continue;
      C e(0);
      C de(0);
      C p(1);
      const Real stop = Real(1e-18) * std::exp(-m * log_r);
      for (int k = 1; k <= N; ++k) {
        p *= inv;
        const C term = table_->normalized(m, k) * p;
        e += term;
        if (with_derivative) de -= Real(k) * term;
        if (std::abs(p) * row_max_[m] * k < stop) break;
      }
      out.e[m] = e;
      if (with_derivative) out.de[m] = de;
    }
    return out;
  }

 private:
  const LaurentMap<Real>* map_;
  const GrunskyTable<Real>* table_;
  int n_;
  std::vector<C> scaled_;
  std::vector<Real> row_max_;
};

enum class LayerKind { single, dbl };

template <typename Real>
Complex<Real> basis_value(const SeriesEvaluator<Real>& ev, LayerKind kind, int m, Side side, Complex<Real> z,
                          Complex<Real> w, bool* truncated) {
  using C = Complex<Real>;
  const int am = std::abs(m);
  C value;
  if (am == 0) {
    if (kind == LayerKind::single) {
      value = side == Side::interior ? C(std::log(ev.map().gamma())) : C(std::log(std::abs(w)));
    } else {
      value = side == Side::interior ? C(1) : C(0);
    }
    if (truncated != nullptr) *truncated = false;
    return value;
  }
  if (side == Side::interior) {
    std::vector<C> f;
    ev.faber(z, f);
    value = kind == LayerKind::single ? -f[am] / Real(2 * am) : f[am] / Real(2);
    if (truncated != nullptr) *truncated = false;
  } else {
    const auto ext = ev.exterior(w, false);
    value = kind == LayerKind::single ? -(ext.e[am] + ext.reflected[am]) / Real(2 * am)
                                      : (ext.e[am] - ext.reflected[am]) / Real(2);
    if (truncated != nullptr) *truncated = ext.truncated;
  }
  return m < 0 ? std::conj(value) : value;
}

}  // namespace detail

/// Classifies points against the boundary curve: a crossing-number test on a
/// fine boundary polygon, refined by inverting the map near the curve.
template <typename Real>
class Locator {
 public:
  explicit Locator(const LaurentMap<Real>& map) : map_(&map) {
    const int P = std::clamp(32 * (map.order() + 1), 512, 4096);
    poly_.resize(P);
    for (int j = 0; j < P; ++j) {
      poly_[j] = map.evaluate(std::polar(map.gamma(), 2 * std::numbers::pi_v<Real> * j / P));
    }
    for (int j = 0; j < P; ++j) max_edge_ = std::max(max_edge_, std::abs(poly_[(j + 1) % P] - poly_[j]));
  }

  /// Distance from z to the nearest boundary sample.
  Real sample_distance(Complex<Real> z) const {
    Real d = std::numeric_limits<Real>::infinity();
    for (const auto& p : poly_) d = std::min(d, std::abs(z - p));
    return d;
  }

  Side side(Complex<Real> z) const {
    bool inside = false;
    Real d = std::numeric_limits<Real>::infinity();
    const std::size_t P = poly_.size();
    for (std::size_t i = 0, j = P - 1; i < P; j = i++) {
      const auto a = poly_[i];
      const auto b = poly_[j];
      if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
        const Real x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
        if (z.real() < x) inside = !inside;
      }
      d = std::min(d, std::abs(z - a));
    }
    if (d > 2 * max_edge_) return inside ? Side::interior : Side::exterior;
    try {
      inverse_map(*map_, z);
      return Side::exterior;
    } catch (const DomainError&) {
      return Side::interior;
    } catch (const ConvergenceError&) {
      return inside ? Side::interior : Side::exterior;
    }
  }

 private:
  const LaurentMap<Real>* map_;
  std::vector<Complex<Real>> poly_;
  Real max_edge_ = 0;
};

/// S[zeta~_m] at z on the given side. For m >= 1 this is -F_m(z)/(2 m gamma^m)
/// inside; negative m is the conjugate; m = 0 gives log gamma inside and
/// log|w| outside. `truncated` reports an unresolved exterior series tail.
template <typename Real>
Complex<Real> single_layer_basis(const LaurentMap<Real>& map, const GrunskyTable<Real>& table, int m, Complex<Real> z,
                                 Side side, bool* truncated = nullptr) {
  if (std::abs(m) > table.order()) throw ContractError("single_layer_basis: |m| exceeds table order");
  detail::SeriesEvaluator<Real> ev(map, &table, std::abs(m));
  const Complex<Real> w = side == Side::exterior ? inverse_map(map, z) : Complex<Real>(0);
  return detail::basis_value(ev, detail::LayerKind::single, m, side, z, w, truncated);
}

template <typename Real>
Complex<Real> single_layer_basis(const LaurentMap<Real>& map, const GrunskyTable<Real>& table, int m, Complex<Real> z,
                                 bool* truncated = nullptr) {
  return single_layer_basis(map, table, m, z, Locator<Real>(map).side(z), truncated);
}

/// Exterior evaluation at curvilinear coordinates; rho = log gamma gives the
/// exterior boundary limit.
template <typename Real>
Complex<Real> single_layer_basis(const LaurentMap<Real>& map, const GrunskyTable<Real>& table, int m,
                                 const CurvilinearPoint<Real>& p, bool* truncated = nullptr) {
  if (std::abs(m) > table.order()) throw ContractError("single_layer_basis: |m| exceeds table order");
  if (p.rho < std::log(map.gamma()) - Real(1e-12)) throw DomainError("single_layer_basis: rho below log(gamma)");
  detail::SeriesEvaluator<Real> ev(map, &table, std::abs(m));
  const Complex<Real> w = p.w();
  return detail::basis_value(ev, detail::LayerKind::single, m, Side::exterior, map.evaluate(w), w, truncated);
}

/// D[eta~_m] at z: D[1] is 1 inside and 0 outside, F_m/(2 gamma^m) inside for
/// m >= 1, conjugates for m < 0.
template <typename Real>
Complex<Real> double_layer_basis(const LaurentMap<Real>& map, const GrunskyTable<Real>& table, int m, Complex<Real> z,
                                 Side side, bool* truncated = nullptr) {
  if (std::abs(m) > table.order()) throw ContractError("double_layer_basis: |m| exceeds table order");
  detail::SeriesEvaluator<Real> ev(map, &table, std::abs(m));
  const Complex<Real> w = side == Side::exterior ? inverse_map(map, z) : Complex<Real>(0);
  return detail::basis_value(ev, detail::LayerKind::dbl, m, side, z, w, truncated);
}

template <typename Real>
Complex<Real> double_layer_basis(const LaurentMap<Real>& map, const GrunskyTable<Real>& table, int m, Complex<Real> z,
                                 bool* truncated = nullptr) {
  return double_layer_basis(map, table, m, z, Locator<Real>(map).side(z), truncated);
}

template <typename Real>
Complex<Real> double_layer_basis(const LaurentMap<Real>& map, const GrunskyTable<Real>& table, int m,
                                 const CurvilinearPoint<Real>& p, bool* truncated = nullptr) {
  if (std::abs(m) > table.order()) throw ContractError("double_layer_basis: |m| exceeds table order");
  if (p.rho < std::log(map.gamma()) - Real(1e-12)) throw DomainError("double_layer_basis: rho below log(gamma)");
  detail::SeriesEvaluator<Real> ev(map, &table, std::abs(m));
  const Complex<Real> w = p.w();
  return detail::basis_value(ev, detail::LayerKind::dbl, m, Side::exterior, map.evaluate(w), w, truncated);
}

template <typename Real>
struct TransmissionSolution {
  LaurentMap<Real> map;
  GrunskyTable<Real> table;
  BackgroundField<Real> field;
  DensityVector<Real> phi;  // zeta basis, conjugate-symmetric
  Real lambda = 0;
  Real eps_c = 1;
  Real eps_m = 1;
  FaberExpansion<Real> alpha;
  Real asymmetry = 0;  // max |phi_m - conj(phi_{-m})| before symmetrization
  Real condition = 0;  // 2-norm condition of (lambda I - [K*]_n)
  bool truncation_warning = false;
};

using TransmissionSolutiond = TransmissionSolution<double>;

template <typename Real>
Real contrast_parameter(Real eps_c, Real eps_m) {
  if (!(eps_c > 0) || !(eps_m > 0)) throw ContractError("contrast: permittivities must be positive");
  if (eps_c == eps_m) throw ContrastError("contrast: eps_c = eps_m leaves no inclusion to solve for");
  return (eps_c + eps_m) / (2 * (eps_c - eps_m));
}

template <typename Real>
TransmissionSolution<Real> solve_transmission(const LaurentMap<Real>& map, const GrunskyTable<Real>& table,
                                              const BackgroundField<Real>& field, Real eps_c, Real eps_m, int n) {
  const Real lambda = contrast_parameter(eps_c, eps_m);
  const int deg = field.degree();
  if (deg < 1) throw ContractError("solve_transmission: background polynomial must have degree >= 1");
  if (deg > table.order()) throw ContractError("solve_transmission: polynomial degree exceeds table order");
  if (n < 1 || n > table.order()) throw ContractError("solve_transmission: n must be in [1, table order]");
  if (std::abs(map.gamma() - table.gamma()) > Real(1e-14) * map.gamma()) {
    throw ContractError("solve_transmission: table was built for a different map");
  }

  const auto basis = faber_polynomials(map, std::max(deg, 1));
  std::vector<Complex<Real>> poly(field.poly.begin(), field.poly.begin() + deg + 1);
  auto alpha = poly_to_faber<Real>(basis, poly);
  const auto trace = neumann_trace_coeffs(table, alpha);
  const auto part = field.part == BackgroundField<Real>::Part::real ? real_part(trace.coeffs) : imag_part(trace.coeffs);
  if (!part.zero_mode() || std::abs(*part.zero_mode()) != 0) {
    throw ContractError("solve_transmission: Neumann data of a harmonic polynomial must have zero net flux");
  }
  auto rhs = to_zeta(part).resized(n);
  rhs.set_zero_mode(std::nullopt);

  const auto section = assemble_section(table, n);
  auto phi = solve_resolvent(section, lambda, rhs);

  Real asym = 0;
  for (int m = 1; m <= n; ++m) {
    asym = std::max(asym, std::abs(phi[m] - std::conj(phi[-m])));
    const Complex<Real> avg = (phi[m] + std::conj(phi[-m])) / Real(2);
    phi[m] = avg;
    phi[-m] = std::conj(avg);
  }
  phi.set_zero_mode(Complex<Real>(0));

  return TransmissionSolution<Real>{map,
                                    table,
                                    field,
                                    std::move(phi),
                                    lambda,
                                    eps_c,
                                    eps_m,
                                    std::move(alpha),
                                    asym,
                                    resolvent_condition(section, lambda),
                                    trace.truncation_warning};
}

namespace detail {

template <typename Real>
Real field_from_interior(const TransmissionSolution<Real>& sol, const SeriesEvaluator<Real>& ev, Complex<Real> z) {
  std::vector<Complex<Real>> f;
  ev.faber(z, f);
  Complex<Real> s(0);
  for (int m = 1; m <= sol.phi.half_order(); ++m) {
    const Complex<Real> sm = -f[m] / Real(2 * m);
    s += std::sqrt(Real(m)) * (sol.phi[m] * sm + sol.phi[-m] * std::conj(sm));
  }
  return sol.field.value(z) + s.real();
}

template <typename Real>
Real field_from_exterior(const TransmissionSolution<Real>& sol, const SeriesEvaluator<Real>& ev, Complex<Real> w,
                         bool* truncated = nullptr) {
  const auto ext = ev.exterior(w, false);
  Complex<Real> s(0);
  for (int m = 1; m <= sol.phi.half_order(); ++m) {
    const Complex<Real> sm = -(ext.e[m] + ext.reflected[m]) / Real(2 * m);
    s += std::sqrt(Real(m)) * (sol.phi[m] * sm + sol.phi[-m] * std::conj(sm));
  }
  if (truncated != nullptr) *truncated = ext.truncated;
  return sol.field.value(sol.map.evaluate(w)) + s.real();
}

}  // namespace detail

/// u at points known to lie on one side; interior points may sit on the
/// curve (the interior branch is exact up to it).
template <typename Real>
std::vector<Real> eval_field(const TransmissionSolution<Real>& sol, std::span<const Complex<Real>> points, Side side) {
  detail::SeriesEvaluator<Real> ev(sol.map, &sol.table, sol.phi.half_order());
  std::vector<Real> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = side == Side::interior ? detail::field_from_interior(sol, ev, points[i])
                                    : detail::field_from_exterior(sol, ev, inverse_map(sol.map, points[i]));
  });
  return out;
}

/// u at arbitrary points, each classified as interior or exterior. Points
/// within 1e-10 of a boundary sample are rejected, since their side is
/// ambiguous.
template <typename Real>
std::vector<Real> eval_field(const TransmissionSolution<Real>& sol, std::span<const Complex<Real>> points) {
  const Locator<Real> locator(sol.map);
  detail::SeriesEvaluator<Real> ev(sol.map, &sol.table, sol.phi.half_order());
  const Real tol = Real(1e-10) * std::max(Real(1), sol.map.gamma());
  std::vector<Real> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const auto z = points[i];
    if (locator.sample_distance(z) <= tol) throw DomainError("eval_field: point lies on the boundary; specify a side");
    out[i] = locator.side(z) == Side::interior ? detail::field_from_interior(sol, ev, z)
                                               : detail::field_from_exterior(sol, ev, inverse_map(sol.map, z));
  });
  return out;
}

/// u at an exterior point given in curvilinear coordinates.
template <typename Real>
Real eval_field(const TransmissionSolution<Real>& sol, const CurvilinearPoint<Real>& p) {
  if (p.rho < std::log(sol.map.gamma()) - Real(1e-12)) throw DomainError("eval_field: rho below log(gamma)");
  detail::SeriesEvaluator<Real> ev(sol.map, &sol.table, sol.phi.half_order());
  return detail::field_from_exterior(sol, ev, p.w());
}

/// One-sided normal derivative of u at the boundary point Psi(gamma e^{i theta}),
/// from the termwise-differentiated series.
template <typename Real>
Real boundary_normal_derivative(const TransmissionSolution<Real>& sol, Real theta, Side side) {
  using C = Complex<Real>;
  const int n = sol.phi.half_order();
  const Real gamma = sol.map.gamma();
  const C w = std::polar(gamma, theta);
  const C z = sol.map.evaluate(w);
  const C dpsi = w * sol.map.derivative(w);
  const Real h = std::abs(dpsi);
  if (!(h > 0)) throw DegenerateError("boundary_normal_derivative: vanishing scale factor");
  const C nu = dpsi / h;
  detail::SeriesEvaluator<Real> ev(sol.map, &sol.table, n);
  C s(0);
  if (side == Side::interior) {
    std::vector<C> f;
    std::vector<C> df;
    ev.faber(z, f, &df);
    for (int m = 1; m <= n; ++m) {
      const C dsm = -df[m] * nu / (Real(2 * m) * gamma);
      s += std::sqrt(Real(m)) * (sol.phi[m] * dsm + sol.phi[-m] * std::conj(dsm));
    }
  } else {
    const auto ext = ev.exterior(w, true);
    for (int m = 1; m <= n; ++m) {
      const C dsm = -(ext.de[m] - Real(m) * ext.reflected[m]) / (Real(2 * m) * h);
      s += std::sqrt(Real(m)) * (sol.phi[m] * dsm + sol.phi[-m] * std::conj(dsm));
    }
  }
  return sol.field.normal_derivative(z, nu) + s.real();
}

template <typename Real>
struct TransmissionDiagnostics {
  Real continuity_residual = 0;   // max |u+ - u-| / max |u| after Richardson extrapolation
  Real flux_residual = 0;         // max |eps_m du+/dnu - eps_c du-/dnu| relative to the flux scale
  std::array<Real, 2> decay_ratios{};  // far-field |u - H| at R=20/R=10 and R=40/R=20 (units of gamma)
  bool decay_ok = false;          // both ratios within 0.05 of 1/2
  Real asymmetry = 0;
  Real condition = 0;
  bool truncation_warning = false;
};

using TransmissionDiagnosticsd = TransmissionDiagnostics<double>;

template <typename Real>
TransmissionDiagnostics<Real> diagnose(const TransmissionSolution<Real>& sol, int samples = 256) {
  using C = Complex<Real>;
  if (samples < 4) throw ContractError("diagnose: need at least 4 samples");
  TransmissionDiagnostics<Real> d;
  d.asymmetry = sol.asymmetry;
  d.condition = sol.condition;
  d.truncation_warning = sol.truncation_warning;

  const Real gamma = sol.map.gamma();
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  const int n = sol.phi.half_order();
  detail::SeriesEvaluator<Real> ev(sol.map, &sol.table, n);

  // Continuity: u at Psi((gamma +- delta) e^{i theta}) for delta and delta/2,
  // linearly extrapolated to delta = 0 on each side.
  const Real delta = Real(1e-5) * gamma;
  std::vector<Real> jump(samples);
  std::vector<Real> mag(samples);
  std::vector<Real> flux(samples);
  std::vector<Real> flux_scale(samples);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t j) {
    const Real theta = two_pi * Real(j) / Real(samples);
    const C dir = std::polar(Real(1), theta);
    auto inner = [&](Real dl) { return detail::field_from_interior(sol, ev, sol.map.evaluate((gamma - dl) * dir)); };
    auto outer = [&](Real dl) { return detail::field_from_exterior(sol, ev, (gamma + dl) * dir); };
    const Real u_in = 2 * inner(delta / 2) - inner(delta);
    const Real u_out = 2 * outer(delta / 2) - outer(delta);
    jump[j] = std::abs(u_out - u_in);
    mag[j] = std::max(std::abs(u_in), std::abs(u_out));
    const Real dn_in = boundary_normal_derivative(sol, theta, Side::interior);
    const Real dn_out = boundary_normal_derivative(sol, theta, Side::exterior);
    flux[j] = std::abs(sol.eps_m * dn_out - sol.eps_c * dn_in);
    flux_scale[j] = std::max(sol.eps_c * std::abs(dn_in), sol.eps_m * std::abs(dn_out));
  });
  const Real umax = *std::max_element(mag.begin(), mag.end());
  const Real fmax = *std::max_element(flux_scale.begin(), flux_scale.end());
  d.continuity_residual = *std::max_element(jump.begin(), jump.end()) / std::max(umax, std::numeric_limits<Real>::min());
  d.flux_residual = *std::max_element(flux.begin(), flux.end()) / std::max(fmax, std::numeric_limits<Real>::min());

  // Far field: max |u - H| on circles of radius R gamma about a0.
  const std::array<Real, 3> radii{10, 20, 40};
  std::array<Real, 3> far{};
  const int angles = 64;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    Real mx = 0;
    for (int j = 0; j < angles; ++j) {
      const C z = sol.map.a0() + std::polar(radii[r] * gamma, two_pi * j / angles);
      const C w = inverse_map(sol.map, z);
      mx = std::max(mx, std::abs(detail::field_from_exterior(sol, ev, w) - sol.field.value(z)));
    }
    far[r] = mx;
  }
  d.decay_ratios = {far[0] > 0 ? far[1] / far[0] : Real(0), far[1] > 0 ? far[2] / far[1] : Real(0)};
  d.decay_ok = std::abs(d.decay_ratios[0] - Real(0.5)) <= Real(0.05) &&
               std::abs(d.decay_ratios[1] - Real(0.5)) <= Real(0.05);
  return d;
}

}  // namespace npfaber

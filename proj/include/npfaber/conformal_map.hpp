#pragma once

// Exterior conformal map Psi(w) = w + a0 + a1/w + ... + aM/w^M on |w| >= gamma
// and the curvilinear coordinates (rho, theta) it induces, z = Psi(e^{rho + i theta}).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "npfaber/errors.hpp"
#include "npfaber/types.hpp"

namespace npfaber {

namespace detail {

template <typename Real>
Real orient2d(Complex<Real> a, Complex<Real> b, Complex<Real> c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) -
         (b.imag() - a.imag()) * (c.real() - a.real());
}

template <typename Real>
bool segments_cross(Complex<Real> p0, Complex<Real> p1, Complex<Real> q0, Complex<Real> q1) {
  if (std::max(p0.real(), p1.real()) < std::min(q0.real(), q1.real()) ||
      std::max(q0.real(), q1.real()) < std::min(p0.real(), p1.real()) ||
      std::max(p0.imag(), p1.imag()) < std::min(q0.imag(), q1.imag()) ||
      std::max(q0.imag(), q1.imag()) < std::min(p0.imag(), p1.imag())) {
    return false;
  }
  const Real d1 = orient2d(p0, p1, q0);
  const Real d2 = orient2d(p0, p1, q1);
  const Real d3 = orient2d(q0, q1, p0);
  const Real d4 = orient2d(q0, q1, p1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace detail

/// True when the closed polygon through `pts` has no crossing between
/// non-adjacent edges.
template <typename Real>
bool polygon_is_simple(std::span<const Complex<Real>> pts) {
  const std::size_t n = pts.size();
  if (n < 4) return true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p0 = pts[i];
    const auto p1 = pts[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (detail::segments_cross(p0, p1, pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

/// Signed area of a closed polygon; positive for counterclockwise order.
template <typename Real>
Real polygon_signed_area(std::span<const Complex<Real>> pts) {
  Real area = 0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = pts[i];
    const auto b = pts[(i + 1) % n];
    area += a.real() * b.imag() - b.real() * a.imag();
  }
  return area / 2;
}

/// Truncated Laurent map Psi(w) = w + a0 + sum_{k=1}^{M} a_k w^{-k} with
/// conformal radius gamma. Immutable; the boundary curve is checked to be
/// simple on construction.
template <typename Real>
class LaurentMap {
 public:
  using Scalar = Complex<Real>;

  LaurentMap(Real gamma, Scalar a0, std::vector<Scalar> coeffs)
      : gamma_(gamma), a0_(a0), coeffs_(std::move(coeffs)) {
    if (!(gamma_ > 0) || !std::isfinite(gamma_)) {
      throw DomainError("LaurentMap: gamma must be positive and finite");
    }
    for (const auto& a : coeffs_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw DomainError("LaurentMap: non-finite coefficient");
      }
    }
    if (!std::isfinite(a0_.real()) || !std::isfinite(a0_.imag())) {
      throw DomainError("LaurentMap: non-finite a0");
    }
    const int samples = std::clamp(16 * (order() + 1), 256, 4096);
    std::vector<Scalar> pts(samples);
    for (int j = 0; j < samples; ++j) {
      const Real t = 2 * std::numbers::pi_v<Real> * j / samples;
      pts[j] = evaluate(std::polar(gamma_, t));
    }
    if (!polygon_is_simple<Real>(pts)) {
      throw DomainError("LaurentMap: boundary curve self-intersects; map is not injective on |w| >= gamma");
    }
  }

  static LaurentMap identity() { return LaurentMap(Real(1), Scalar(0), {}); }

  Real gamma() const { return gamma_; }
  Scalar a0() const { return a0_; }
  /// a_1 ... a_M.
  std::span<const Scalar> coeffs() const { return coeffs_; }
  int order() const { return static_cast<int>(coeffs_.size()); }

  /// a_k for k >= 0; coefficients beyond the truncation order are zero.
  Scalar coeff(int k) const {
    if (k == 0) return a0_;
    if (k < 0 || k > order()) return Scalar(0);
    return coeffs_[k - 1];
  }

  /// Raw Laurent series value, valid for any w != 0 (no domain check).
  Scalar evaluate(Scalar w) const {
    const Scalar inv = Scalar(1) / w;
    Scalar tail(0);
    for (int k = order(); k >= 1; --k) tail = (tail + coeffs_[k - 1]) * inv;
    return w + a0_ + tail;
  }

  /// Psi'(w), no domain check.
  Scalar derivative(Scalar w) const {
    const Scalar inv = Scalar(1) / w;
    Scalar tail(0);
    for (int k = order(); k >= 1; --k) tail = (tail + Real(k) * coeffs_[k - 1]) * inv;
    return Scalar(1) - tail * inv;
  }

  /// Psi''(w), no domain check.
  Scalar second_derivative(Scalar w) const {
    const Scalar inv = Scalar(1) / w;
    Scalar tail(0);
    for (int k = order(); k >= 1; --k) tail = (tail + Real(k) * Real(k + 1) * coeffs_[k - 1]) * inv;
    return tail * inv * inv;
  }

  /// Map of the unit-capacity rescaling Psi(gamma w)/gamma, whose coefficients
  /// are a_k / gamma^{k+1}. Faber and Grunsky recursions run on this form.
  std::vector<Scalar> normalized_coeffs() const {
    std::vector<Scalar> out(coeffs_.size());
    Real scale = gamma_ * gamma_;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      out[k] = coeffs_[k] / scale;
      scale *= gamma_;
    }
    return out;
  }

 private:
  Real gamma_;
  Scalar a0_;
  std::vector<Scalar> coeffs_;
};

using LaurentMapd = LaurentMap<double>;

/// Modified polar coordinates of an exterior point, z = Psi(e^{rho + i theta}).
template <typename Real>
struct CurvilinearPoint {
  Real rho;
  Real theta;

  Complex<Real> w() const { return std::polar(std::exp(rho), theta); }
};

template <typename Real>
CurvilinearPoint<Real> to_curvilinear(Complex<Real> w) {
  Real theta = std::arg(w);
  if (theta < 0) theta += 2 * std::numbers::pi_v<Real>;
  return {std::log(std::abs(w)), theta};
}

/// Boundary sample at w = gamma e^{i theta}.
template <typename Real>
struct BoundarySample {
  Real theta;
  Complex<Real> z;
  Real h;
  Complex<Real> normal;
};

/// Psi(w) for |w| >= gamma (relative tolerance 1e-12 on the radius).
template <typename Real>
Complex<Real> eval_map(const LaurentMap<Real>& map, Complex<Real> w) {
  if (std::abs(w) < map.gamma() * (1 - Real(1e-12))) {
    throw DomainError("eval_map: |w| < gamma");
  }
  return map.evaluate(w);
}

/// Scale factor h = |d Psi / d rho| = |w Psi'(w)|.
template <typename Real>
Real scale_factor(const LaurentMap<Real>& map, const CurvilinearPoint<Real>& p) {
  if (p.rho < std::log(map.gamma()) - Real(1e-12)) {
    throw DomainError("scale_factor: rho below log(gamma)");
  }
  const Complex<Real> w = p.w();
  const Complex<Real> d = map.derivative(w);
  if (std::abs(d) <= Real(1e-12)) {
    throw DegenerateError("scale_factor: Psi'(w) vanishes; map not conformal here");
  }
  return std::abs(w * d);
}

namespace detail {

/// Damped Newton iteration for Psi(w) = z from w, keeping |w| >= 0.999 gamma.
/// Returns the final residual and updates w.
template <typename Real>
Real newton_inverse(const LaurentMap<Real>& map, Complex<Real> z, Complex<Real>& w, int max_iterations) {
  using C = Complex<Real>;
  const Real floor = 8 * std::numeric_limits<Real>::epsilon() * (1 + std::abs(z));
  Real residual = std::abs(map.evaluate(w) - z);
  for (int it = 0; it < max_iterations && residual > floor; ++it) {
    const C d = map.derivative(w);
    if (std::abs(d) == 0) break;
    C step = (map.evaluate(w) - z) / d;
    // Halve the step until the residual decreases and the iterate stays in
    // the exterior disk.
    C trial = w - step;
    Real trial_res = std::abs(map.evaluate(trial) - z);
    for (int halvings = 0; halvings < 40 && (trial_res >= residual || std::abs(trial) < map.gamma() * Real(0.999));
         ++halvings) {
      step *= Real(0.5);
      trial = w - step;
      trial_res = std::abs(map.evaluate(trial) - z);
    }
    if (trial_res >= residual) break;
    w = trial;
    residual = trial_res;
  }
  return residual;
}

}  // namespace detail

/// Solves Psi(w) = z for an exterior point z by damped Newton iteration
/// started from z - a0. If that start does not converge (strongly non-convex
/// curves, points close to the boundary), Newton is restarted from the best
/// point of a polar grid on |w| >= gamma.
template <typename Real>
Complex<Real> inverse_map(const LaurentMap<Real>& map, Complex<Real> z, int max_iterations = 50) {
  using C = Complex<Real>;
  const Real gamma = map.gamma();
  const Real target = Real(1e-12) * (1 + std::abs(z));

  C w = z - map.a0();
  if (std::abs(w) < Real(1.05) * gamma) {
    w = (std::abs(w) > 0 ? w / std::abs(w) : C(1)) * (Real(1.05) * gamma);
  }
  Real residual = detail::newton_inverse(map, z, w, max_iterations);

  if (!(residual <= target)) {
    const Real outer = std::max(Real(4), 2 * std::abs(z - map.a0()) / gamma);
    const int radii = 32;
    const int angles = std::max(128, 16 * (map.order() + 1));
    C best = w;
    Real best_res = residual;
    for (int i = 0; i < radii; ++i) {
      const Real r = gamma * std::pow(outer, Real(i) / (radii - 1)) * (1 + Real(1e-6));
      for (int j = 0; j < angles; ++j) {
        const C cand = std::polar(r, 2 * std::numbers::pi_v<Real> * j / angles);
        const Real res = std::abs(map.evaluate(cand) - z);
        if (res < best_res) {
          best_res = res;
          best = cand;
        }
      }
    }
    w = best;
    residual = detail::newton_inverse(map, z, w, max_iterations);
  }
  if (!(residual <= target)) {
    throw ConvergenceError("inverse_map: Newton iteration did not converge");
  }
  if (std::abs(w) < gamma) {
    throw DomainError("inverse_map: point lies inside the curve (|w| < gamma)");
  }
  return w;
}

/// Uniform samples theta_j = 2 pi j / P of the boundary w = gamma e^{i theta_j}.
template <typename Real>
std::vector<BoundarySample<Real>> sample_boundary(const LaurentMap<Real>& map, int P) {
  if (P < 4 || P % 2 != 0) throw ContractError("sample_boundary: P must be even and >= 4");
  std::vector<BoundarySample<Real>> out(P);
  Real hmax = 0;
  for (int j = 0; j < P; ++j) {
    const Real theta = 2 * std::numbers::pi_v<Real> * j / P;
    const Complex<Real> w = std::polar(map.gamma(), theta);
    const Complex<Real> dpsi = w * map.derivative(w);
    const Real h = std::abs(dpsi);
    hmax = std::max(hmax, h);
    out[j] = {theta, map.evaluate(w), h, h > 0 ? dpsi / h : Complex<Real>(0)};
  }
  for (const auto& s : out) {
    if (!(s.h > Real(1e-12) * hmax)) throw DegenerateError("sample_boundary: vanishing scale factor on the boundary");
  }
  return out;
}

}  // namespace npfaber

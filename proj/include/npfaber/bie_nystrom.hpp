#pragma once

// Nystrom discretization of K* on a smooth closed curve and recovery of the
// exterior conformal map from the density solving (1/2 I - K*) phi = nu1 + i nu2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/LU>
#include <unsupported/Eigen/FFT>

#include "npfaber/conformal_map.hpp"
#include "npfaber/errors.hpp"
#include "npfaber/parallel.hpp"
#include "npfaber/types.hpp"

namespace npfaber {

/// Closed curve sampled at t_p = 2 pi p / P. Derivatives are with respect to t.
template <typename Real>
struct BoundaryCurve {
  int P = 0;
  std::vector<Complex<Real>> z;
  std::vector<Complex<Real>> dz;
  std::vector<Complex<Real>> d2z;
  std::vector<Complex<Real>> normals;  // outward unit normals
  std::vector<Real> speed;
  std::vector<Real> curvature;
  bool reversed = false;  // input was clockwise and has been reversed

  /// Trapezoidal arc-length weights speed_p * 2 pi / P.
  std::vector<Real> weights() const {
    std::vector<Real> w(P);
    const Real dt = 2 * std::numbers::pi_v<Real> / P;
    for (int p = 0; p < P; ++p) w[p] = speed[p] * dt;
    return w;
  }

  Real perimeter() const {
    const auto w = weights();
    Real s = 0;
    for (Real x : w) s += x;
    return s;
  }
};

using BoundaryCurved = BoundaryCurve<double>;

namespace detail {

template <typename Real>
void check_sample_count(std::size_t P) {
  if (P < 64 || P % 2 != 0) throw ContractError("build_curve: P must be even and >= 64");
}

/// Fills in the derived geometry and reverses clockwise input.
template <typename Real>
BoundaryCurve<Real> finish_curve(std::vector<Complex<Real>> z, std::vector<Complex<Real>> dz,
                                 std::vector<Complex<Real>> d2z) {
  using C = Complex<Real>;
  const int P = static_cast<int>(z.size());
  BoundaryCurve<Real> c;
  c.P = P;
  const Real area = polygon_signed_area<Real>(z);
  Real extent = 0;
  for (const auto& p : z) extent = std::max(extent, std::abs(p - z[0]));
  if (!(std::abs(area) > Real(1e-14) * extent * extent)) {
    throw OrientationError("build_curve: curve encloses no area");
  }
  if (area < 0) {
    // t -> -t keeps sample 0 in place and flips the direction of travel.
    std::reverse(z.begin() + 1, z.end());
    std::reverse(dz.begin() + 1, dz.end());
    std::reverse(d2z.begin() + 1, d2z.end());
    for (auto& d : dz) d = -d;
    c.reversed = true;
  }
  c.z = std::move(z);
  c.dz = std::move(dz);
  c.d2z = std::move(d2z);
  c.normals.resize(P);
  c.speed.resize(P);
  c.curvature.resize(P);
  Real smax = 0;
  for (int p = 0; p < P; ++p) smax = std::max(smax, std::abs(c.dz[p]));
  for (int p = 0; p < P; ++p) {
    const Real s = std::abs(c.dz[p]);
    if (!(s >= Real(1e-10) * smax)) throw CuspError("build_curve: speed vanishes (cusp)");
    c.speed[p] = s;
    c.normals[p] = C(0, -1) * c.dz[p] / s;
    c.curvature[p] = std::imag(std::conj(c.dz[p]) * c.d2z[p]) / (s * s * s);
  }
  return c;
}

}  // namespace detail

/// Samples the boundary of an exterior map, using the map's own derivatives.
template <typename Real>
BoundaryCurve<Real> build_curve(const LaurentMap<Real>& map, int P) {
  using C = Complex<Real>;
  detail::check_sample_count<Real>(static_cast<std::size_t>(std::max(P, 0)));
  std::vector<C> z(P), dz(P), d2z(P);
  for (int p = 0; p < P; ++p) {
    const C w = std::polar(map.gamma(), 2 * std::numbers::pi_v<Real> * p / P);
    const C d1 = map.derivative(w);
    z[p] = map.evaluate(w);
    dz[p] = C(0, 1) * w * d1;
    d2z[p] = -w * d1 - w * w * map.second_derivative(w);
  }
  return detail::finish_curve<Real>(std::move(z), std::move(dz), std::move(d2z));
}

/// Samples a parametrization t -> (z, z', z'') at t_p = 2 pi p / P.
template <typename Real, typename Param>
BoundaryCurve<Real> build_curve_parametric(Param&& param, int P) {
  using C = Complex<Real>;
  detail::check_sample_count<Real>(static_cast<std::size_t>(std::max(P, 0)));
  std::vector<C> z(P), dz(P), d2z(P);
  for (int p = 0; p < P; ++p) {
    const auto v = param(2 * std::numbers::pi_v<Real> * p / P);
    z[p] = v[0];
    dz[p] = v[1];
    d2z[p] = v[2];
  }
  return detail::finish_curve<Real>(std::move(z), std::move(dz), std::move(d2z));
}

/// Curve from positions alone; derivatives come from trigonometric
/// interpolation. Samples whose top Fourier band is not negligible are
/// rejected, since the interpolant (and every quantity built on it) would
/// then be unreliable; corners always trip this test.
template <typename Real>
BoundaryCurve<Real> build_curve(std::span<const Complex<Real>> samples) {
  using C = Complex<Real>;
  const std::size_t P = samples.size();
  detail::check_sample_count<Real>(P);
  std::vector<C> z(samples.begin(), samples.end());
  Eigen::FFT<Real> fft;
  std::vector<C> fourier;
  fft.fwd(fourier, z);

  Real peak = 0;
  for (const auto& s : fourier) peak = std::max(peak, std::abs(s));
  Real band = 0;
  const int half = static_cast<int>(P) / 2;
  for (int j = 0; j < static_cast<int>(P); ++j) {
    const int k = j <= half ? j : j - static_cast<int>(P);
    if (8 * std::abs(k) > 3 * static_cast<int>(P)) band = std::max(band, std::abs(fourier[j]));
  }
  if (band > Real(1e-8) * peak) {
    throw CuspError("build_curve: samples are not smooth at this resolution (corner or cusp)");
  }

  std::vector<C> s1(P), s2(P);
  for (int j = 0; j < static_cast<int>(P); ++j) {
    const int k = j < half ? j : j - static_cast<int>(P);
    const Real kk = static_cast<Real>(k);
    s1[j] = j == half ? C(0) : C(0, kk) * fourier[j];
    s2[j] = -kk * kk * fourier[j];
  }
  std::vector<C> dz, d2z;
  fft.inv(dz, s1);
  fft.inv(d2z, s2);
  return detail::finish_curve<Real>(std::move(z), std::move(dz), std::move(d2z));
}

/// P x P matrix of K* with trapezoidal weights, plus the data of the
/// conformal-map equation.
template <typename Real>
struct NystromOperator {
  RealMatrix<Real> mat;
  std::vector<Real> weights;
  std::vector<Complex<Real>> normals;
};

using NystromOperatord = NystromOperator<double>;

/// Off-diagonal entries (1/2pi) <z_p - z_q, nu_p> / |z_p - z_q|^2 w_q; the
/// diagonal takes the kernel's limit kappa_p / (4 pi) w_p.
template <typename Real>
NystromOperator<Real> kstar_matrix(const BoundaryCurve<Real>& curve) {
  const int P = curve.P;
  NystromOperator<Real> op;
  op.weights = curve.weights();
  op.normals = curve.normals;
  op.mat.resize(P, P);
  const Real inv_two_pi = 1 / (2 * std::numbers::pi_v<Real>);
  parallel_for(static_cast<std::size_t>(P), [&](std::size_t ip) {
    const int p = static_cast<int>(ip);
    const auto zp = curve.z[p];
    const auto nu = curve.normals[p];
    for (int q = 0; q < P; ++q) {
      if (q == p) {
        op.mat(p, q) = curve.curvature[p] * inv_two_pi / 2 * op.weights[p];
        continue;
      }
      const auto d = zp - curve.z[q];
      const Real dot = d.real() * nu.real() + d.imag() * nu.imag();
      op.mat(p, q) = inv_two_pi * dot / std::norm(d) * op.weights[q];
    }
  });
  return op;
}

/// Solves (1/2 I - K*) phi = nu1 + i nu2 for the real and imaginary parts.
///
/// 1/2 is an eigenvalue of K* (eigenfunction 1/h), so the system is singular
/// but consistent: the right-hand side integrates to zero. The solution is
/// fixed by adding the rank-one term (1/|Gamma|) 1 w^T, which selects the
/// density with zero integral. The conformal density has that property.
template <typename Real>
ComplexVector<Real> solve_density_bie(const NystromOperator<Real>& op) {
  const int P = static_cast<int>(op.mat.rows());
  RealMatrix<Real> a = -op.mat;
  a.diagonal().array() += Real(0.5);
  Real length = 0;
  for (Real w : op.weights) length += w;
  for (int q = 0; q < P; ++q) a.col(q).array() += op.weights[q] / length;
  Eigen::PartialPivLU<RealMatrix<Real>> lu(a);
  if (!(lu.rcond() > Real(1e-14))) throw SingularError("solve_density_bie: (1/2 I - K*) is numerically singular");
  RealMatrix<Real> rhs(P, 2);
  for (int p = 0; p < P; ++p) {
    rhs(p, 0) = op.normals[p].real();
    rhs(p, 1) = op.normals[p].imag();
  }
  const RealMatrix<Real> x = lu.solve(rhs);
  ComplexVector<Real> phi(P);
  for (int p = 0; p < P; ++p) phi[p] = Complex<Real>(x(p, 0), x(p, 1));
  return phi;
}

/// max_p |((1/2 I - K*) phi)_p - (nu1 + i nu2)_p|.
template <typename Real>
Real bie_residual(const NystromOperator<Real>& op, const ComplexVector<Real>& phi) {
  const ComplexVector<Real> k = op.mat.template cast<Complex<Real>>() * phi;
  Real r = 0;
  for (int p = 0; p < phi.size(); ++p) r = std::max(r, std::abs(phi[p] / Real(2) - k[p] - op.normals[p]));
  return r;
}

/// Exterior-map coefficients from the density phi of solve_density_bie. That
/// density is twice gamma zeta~_1, so it is halved before use:
///   gamma^2 = (1/2pi) sum z conj(phi) w,
///   a_m = gamma^{m-1}/(2pi) sum z |phi|^{1-m} phi^m w,  m = 0..M.
template <typename Real>
LaurentMap<Real> conformal_coefficients(const BoundaryCurve<Real>& curve, const ComplexVector<Real>& phi, int M) {
  using C = Complex<Real>;
  const int P = curve.P;
  if (phi.size() != P) throw ContractError("conformal_coefficients: density size does not match the curve");
  if (M < 0 || 4 * M > P) throw ContractError("conformal_coefficients: need 0 <= M <= P/4");
  const auto w = curve.weights();
  const Real inv_two_pi = 1 / (2 * std::numbers::pi_v<Real>);

  C gamma_sq(0);
  for (int p = 0; p < P; ++p) gamma_sq += curve.z[p] * std::conj(phi[p] / Real(2)) * w[p];
  gamma_sq *= inv_two_pi;
  if (!(gamma_sq.real() > 0) || std::abs(gamma_sq.imag()) > Real(1e-8) * std::abs(gamma_sq)) {
    throw NonRealError("conformal_coefficients: capacity estimate is not a positive real number");
  }
  const Real gamma = std::sqrt(gamma_sq.real());

  // |phi|^{1-m} phi^m = |phi| (phi/|phi|)^m, which cannot overflow.
  std::vector<C> unit(P);
  std::vector<Real> mod(P);
  for (int p = 0; p < P; ++p) {
    const C f = phi[p] / Real(2);
    mod[p] = std::abs(f);
    unit[p] = f / mod[p];
  }
  std::vector<C> coeffs(M + 1, C(0));
  std::vector<C> power(P, C(1));
  Real gamma_pow = 1 / gamma;
  for (int m = 0; m <= M; ++m) {
    C s(0);
    for (int p = 0; p < P; ++p) {
      s += curve.z[p] * mod[p] * power[p] * w[p];
      power[p] *= unit[p];
    }
    coeffs[m] = gamma_pow * inv_two_pi * s;
    gamma_pow *= gamma;
  }
  std::vector<C> tail(coeffs.begin() + 1, coeffs.end());
  return LaurentMap<Real>(gamma, coeffs[0], std::move(tail));
}

/// Fits an exterior map to a curve: Nystrom solve followed by coefficient
/// extraction.
template <typename Real>
LaurentMap<Real> fit_conformal_map(const BoundaryCurve<Real>& curve, int M, Real* residual = nullptr) {
  const auto op = kstar_matrix(curve);
  const auto phi = solve_density_bie(op);
  if (residual != nullptr) *residual = bie_residual(op, phi);
  return conformal_coefficients(curve, phi, M);
}

/// Largest distance from the given points to the boundary curve of `map`.
/// Each point is matched to its nearest sample on a fine grid in theta, then
/// the closest boundary point is refined by Newton's method on
/// d/dtheta |Psi(gamma e^{i theta}) - z|^2.
template <typename Real>
Real boundary_mismatch(const LaurentMap<Real>& map, std::span<const Complex<Real>> points) {
  using C = Complex<Real>;
  const int F = std::max<int>(4096, 8 * static_cast<int>(points.size()));
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  std::vector<C> fine(F);
  for (int j = 0; j < F; ++j) fine[j] = map.evaluate(std::polar(map.gamma(), two_pi * j / F));
  std::vector<Real> dist(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const C z = points[i];
    int best = 0;
    for (int j = 1; j < F; ++j) {
      if (std::norm(fine[j] - z) < std::norm(fine[best] - z)) best = j;
    }
    Real theta = two_pi * best / F;
    for (int it = 0; it < 20; ++it) {
      const C w = std::polar(map.gamma(), theta);
      const C d1 = map.derivative(w);
      const C zt = C(0, 1) * w * d1;
      const C ztt = -w * d1 - w * w * map.second_derivative(w);
      const C r = map.evaluate(w) - z;
      const Real g = std::real(std::conj(r) * zt);
      const Real gp = std::norm(zt) + std::real(std::conj(r) * ztt);
      if (!(gp > 0)) break;
      const Real step = std::clamp(g / gp, -two_pi / F, two_pi / F);
      theta -= step;
      if (std::abs(step) < 1e-15) break;
    }
    dist[i] = std::abs(map.evaluate(std::polar(map.gamma(), theta)) - z);
  });
  Real mx = 0;
  for (Real d : dist) mx = std::max(mx, d);
  return mx;
}

}  // namespace npfaber

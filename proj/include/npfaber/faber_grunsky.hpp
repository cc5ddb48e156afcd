#pragma once

// Faber polynomials F_m and Grunsky coefficients c_{m,k} of an exterior map,
//   F_m(Psi(w)) = w^m + sum_k c_{m,k} w^{-k},
// together with mu_{k,m} = sqrt(m/k) c_{k,m} / gamma^{m+k}.
//
// Both recursions run on the unit-capacity rescaling Psi(gamma w)/gamma, for
// which c_{m,k} becomes c_{m,k} / gamma^{m+k}. That keeps every table entry
// bounded (|mu| <= 1) whatever gamma is.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "npfaber/conformal_map.hpp"
#include "npfaber/density.hpp"
#include "npfaber/errors.hpp"
#include "npfaber/types.hpp"

namespace npfaber {

inline constexpr int kDefaultMaxOrder = 512;

/// Monomial coefficients of F_0 ... F_N; row m has m + 1 entries (index = power).
template <typename Real>
struct FaberBasis {
  int order = 0;
  std::vector<std::vector<Complex<Real>>> rows;

  Complex<Real> evaluate(int m, Complex<Real> z) const {
    const auto& p = rows.at(m);
    Complex<Real> acc(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
    return acc;
  }
};

/// Coefficients alpha_0 ... alpha_N of sum alpha_m F_m.
template <typename Real>
struct FaberExpansion {
  std::vector<Complex<Real>> alpha;

  int order() const { return static_cast<int>(alpha.size()) - 1; }
};

/// F_{n+1}(z) = z F_n(z) - sum_{s=0}^{n} a_s F_{n-s}(z) - n a_n, F_0 = 1.
template <typename Real>
FaberBasis<Real> faber_polynomials(const LaurentMap<Real>& map, int N) {
  using C = Complex<Real>;
  if (N < 1) throw ContractError("faber_polynomials: order must be >= 1");
  FaberBasis<Real> basis;
  basis.order = N;
  basis.rows.reserve(N + 1);
  basis.rows.push_back({C(1)});
  for (int n = 0; n < N; ++n) {
    std::vector<C> next(n + 2, C(0));
    const auto& fn = basis.rows[n];
    for (int j = 0; j <= n; ++j) next[j + 1] += fn[j];
    for (int s = 0; s <= std::min(n, map.order()); ++s) {
      const C a = map.coeff(s);
      const auto& f = basis.rows[n - s];
      for (std::size_t j = 0; j < f.size(); ++j) next[j] -= a * f[j];
    }
    next[0] -= Real(n) * map.coeff(n);
    basis.rows.push_back(std::move(next));
  }
  return basis;
}

/// Values of the rescaled Faber polynomials F_m(z) / gamma^m, m = 0..N, and
/// optionally of their derivatives d/dz F_m(z) / gamma^{m-1}, at one point.
/// Uses the three-term-like recursion directly at z, which stays accurate
/// for degrees where the monomial form would cancel catastrophically.
template <typename Real>
void normalized_faber_values(const LaurentMap<Real>& map, std::span<const Complex<Real>> scaled_coeffs,
                             int N, Complex<Real> z, std::span<Complex<Real>> values,
                             std::span<Complex<Real>> derivatives = {}) {
  using C = Complex<Real>;
  const C zeta = (z - map.a0()) / map.gamma();
  const int M = static_cast<int>(scaled_coeffs.size());
  const bool want_d = !derivatives.empty();
  values[0] = C(1);
  if (want_d) derivatives[0] = C(0);
  for (int n = 0; n < N; ++n) {
    C next = zeta * values[n];
    C dnext = want_d ? values[n] + zeta * derivatives[n] : C(0);
    for (int s = 1; s <= std::min(n, M); ++s) {
      next -= scaled_coeffs[s - 1] * values[n - s];
      if (want_d) dnext -= scaled_coeffs[s - 1] * derivatives[n - s];
    }
    if (n >= 1 && n <= M) next -= Real(n) * scaled_coeffs[n - 1];
    values[n + 1] = next;
    if (want_d) derivatives[n + 1] = dnext;
  }
}

template <typename Real>
class GrunskyTable {
 public:
  using Scalar = Complex<Real>;

  GrunskyTable(int order, Real gamma, ComplexMatrix<Real> normalized)
      : order_(order), gamma_(gamma), normalized_(std::move(normalized)), mu_(order, order) {
    for (int k = 1; k <= order_; ++k) {
      for (int m = 1; m <= order_; ++m) {
        mu_(k - 1, m - 1) = std::sqrt(Real(m) / Real(k)) * normalized_(k - 1, m - 1);
      }
    }
  }

  int order() const { return order_; }
  Real gamma() const { return gamma_; }

  /// c_{m,k} / gamma^{m+k}.
  Scalar normalized(int m, int k) const { return normalized_(m - 1, k - 1); }

  /// c_{m,k}; overflows for very large gamma^{m+k}, prefer normalized().
  Scalar c(int m, int k) const { return normalized(m, k) * std::pow(gamma_, Real(m + k)); }

  /// mu_{k,m} = sqrt(m/k) c_{k,m} / gamma^{m+k}.
  Scalar mu(int k, int m) const { return mu_(k - 1, m - 1); }

  const ComplexMatrix<Real>& normalized_matrix() const { return normalized_; }
  const ComplexMatrix<Real>& mu_matrix() const { return mu_; }

 private:
  int order_;
  Real gamma_;
  ComplexMatrix<Real> normalized_;
  ComplexMatrix<Real> mu_;
};

using GrunskyTabled = GrunskyTable<double>;

/// Grunsky coefficients by the recursion
///   c_{m,k+1} = c_{m+1,k} - a_{m+k} + sum_{s=1}^{m-1} a_{m-s} c_{s,k} - sum_{s=1}^{k-1} a_{k-s} c_{m,s},
///   c_{n,1} = n a_n.
/// Column k needs rows up to 2N - k + 1, so the work array is 2N x N.
template <typename Real>
GrunskyTable<Real> grunsky_table(const LaurentMap<Real>& map, int N) {
  using C = Complex<Real>;
  if (N < 1) throw ContractError("grunsky_table: order must be >= 1");
  if (N > kDefaultMaxOrder) throw ContractError("grunsky_table: order exceeds the supported maximum");
  const auto scaled = map.normalized_coeffs();
  const int M = map.order();
  const int R = 2 * N;
  std::vector<C> a(R + 1, C(0));
  for (int j = 1; j <= std::min(M, R); ++j) a[j] = scaled[j - 1];

  ComplexMatrix<Real> work = ComplexMatrix<Real>::Zero(R + 1, N + 1);
  for (int m = 1; m <= R; ++m) work(m, 1) = Real(m) * a[m];
  for (int k = 1; k < N; ++k) {
    for (int m = 1; m <= R - k; ++m) {
      C v = work(m + 1, k) - a[m + k];
      for (int s = std::max(1, m - M); s <= m - 1; ++s) v += a[m - s] * work(s, k);
      for (int s = std::max(1, k - M); s <= k - 1; ++s) v -= a[k - s] * work(m, s);
      work(m, k + 1) = v;
    }
  }
  return GrunskyTable<Real>(N, map.gamma(), work.block(1, 1, N, N));
}

/// Residuals of the identities a Grunsky table must satisfy.
template <typename Real>
struct GrunskyReport {
  Real identity_residual = 0;      // max_{m,k} |k c_{m,k} - m c_{k,m}| relative to the two rows involved
  Real mu_symmetry_residual = 0;   // max |mu_{k,m} - mu_{m,k}|
  Real max_row_norm_squared = 0;   // max_m sum_k |mu_{m,k}|^2
  bool row_bound_holds = true;     // every row norm <= 1 + 1e-10
};

/// The identity k c_{m,k} = m c_{k,m} couples rows m and k; each side is
/// compared against the largest entry of its own row, scaled by its factor.
template <typename Real>
GrunskyReport<Real> grunsky_report(const GrunskyTable<Real>& table) {
  GrunskyReport<Real> r;
  const int N = table.order();
  std::vector<Real> row_max(N + 1, 0);
  for (int m = 1; m <= N; ++m) {
    for (int k = 1; k <= N; ++k) row_max[m] = std::max(row_max[m], std::abs(table.normalized(m, k)));
  }
  for (int m = 1; m <= N; ++m) {
    Real row = 0;
    for (int k = 1; k <= N; ++k) {
      const Real scale = std::max(k * row_max[m], m * row_max[k]);
      const Real diff = std::abs(Real(k) * table.normalized(m, k) - Real(m) * table.normalized(k, m));
      if (scale > 0) r.identity_residual = std::max(r.identity_residual, diff / scale);
      r.mu_symmetry_residual = std::max(r.mu_symmetry_residual, std::abs(table.mu(m, k) - table.mu(k, m)));
      row += std::norm(table.mu(m, k));
    }
    r.max_row_norm_squared = std::max(r.max_row_norm_squared, row);
  }
  r.row_bound_holds = r.max_row_norm_squared <= 1 + Real(1e-10);
  return r;
}

/// Both sides of the strong Grunsky inequality for weights lambda_1..lambda_L:
///   lhs = sum_k k |sum_n c_{n,k} gamma^{-n-k} lambda_n|^2,  rhs = sum_n n |lambda_n|^2.
template <typename Real>
std::pair<Real, Real> strong_grunsky_sides(const GrunskyTable<Real>& table, std::span<const Complex<Real>> lambda) {
  const int L = static_cast<int>(lambda.size());
  if (L > table.order()) throw ContractError("strong_grunsky_sides: more weights than table rows");
  Real lhs = 0;
  Real rhs = 0;
  for (int n = 1; n <= L; ++n) rhs += n * std::norm(lambda[n - 1]);
  for (int k = 1; k <= table.order(); ++k) {
    Complex<Real> s(0);
    for (int n = 1; n <= L; ++n) s += table.normalized(n, k) * lambda[n - 1];
    lhs += k * std::norm(s);
  }
  return {lhs, rhs};
}

/// Expands a polynomial given by monomial coefficients in the Faber basis.
/// F_m is monic, so the change of basis is unit upper triangular.
template <typename Real>
FaberExpansion<Real> poly_to_faber(const FaberBasis<Real>& basis, std::span<const Complex<Real>> poly) {
  std::vector<Complex<Real>> rem(poly.begin(), poly.end());
  while (rem.size() > 1 && rem.back() == Complex<Real>(0)) rem.pop_back();
  if (rem.empty()) rem.push_back(Complex<Real>(0));
  const int deg = static_cast<int>(rem.size()) - 1;
  if (deg > basis.order) throw ContractError("poly_to_faber: degree exceeds Faber basis order");
  FaberExpansion<Real> out;
  out.alpha.assign(deg + 1, Complex<Real>(0));
  for (int m = deg; m >= 0; --m) {
    const Complex<Real> coef = rem[m];
    out.alpha[m] = coef;
    const auto& f = basis.rows[m];
    for (int j = 0; j <= m; ++j) rem[j] -= coef * f[j];
  }
  return out;
}

template <typename Real>
struct NeumannTrace {
  DensityVector<Real> coeffs;  // zeta~ basis
  bool truncation_warning = false;
};

/// zeta~-coefficients of the normal derivative of sum alpha_m F_m on the
/// boundary, from  dF_m/dnu = m gamma^m zeta~_m - sum_k k c_{m,k} gamma^{-k} zeta~_{-k}.
/// The zero mode is exactly zero: every F_m, m >= 1, has zero net flux.
template <typename Real>
NeumannTrace<Real> neumann_trace_coeffs(const GrunskyTable<Real>& table, const FaberExpansion<Real>& expansion) {
  const int N = table.order();
  if (expansion.order() > N) throw ContractError("neumann_trace_coeffs: expansion order exceeds table order");
  NeumannTrace<Real> out{DensityVector<Real>(N, DensityBasis::zeta_tilde), false};
  auto& v = out.coeffs;
  Real gamma_pow = 1;
  for (int m = 1; m <= expansion.order(); ++m) {
    gamma_pow *= table.gamma();
    const Complex<Real> alpha = expansion.alpha[m];
    if (alpha == Complex<Real>(0)) continue;
    v[m] += alpha * (Real(m) * gamma_pow);
    for (int k = 1; k <= N; ++k) v[-k] -= alpha * (gamma_pow * Real(k)) * table.normalized(m, k);
    if (N * std::abs(table.normalized(m, N)) > Real(1e-12) * m) out.truncation_warning = true;
  }
  v.set_zero_mode(Complex<Real>(0));
  return out;
}

}  // namespace npfaber

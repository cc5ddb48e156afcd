#pragma once

// Finite sections P_n K* P_n of the Neumann-Poincare operator in the zeta
// basis. Ordering of rows/columns: zeta_{-n}, ..., zeta_{-1}, zeta_1, ..., zeta_n.
// The zeta_0 channel (eigenvalue 1/2) is carried out of band.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "npfaber/density.hpp"
#include "npfaber/errors.hpp"
#include "npfaber/faber_grunsky.hpp"
#include "npfaber/types.hpp"

namespace npfaber {

template <typename Real>
struct FiniteSection {
  int n = 0;
  ComplexMatrix<Real> mat;
  Real gamma = 1;
};

using FiniteSectiond = FiniteSection<double>;

/// Entry coupling zeta_m to zeta_{-k} is mu_{k,m}/2; the opposite block holds
/// the conjugates. mu is symmetrized on assembly so the result is exactly
/// Hermitian.
template <typename Real>
FiniteSection<Real> assemble_section(const GrunskyTable<Real>& table, int n) {
  if (n < 1 || n > table.order()) throw ContractError("assemble_section: n must be in [1, table order]");
  FiniteSection<Real> s;
  s.n = n;
  s.gamma = table.gamma();
  s.mat = ComplexMatrix<Real>::Zero(2 * n, 2 * n);
  for (int m = 1; m <= n; ++m) {
    for (int k = 1; k <= n; ++k) {
      const Complex<Real> entry = (table.mu(k, m) + table.mu(m, k)) / Real(4);
      s.mat(DensityVector<Real>::index(n, -k), DensityVector<Real>::index(n, m)) = entry;
      s.mat(DensityVector<Real>::index(n, k), DensityVector<Real>::index(n, -m)) = std::conj(entry);
    }
  }
  return s;
}

/// Eigenvalues of the section, ascending.
template <typename Real>
std::vector<Real> spectrum(const FiniteSection<Real>& section) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(section.mat, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw EigensolverError("spectrum: Hermitian eigensolver failed");
  const auto& ev = solver.eigenvalues();
  std::vector<Real> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

/// Positive eigenvalues in descending order (lambda_1^+ >= lambda_2^+ >= ...).
template <typename Real>
std::vector<Real> positive_eigenvalues(const std::vector<Real>& ascending) {
  std::vector<Real> out;
  for (auto it = ascending.rbegin(); it != ascending.rend() && *it > 0; ++it) out.push_back(*it);
  return out;
}

/// 2-norm condition number of (lambda I - mat), from the spectrum.
template <typename Real>
Real resolvent_condition(const FiniteSection<Real>& section, Real lambda) {
  const auto ev = spectrum(section);
  Real lo = std::numeric_limits<Real>::infinity();
  Real hi = 0;
  for (Real e : ev) {
    lo = std::min(lo, std::abs(lambda - e));
    hi = std::max(hi, std::abs(lambda - e));
  }
  if (ev.empty()) return 1;
  return lo > 0 ? hi / lo : std::numeric_limits<Real>::infinity();
}

/// Solves (lambda I - [K*]_n) x = rhs in zeta coefficients. The zero mode,
/// when present, is divided by (lambda - 1/2).
template <typename Real>
DensityVector<Real> solve_resolvent(const FiniteSection<Real>& section, Real lambda, const DensityVector<Real>& rhs) {
  if (rhs.half_order() != section.n) throw ContractError("solve_resolvent: rhs half-order does not match section");
  if (rhs.basis() != DensityBasis::zeta) throw ContractError("solve_resolvent: rhs must be in the zeta basis");
  const auto ev = spectrum(section);
  Real norm = 0;
  Real gap = std::numeric_limits<Real>::infinity();
  Real spread = 0;
  for (Real e : ev) {
    norm = std::max(norm, std::abs(e));
    gap = std::min(gap, std::abs(lambda - e));
    spread = std::max(spread, std::abs(lambda - e));
  }
  const Real scale = std::max(norm, std::abs(lambda));
  if (!ev.empty() && (gap <= Real(1e-14) * scale || spread > Real(1e14) * gap)) {
    throw SingularError("solve_resolvent: lambda lies on the spectrum of the section (resonance)");
  }
  DensityVector<Real> x(section.n, DensityBasis::zeta);
  if (section.n > 0) {
    ComplexMatrix<Real> a = -section.mat;
    a.diagonal().array() += Complex<Real>(lambda);
    x.coeffs() = a.partialPivLu().solve(rhs.coeffs());
  }
  if (rhs.zero_mode()) {
    const Real shift = lambda - Real(0.5);
    if (std::abs(shift) <= Real(1e-14) * std::max(Real(1), std::abs(lambda))) {
      throw SingularError("solve_resolvent: lambda = 1/2 resonates with the zero mode");
    }
    x.set_zero_mode(*rhs.zero_mode() / shift);
  }
  return x;
}

/// Applies the section to a density (zeta basis); the zero mode maps to half itself.
template <typename Real>
DensityVector<Real> apply_section(const FiniteSection<Real>& section, const DensityVector<Real>& x) {
  if (x.half_order() != section.n) throw ContractError("apply_section: half-order mismatch");
  DensityVector<Real> y(section.n, DensityBasis::zeta);
  y.coeffs() = section.mat * x.coeffs();
  if (x.zero_mode()) y.set_zero_mode(*x.zero_mode() / Real(2));
  return y;
}

}  // namespace npfaber

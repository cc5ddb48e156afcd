#pragma once

// Boundary densities in coefficient form over the geometric bases
//   zeta~_m = e^{i m theta} / h,   zeta_m = |m|^{1/2} zeta~_m   (m != 0),
// stored for indices -n..-1, 1..n with the m = 0 mode kept separately.

#include <cmath>
#include <optional>

#include "npfaber/errors.hpp"
#include "npfaber/types.hpp"

namespace npfaber {

enum class DensityBasis { zeta, zeta_tilde };

template <typename Real>
class DensityVector {
 public:
  using Scalar = Complex<Real>;

  DensityVector() = default;
  explicit DensityVector(int n, DensityBasis basis = DensityBasis::zeta)
      : n_(n), basis_(basis), coeffs_(ComplexVector<Real>::Zero(2 * n)) {
    if (n < 0) throw ContractError("DensityVector: negative half-order");
  }

  /// Storage position of signed index m: (-n, ..., -1, 1, ..., n).
  static int index(int n, int m) { return m < 0 ? m + n : m + n - 1; }

  int half_order() const { return n_; }
  DensityBasis basis() const { return basis_; }

  Scalar operator[](int m) const { return coeffs_[index(n_, checked(m))]; }
  Scalar& operator[](int m) { return coeffs_[index(n_, checked(m))]; }

  const ComplexVector<Real>& coeffs() const { return coeffs_; }
  ComplexVector<Real>& coeffs() { return coeffs_; }

  const std::optional<Scalar>& zero_mode() const { return zero_mode_; }
  void set_zero_mode(std::optional<Scalar> z) { zero_mode_ = z; }

  Real norm() const {
    Real s = coeffs_.squaredNorm();
    if (zero_mode_) s += std::norm(*zero_mode_);
    return std::sqrt(s);
  }

  /// Copy restricted (or zero-padded) to half-order m.
  DensityVector resized(int m) const {
    DensityVector out(m, basis_);
    const int common = std::min(m, n_);
    for (int j = 1; j <= common; ++j) {
      out[j] = (*this)[j];
      out[-j] = (*this)[-j];
    }
    out.zero_mode_ = zero_mode_;
    return out;
  }

 private:
  int checked(int m) const {
    if (m == 0 || m > n_ || m < -n_) throw ContractError("DensityVector: index out of range");
    return m;
  }

  int n_ = 0;
  DensityBasis basis_ = DensityBasis::zeta;
  ComplexVector<Real> coeffs_;
  std::optional<Scalar> zero_mode_;
};

using DensityVectord = DensityVector<double>;

/// Converts zeta~ coefficients to zeta coefficients (divides by |m|^{1/2}).
template <typename Real>
DensityVector<Real> to_zeta(const DensityVector<Real>& v) {
  if (v.basis() == DensityBasis::zeta) return v;
  DensityVector<Real> out(v.half_order(), DensityBasis::zeta);
  for (int m = 1; m <= v.half_order(); ++m) {
    const Real s = 1 / std::sqrt(Real(m));
    out[m] = v[m] * s;
    out[-m] = v[-m] * s;
  }
  out.set_zero_mode(v.zero_mode());
  return out;
}

/// Converts zeta coefficients to zeta~ coefficients.
template <typename Real>
DensityVector<Real> to_zeta_tilde(const DensityVector<Real>& v) {
  if (v.basis() == DensityBasis::zeta_tilde) return v;
  DensityVector<Real> out(v.half_order(), DensityBasis::zeta_tilde);
  for (int m = 1; m <= v.half_order(); ++m) {
    const Real s = std::sqrt(Real(m));
    out[m] = v[m] * s;
    out[-m] = v[-m] * s;
  }
  out.set_zero_mode(v.zero_mode());
  return out;
}

// The basis functions satisfy conj(zeta_m) = zeta_{-m}, so the real and
// imaginary parts of a density mix each coefficient with the conjugate of its
// mirror index.

template <typename Real>
DensityVector<Real> real_part(const DensityVector<Real>& v) {
  DensityVector<Real> out(v.half_order(), v.basis());
  for (int m = 1; m <= v.half_order(); ++m) {
    out[m] = (v[m] + std::conj(v[-m])) / Real(2);
    out[-m] = std::conj(out[m]);
  }
  if (v.zero_mode()) out.set_zero_mode(Complex<Real>(v.zero_mode()->real(), 0));
  return out;
}

template <typename Real>
DensityVector<Real> imag_part(const DensityVector<Real>& v) {
  const Complex<Real> half_over_i(0, Real(-0.5));
  DensityVector<Real> out(v.half_order(), v.basis());
  for (int m = 1; m <= v.half_order(); ++m) {
    out[m] = half_over_i * (v[m] - std::conj(v[-m]));
    out[-m] = std::conj(out[m]);
  }
  if (v.zero_mode()) out.set_zero_mode(Complex<Real>(v.zero_mode()->imag(), 0));
  return out;
}

}  // namespace npfaber

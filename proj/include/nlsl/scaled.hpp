#pragma once

#include <cmath>
#include <complex>

namespace nlsl {

using cplx = std::complex<double>;

/// Complex number stored as mantissa * exp(exponent).
///
/// Solutions of the Sturm-Liouville equation grow like exp(|Im rho| x); for
/// large |rho| products of such values leave the double range, so every
/// quantity that may be large travels through this type.
struct Scaled {
  cplx mantissa{0.0, 0.0};
  double exponent = 0.0;

  Scaled() = default;
  Scaled(cplx m, double e = 0.0) : mantissa(m), exponent(e) { normalize(); }  // NOLINT

  void normalize() {
    const double a = std::abs(mantissa);
    if (a == 0.0 || !std::isfinite(a)) {
      if (a == 0.0) exponent = 0.0;
      return;
    }
    const double l = std::log(a);
    mantissa /= a;
    exponent += l;
  }

  bool is_zero() const { return mantissa == cplx{0.0, 0.0}; }

  /// log|value|; -inf for zero.
  double log_abs() const {
    return is_zero() ? -INFINITY : std::log(std::abs(mantissa)) + exponent;
  }

  /// Converts to a plain complex; may overflow to inf.
  cplx value() const { return is_zero() ? cplx{} : mantissa * std::exp(exponent); }

  friend Scaled operator*(const Scaled& a, const Scaled& b) {
    return {a.mantissa * b.mantissa, a.exponent + b.exponent};
  }
  friend Scaled operator/(const Scaled& a, const Scaled& b) {
    return {a.mantissa / b.mantissa, a.exponent - b.exponent};
  }
  friend Scaled operator+(const Scaled& a, const Scaled& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double e = std::max(a.exponent, b.exponent);
    return {a.mantissa * std::exp(a.exponent - e) + b.mantissa * std::exp(b.exponent - e), e};
  }
  friend Scaled operator-(const Scaled& a) { return {-a.mantissa, a.exponent}; }
  friend Scaled operator-(const Scaled& a, const Scaled& b) { return a + (-b); }
};

/// exp(z) without overflow.
inline Scaled scaled_exp(cplx z) { return {std::polar(1.0, z.imag()), z.real()}; }

/// |a - b| / max(|a|, |b|) computed in scaled arithmetic; 0 when both vanish.
inline double relative_difference(const Scaled& a, const Scaled& b) {
  const double la = a.log_abs();
  const double lb = b.log_abs();
  const double top = std::max(la, lb);
  if (!std::isfinite(top)) return 0.0;
  return std::exp((a - b).log_abs() - top);
}

}  // namespace nlsl

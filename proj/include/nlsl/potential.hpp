#pragma once

#include <vector>

#include "nlsl/scaled.hpp"

namespace nlsl {

/// Complex potential q on [0, T].
///
/// Three representations:
///  - grid:      samples at nodes 0 = x_0 < ... < x_n = T, linear in between;
///  - cosine:    sum_k c_k cos(k pi x / T);
///  - piecewise: constant values on the cells cut by interior breakpoints.
/// Evaluation is right-continuous; left_limit gives the other side at a breakpoint.
class Potential {
 public:
  enum class Kind { grid, cosine, piecewise };

  static Potential zero(double T) { return cosine(T, {0.0}); }
  static Potential constant(double T, cplx c) { return cosine(T, {c}); }
  static Potential from_grid(std::vector<double> nodes, std::vector<cplx> values);
  static Potential cosine(double T, std::vector<cplx> coefficients);
  static Potential piecewise(double T, std::vector<double> breakpoints, std::vector<cplx> values);

  Kind kind() const { return kind_; }
  double T() const { return T_; }
  /// Grid nodes / interior breakpoints; empty for cosine.
  const std::vector<double>& nodes() const { return nodes_; }
  /// Grid values, cosine coefficients or cell values.
  const std::vector<cplx>& values() const { return values_; }

  cplx operator()(double x) const;
  cplx left_limit(double x) const;

  /// Points where q loses smoothness; the ODE grid must contain them.
  std::vector<double> breakpoints() const;

  /// x -> q(T - x), same representation.
  Potential reflected() const;
  /// q + c, same representation.
  Potential shifted(cplx c) const;

  /// Same representation with replaced values/coefficients.
  Potential with_values(std::vector<cplx> values) const;

  bool is_real() const;

 private:
  Potential(Kind kind, double T, std::vector<double> nodes, std::vector<cplx> values);
  Kind kind_;
  double T_;
  std::vector<double> nodes_;
  std::vector<cplx> values_;
};

/// max over a uniform sample of |q1 - q2|, including one-sided limits at breakpoints.
double sup_distance(const Potential& a, const Potential& b, int samples = 2001);

}  // namespace nlsl

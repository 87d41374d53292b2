#pragma once

#include <span>
#include <variant>
#include <vector>

#include "nlsl/scaled.hpp"

namespace nlsl {

struct Atom {
  double location;
  cplx weight;
};

/// Piecewise-linear complex density, zero outside [breakpoints.front(), breakpoints.back()].
struct Density {
  std::vector<double> breakpoints;
  std::vector<cplx> values;

  bool empty() const { return breakpoints.empty(); }
  /// Density value at x (0 outside the support).
  cplx operator()(double x) const;
};

/// A function sampled on an increasing grid, optionally with exact derivatives.
struct SampledFunction {
  std::span<const double> grid;
  std::span<const cplx> values;
  std::span<const cplx> derivatives;  // empty when unavailable
};

/// Bounded-variation measure d sigma on [0, T]: a jump at 0, right-continuous atoms
/// in (0, T] and a piecewise-linear density.
class BVMeasure {
 public:
  BVMeasure(double domain_length, cplx jump_at_zero, std::vector<Atom> atoms = {},
            Density density = {});

  static BVMeasure zero(double domain_length) { return BVMeasure(domain_length, 0.0); }

  double domain_length() const { return domain_length_; }
  cplx jump_at_zero() const { return jump_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Density& density() const { return density_; }

  /// Atom locations and density breakpoints, sorted, without 0.
  std::vector<double> breakpoints() const;

  /// Right end of the support beyond t = 0 (0 for a pure jump).
  double support_end() const;

 private:
  double domain_length_;
  cplx jump_;
  std::vector<Atom> atoms_;
  Density density_;
};

/// H f(0) + sum w_i f(t_i) + int f * density dt.
///
/// The density integral is the composite trapezoid rule on f's grid, with the
/// endpoint-derivative (Hermite) correction on intervals where f's derivatives
/// are supplied and the density is linear.
cplx stieltjes_integrate(const SampledFunction& f, const BVMeasure& m);

/// The measure restricted to [0, a].
BVMeasure truncate(const BVMeasure& m, double a);

/// The part of the measure living on (lo, hi]; never carries the jump at 0.
BVMeasure restrict_to(const BVMeasure& m, double lo, double hi);

/// Sum of two measures on the same interval.
BVMeasure merge(const BVMeasure& a, const BVMeasure& b);

double total_variation(const BVMeasure& m);

/// y^(order)(x) for order in {0, 1}.
struct PointEvaluation {
  double x;
  int order;
};

/// A boundary form: either a Stieltjes integral against a BVMeasure or a point evaluation.
class LinearForm {
 public:
  static LinearForm nonlocal(BVMeasure m) { return LinearForm(std::move(m)); }
  static LinearForm point(double x, int order = 0);

  bool is_point() const { return std::holds_alternative<PointEvaluation>(form_); }
  const PointEvaluation& as_point() const { return std::get<PointEvaluation>(form_); }
  const BVMeasure& as_nonlocal() const { return std::get<BVMeasure>(form_); }

  /// The coefficient of y(0); the H_j of the form.
  cplx jump_at_zero() const;

  /// Grid locations the form needs sampled exactly.
  std::vector<double> breakpoints() const;

  /// Order-0 forms as a measure on [0, T]; derivative forms throw InputError.
  BVMeasure to_measure(double domain_length) const;

 private:
  explicit LinearForm(BVMeasure m) : form_(std::move(m)) {}
  explicit LinearForm(PointEvaluation p) : form_(p) {}
  std::variant<BVMeasure, PointEvaluation> form_;
};

}  // namespace nlsl

#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "nlsl/measure.hpp"
#include "nlsl/potential.hpp"
#include "nlsl/scaled.hpp"

namespace nlsl {

/// lambda = rho^2 with Im rho >= 0 (rho > 0 for lambda > 0).
struct SpectralPoint {
  cplx lambda;
  cplx rho;

  static SpectralPoint from_lambda(cplx lambda);
  static SpectralPoint from_rho(cplx rho);
};

/// Step law for the fixed-step integrator: h = min(h_max, phase_step / |rho|).
struct GridOptions {
  double h_max = 2e-3;
  double phase_step = 0.008;
  /// When > 0, used in place of |rho| so that every lambda in a region shares one grid.
  double rho_ref = 0.0;
  std::size_t max_steps = 4'000'000;
};

/// Integration grid with the potential sampled at step starts, midpoints and ends.
struct Discretization {
  std::shared_ptr<const std::vector<double>> nodes;
  std::vector<cplx> q_start;  // right limit at nodes[i]
  std::vector<cplx> q_mid;
  std::vector<cplx> q_end;  // left limit at nodes[i + 1]
  double T = 0.0;

  std::size_t steps() const { return q_mid.size(); }
};

/// Grid covering [0, T] that contains every breakpoint exactly.
Discretization discretize(const Potential& q, std::span<const double> breakpoints, double rho_scale,
                          const GridOptions& options = {});

/// Samples (y, y') of a solution; the true solution is exp(log_scale) * stored values.
struct SolutionTrace {
  std::shared_ptr<const std::vector<double>> grid;
  std::vector<cplx> y;
  std::vector<cplx> dy;
  double log_scale = 0.0;

  std::size_t size() const { return y.size(); }
  const std::vector<double>& nodes() const { return *grid; }
  Scaled value(std::size_t i) const { return {y[i], log_scale}; }
  Scaled derivative(std::size_t i) const { return {dy[i], log_scale}; }
  /// Node index of x, or npos when x is not a grid node.
  std::size_t index_of(double x) const;
  /// (y(x), y'(x)); cubic Hermite interpolation off-grid.
  std::pair<Scaled, Scaled> at(double x, bool* interpolated = nullptr) const;
  SampledFunction sampled() const { return {*grid, y, dy}; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Pair of solutions integrated together, sharing one log_scale.
struct FundamentalSystem {
  SolutionTrace first;
  SolutionTrace second;
};

enum class Endpoint { left, right };

/// Fixed-step RK4 for -y'' + q y = lambda y started at x0 with (y0, y0'), integrated
/// towards the other endpoint.
SolutionTrace integrate_ivp(const Discretization& disc, const SpectralPoint& p, Endpoint x0,
                            cplx y0, cplx dy0);
SolutionTrace integrate_ivp(const Potential& q, const SpectralPoint& p, Endpoint x0, cplx y0,
                            cplx dy0, const GridOptions& options = {});

/// X_1(0)=1, X_1'(0)=0, X_2(0)=0, X_2'(0)=1.
FundamentalSystem fundamental_X(const Discretization& disc, const SpectralPoint& p);
/// Z_1(T)=1, Z_1'(T)=0, Z_2(T)=0, Z_2'(T)=1.
FundamentalSystem fundamental_Z(const Discretization& disc, const SpectralPoint& p);

struct WronskianValue {
  Scaled value;
  bool interpolated = false;
};

/// u v' - u' v at x.
WronskianValue wronskian(const SolutionTrace& u, const SolutionTrace& v, double x);

/// a u + b v on the shared grid.
SolutionTrace combine(const Scaled& a, const SolutionTrace& u, const Scaled& b,
                      const SolutionTrace& v);
/// a u.
SolutionTrace scale(const Scaled& a, const SolutionTrace& u);

/// Applies a boundary form to a solution.
Scaled apply(const LinearForm& form, const SolutionTrace& u);

/// max_i |u_i - v_i| over y and y'/max(1,|rho|) samples, and the matching max |u_i|.
std::pair<Scaled, Scaled> trace_difference(const SolutionTrace& u, const SolutionTrace& v,
                                           double derivative_weight = 1.0);

/// CSV rows: x, Re y, Im y, Re y', Im y', log_scale.
void write_csv(std::ostream& out, const SolutionTrace& u);

}  // namespace nlsl

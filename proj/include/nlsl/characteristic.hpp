#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "nlsl/measure.hpp"
#include "nlsl/ode.hpp"
#include "nlsl/potential.hpp"

namespace nlsl {

/// Potential plus the two boundary forms U1, U2. V1 = y(T), V2 = y'(T) are implicit.
struct ProblemSpec {
  Potential q;
  LinearForm U1;
  LinearForm U2;

  double T() const { return q.T(); }
  cplx H1() const { return U1.jump_at_zero(); }

  /// Checks domain consistency; with require_H1 also that U1 has a nonzero jump at 0.
  void validate(bool require_H1 = false) const;
  /// Locations the grid must contain: T, form atoms and evaluation points.
  std::vector<double> breakpoints() const;
  ProblemSpec with_potential(Potential p) const { return {std::move(p), U1, U2}; }
  /// Real potential and real forms.
  bool is_real() const;
};

enum class CharKind { omega, delta1, delta2, delta11 };
std::string_view to_string(CharKind k);
CharKind char_kind_from_string(std::string_view s);

/// A characteristic-function value with both computation routes.
struct CharValue {
  CharKind which;
  cplx lambda;
  Scaled value;  // the Z-form route
  Scaled det_route;
  Scaled z_route;
};

/// Grid for evaluating spec at p (or at any point when options.rho_ref is set).
Discretization discretize(const ProblemSpec& spec, const SpectralPoint& p,
                          const GridOptions& options = {}, std::span<const double> extra = {});

/// det[Qa(W_k), Qb(W_k)]_{k=1,2} = Qa(W1) Qb(W2) - Qb(W1) Qa(W2).
Scaled form_determinant(const LinearForm& a, const LinearForm& b, const FundamentalSystem& w);

/// Everything computable at one spectral point; fundamental systems are computed lazily
/// and shared between quantities. Not thread-safe; use one per thread.
class Evaluation {
 public:
  Evaluation(ProblemSpec spec, const SpectralPoint& p, const GridOptions& options = {},
             std::vector<double> extra_breakpoints = {});
  Evaluation(ProblemSpec spec, std::shared_ptr<const Discretization> disc, const SpectralPoint& p);

  const ProblemSpec& spec() const { return spec_; }
  const SpectralPoint& point() const { return p_; }
  const Discretization& discretization() const { return *disc_; }

  const FundamentalSystem& X();
  const FundamentalSystem& Z();
  /// first ~ exp(i rho x) integrated from T, second ~ exp(-i rho x) integrated from 0.
  /// Each is computed in its stable direction; used when |Im rho| T is large, where
  /// X-combinations of nonlocal forms cancel.
  const FundamentalSystem& E();
  bool uses_exponential_basis() const;

  Scaled omega();
  /// j in {1, 2}; throws ConsistencyError when the routes disagree beyond 1e-6.
  CharValue delta(int j);
  CharValue delta11();
  CharValue characteristic(CharKind k);

  /// Delta2 / Delta1; PoleError near zeros of Delta1.
  Scaled weyl_M();
  /// Delta1 / Delta11; PoleError near zeros of Delta11.
  Scaled weyl_N();

  SolutionTrace phi();
  SolutionTrace theta();
  SolutionTrace psi();
  SolutionTrace Phi();
  SolutionTrace v1();
  SolutionTrace v2();

  /// log of 1e-10 (1+|lambda|)^(1/2) exp(|Im rho| T), the pole guard threshold.
  double log_pole_guard() const;

 private:
  ProblemSpec spec_;
  SpectralPoint p_;
  std::shared_ptr<const Discretization> disc_;
  std::optional<FundamentalSystem> x_;
  std::optional<FundamentalSystem> z_;
  std::optional<FundamentalSystem> e_;
  std::optional<Scaled> e_wronskian_;

  // Basis for omega, phi, theta and the determinant routes, with its Wronskian.
  std::pair<const FundamentalSystem*, Scaled> basis();
};

cplx omega(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options = {});
CharValue delta_j(const ProblemSpec& spec, int j, const SpectralPoint& p,
                  const GridOptions& options = {});
CharValue delta_11(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options = {});
cplx weyl_M(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options = {});
cplx weyl_N(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options = {});

struct CombinationSolutions {
  SolutionTrace phi, theta, psi, Phi, v1, v2;
};
CombinationSolutions combo_solutions(const ProblemSpec& spec, const SpectralPoint& p,
                                     const GridOptions& options = {});

/// Residuals of the splitting relations between the forms truncated at a and a/2.
struct SplitResidual {
  Scaled delta1_residual;
  Scaled delta11_residual;
  Scaled scale;  // magnitude of the terms involved
};
SplitResidual split_identity_check(const ProblemSpec& spec, double a, const SpectralPoint& p,
                                   const GridOptions& options = {});

/// Collinearity ratio d = phi / theta at a simple zero of omega; infinite when theta = 0.
struct DValue {
  bool infinite = false;
  cplx value{};
  double defect = 0.0;
};

/// Raw fit without the collinearity threshold; used by residual computations.
DValue collinearity_ratio(Evaluation& ev);

/// d_n at each given zero of omega. CollinearityError when the fit defect exceeds 1e-6.
std::vector<DValue> d_sequence(const ProblemSpec& spec, std::span<const cplx> xi,
                               const GridOptions& options = {});

}  // namespace nlsl

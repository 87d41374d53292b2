#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "nlsl/characteristic.hpp"

namespace nlsl {

enum class AsymQuantity { Phi, v1, Delta1, Delta11, varphi, v2 };
std::string_view to_string(AsymQuantity q);
AsymQuantity asym_quantity_from_string(std::string_view s);

/// Leading term of the large-|rho| expansion, for the nu-th derivative (nu in {0, 1}).
/// x is ignored for Delta1 and Delta11. InputError for x outside the validity range or H1 = 0.
Scaled predict(AsymQuantity q, double x, int nu, const SpectralPoint& p, const ProblemSpec& spec);

/// The computed quantity itself (nu-th derivative at x).
Scaled compute(AsymQuantity q, double x, int nu, const SpectralPoint& p, const ProblemSpec& spec,
               const GridOptions& options = {});

/// Growth factor in the O-estimates: |rho|^k |exp(...)| for v1, Phi, varphi, v2.
Scaled bound_factor(AsymQuantity q, double x, int nu, const SpectralPoint& p, double T);

/// Points rho = r exp(i arg) for r in radii.
struct RaySpec {
  enum class Domain { Pi, G } domain = Domain::Pi;
  double delta = 0.1;
  double arg = 1.0471975511965976;  // pi/3
  std::vector<double> radii{5.0, 10.0, 20.0, 40.0, 80.0};
  /// For G: the rho_n = sqrt(lambda_n1) the ray must keep away from.
  std::vector<cplx> reference_rho;

  /// InputError when a point leaves the domain.
  void validate() const;
  std::vector<SpectralPoint> points() const;
};

struct AsymRow {
  double radius = 0.0;
  cplx rho;
  Scaled computed;
  Scaled predicted;
  double rel_error = 0.0;
};

/// Relative errors below this are treated as at the solver's noise floor.
constexpr double kAsymNoiseFloor = 1e-6;

struct AsymReport {
  AsymQuantity quantity = AsymQuantity::Delta1;
  double x = 0.0;
  int nu = 0;
  std::vector<AsymRow> rows;
  /// Each error is below the previous one or below kAsymNoiseFloor.
  bool decreasing = true;
  double final_error = 0.0;
};

AsymReport asym_report(AsymQuantity q, double x, int nu, const RaySpec& rays, const ProblemSpec& spec,
                       const GridOptions& options = {});

struct BoundRow {
  double radius = 0.0;
  cplx rho;
  double ratio = 0.0;  // |computed| / bound_factor
};

struct BoundReport {
  AsymQuantity quantity = AsymQuantity::v1;
  std::vector<BoundRow> rows;
  /// max ratio / ratio at the smallest radius
  double growth = 0.0;
  bool bounded = true;  // growth <= 10
};

/// Boundedness proxy for the O-estimates of v1, Phi, varphi and v2 along a ray.
BoundReport bound_report(AsymQuantity q, double x, int nu, const RaySpec& rays, const ProblemSpec& spec,
                         const GridOptions& options = {});

/// CSV rows: radius, re_rho, im_rho, log_abs_computed, arg_computed, log_abs_predicted,
/// arg_predicted, rel_error.
void write_csv(std::ostream& out, const AsymReport& report);

}  // namespace nlsl

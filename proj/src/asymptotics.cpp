#include "nlsl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "nlsl/errors.hpp"
#include "nlsl/parallel.hpp"

namespace nlsl {

namespace {

constexpr cplx I{0.0, 1.0};

Scaled power(cplx z, int k) {
  Scaled r(1.0);
  for (int i = 0; i < std::abs(k); ++i) r = r * Scaled(z);
  return k < 0 ? Scaled(1.0) / r : r;
}

// Point after which sigma_1 is constant.
double form_support_end(const LinearForm& f) {
  if (f.is_point()) return f.as_point().x;
  return f.as_nonlocal().support_end();
}

void check_nu(int nu) {
  if (nu != 0 && nu != 1) throw InputError("derivative order nu must be 0 or 1");
}

void check_range(AsymQuantity q, double x, double T) {
  const bool ok = [&] {
    switch (q) {
      case AsymQuantity::Phi:
      case AsymQuantity::v1:
      case AsymQuantity::v2:
        return x >= 0.0 && x < T;
      case AsymQuantity::varphi:
        return x > 0.0 && x <= T;
      default:
        return true;
    }
  }();
  if (!ok) throw InputError("x = " + std::to_string(x) + " outside the validity range of " +
                            std::string(to_string(q)));
}

cplx H1_nonzero(const ProblemSpec& spec) {
  const cplx h = spec.H1();
  if (h == cplx(0.0)) throw InputError("leading term needs H1 = U1 jump at 0 to be nonzero");
  return h;
}

std::vector<SpectralPoint> checked_points(const RaySpec& rays) {
  rays.validate();
  return rays.points();
}

}  // namespace

std::string_view to_string(AsymQuantity q) {
  switch (q) {
    case AsymQuantity::Phi: return "Phi";
    case AsymQuantity::v1: return "v1";
    case AsymQuantity::Delta1: return "Delta1";
    case AsymQuantity::Delta11: return "Delta11";
    case AsymQuantity::varphi: return "varphi";
    case AsymQuantity::v2: return "v2";
  }
  return "?";
}

AsymQuantity asym_quantity_from_string(std::string_view s) {
  for (auto q : {AsymQuantity::Phi, AsymQuantity::v1, AsymQuantity::Delta1, AsymQuantity::Delta11,
                 AsymQuantity::varphi, AsymQuantity::v2})
    if (s == to_string(q)) return q;
  throw InputError("unknown quantity '" + std::string(s) + "'");
}

Scaled predict(AsymQuantity q, double x, int nu, const SpectralPoint& p, const ProblemSpec& spec) {
  check_nu(nu);
  const double T = spec.T();
  check_range(q, x, T);
  const cplx rho = p.rho;
  switch (q) {
    case AsymQuantity::Phi:
      return power(I * rho, nu) / Scaled(H1_nonzero(spec)) * scaled_exp(I * rho * x);
    case AsymQuantity::v1:
      return power(I * rho, nu) * Scaled(0.5) * scaled_exp(-I * rho * (T - x));
    case AsymQuantity::Delta1:
      return -Scaled(H1_nonzero(spec)) / Scaled(2.0 * I * rho) * scaled_exp(-I * rho * T);
    case AsymQuantity::Delta11:
      return Scaled(H1_nonzero(spec) / 2.0) * scaled_exp(-I * rho * T);
    case AsymQuantity::varphi:
      return Scaled(H1_nonzero(spec) / 2.0) * power(-I * rho, nu - 1) * scaled_exp(-I * rho * x);
    case AsymQuantity::v2:
      return power(-I * rho, nu - 1) * scaled_exp(I * rho * (T - x));
  }
  return {};
}

Scaled compute(AsymQuantity q, double x, int nu, const SpectralPoint& p, const ProblemSpec& spec,
               const GridOptions& options) {
  check_nu(nu);
  std::vector<double> extra;
  if (x > 0.0 && x < spec.T()) extra.push_back(x);
  Evaluation ev(spec, p, options, extra);
  const auto at = [&](const SolutionTrace& t) {
    const auto [y, dy] = t.at(x);
    return nu == 0 ? y : dy;
  };
  switch (q) {
    case AsymQuantity::Phi: return at(ev.Phi());
    case AsymQuantity::v1: return at(ev.v1());
    case AsymQuantity::Delta1: return ev.delta(1).value;
    case AsymQuantity::Delta11: return ev.delta11().value;
    case AsymQuantity::varphi: return at(ev.phi());
    case AsymQuantity::v2: return at(ev.v2());
  }
  return {};
}

Scaled bound_factor(AsymQuantity q, double x, int nu, const SpectralPoint& p, double T) {
  check_nu(nu);
  const cplx rho = p.rho;
  const double r = std::abs(rho);
  const auto mag = [](cplx z) { return Scaled(1.0, z.real()); };
  switch (q) {
    case AsymQuantity::v1: return power(r, nu) * mag(-I * rho * (T - x));
    case AsymQuantity::Phi: return power(r, nu) * mag(I * rho * x);
    case AsymQuantity::varphi: return power(r, nu - 1) * mag(-I * rho * x);
    case AsymQuantity::v2: return power(r, nu - 1) * mag(I * rho * (T - x));
    default: break;
  }
  throw InputError("no growth estimate for " + std::string(to_string(q)));
}

void RaySpec::validate() const {
  constexpr double pi = std::numbers::pi;
  if (radii.empty()) throw InputError("ray needs at least one radius");
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0.0)
    throw InputError("ray radii must be positive and increasing");
  if (domain == Domain::Pi) {
    if (!(delta > 0.0 && delta < pi / 2)) throw InputError("Pi_delta needs delta in (0, pi/2)");
    if (arg < delta || arg > pi - delta) throw InputError("ray argument outside [delta, pi - delta]");
  } else {
    if (!(delta > 0.0)) throw InputError("G_delta needs delta > 0");
    if (arg < 0.0 || arg > pi) throw InputError("ray argument outside [0, pi]");
    for (const auto& p : points())
      for (cplx rn : reference_rho)
        if (std::abs(p.rho - rn) < delta)
          throw InputError("ray point within delta of a reference rho_n; not in G_delta");
  }
}

std::vector<SpectralPoint> RaySpec::points() const {
  std::vector<SpectralPoint> out;
  for (double r : radii) out.push_back(SpectralPoint::from_rho(std::polar(r, arg)));
  return out;
}

AsymReport asym_report(AsymQuantity q, double x, int nu, const RaySpec& rays, const ProblemSpec& spec,
                       const GridOptions& options) {
  const auto pts = checked_points(rays);
  AsymReport rep{q, x, nu, std::vector<AsymRow>(pts.size()), true, 0.0};
  parallel_for(pts.size(), [&](std::size_t i) {
    AsymRow& row = rep.rows[i];
    row.radius = rays.radii[i];
    row.rho = pts[i].rho;
    row.predicted = predict(q, x, nu, pts[i], spec);
    row.computed = compute(q, x, nu, pts[i], spec, options);
    row.rel_error = std::exp((row.computed - row.predicted).log_abs() - row.predicted.log_abs());
  });
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double e = rep.rows[i].rel_error;
    if (e > rep.rows[i - 1].rel_error && e > kAsymNoiseFloor) rep.decreasing = false;
  }
  rep.final_error = rep.rows.back().rel_error;
  return rep;
}

BoundReport bound_report(AsymQuantity q, double x, int nu, const RaySpec& rays, const ProblemSpec& spec,
                         const GridOptions& options) {
  const double T = spec.T();
  if (!(x > 0.0 && x < T)) throw InputError("growth estimates hold for x in (0, T)");
  if ((q == AsymQuantity::varphi || q == AsymQuantity::v2) && x < 0.5 * form_support_end(spec.U1))
    throw InputError("varphi and v2 estimates need x >= a/2, a the end of the support of sigma_1");
  const auto pts = checked_points(rays);
  BoundReport rep{q, std::vector<BoundRow>(pts.size()), 0.0, true};
  parallel_for(pts.size(), [&](std::size_t i) {
    const Scaled c = compute(q, x, nu, pts[i], spec, options);
    const Scaled b = bound_factor(q, x, nu, pts[i], T);
    rep.rows[i] = {rays.radii[i], pts[i].rho, c.is_zero() ? 0.0 : std::exp(c.log_abs() - b.log_abs())};
  });
  double peak = 0.0;
  for (const auto& r : rep.rows) peak = std::max(peak, r.ratio);
  const double first = rep.rows.front().ratio;
  rep.growth = first > 0.0 ? peak / first : (peak > 0.0 ? INFINITY : 1.0);
  rep.bounded = rep.growth <= 10.0;
  return rep;
}

void write_csv(std::ostream& out, const AsymReport& report) {
  out << "radius,re_rho,im_rho,log_abs_computed,arg_computed,log_abs_predicted,arg_predicted,rel_error\n";
  out.precision(17);
  for (const auto& r : report.rows)
    out << r.radius << ',' << r.rho.real() << ',' << r.rho.imag() << ',' << r.computed.log_abs() << ','
        << std::arg(r.computed.mantissa) << ',' << r.predicted.log_abs() << ','
        << std::arg(r.predicted.mantissa) << ',' << r.rel_error << '\n';
}

}  // namespace nlsl

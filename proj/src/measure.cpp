#include "nlsl/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "nlsl/errors.hpp"

namespace nlsl {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// 8-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 8> kGlNodes = {0.019855071751231856, 0.10166676129318664,
                                            0.2372337950418355,   0.4082826787521751,
                                            0.5917173212478249,   0.7627662049581645,
                                            0.8983332387068134,   0.9801449282487681};
constexpr std::array<double, 8> kGlWeights = {0.05061426814518813, 0.11119051722668724,
                                              0.15685332293894363, 0.18134189168918100,
                                              0.18134189168918100, 0.15685332293894363,
                                              0.11119051722668724, 0.05061426814518813};

// int_{s0}^{s1} |alpha + beta s| ds; smooth on each side of the minimiser of the modulus.
double abs_linear_integral(cplx alpha, cplx beta, double s0, double s1) {
  auto gl = [&](double a, double b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < kGlNodes.size(); ++k)
      acc += kGlWeights[k] * std::abs(alpha + beta * (a + (b - a) * kGlNodes[k]));
    return acc * (b - a);
  };
  const double bb = std::norm(beta);
  if (bb == 0.0) return std::abs(alpha) * (s1 - s0);
  const double smin = -std::real(std::conj(alpha) * beta) / bb;
  if (smin > s0 && smin < s1) return gl(s0, smin) + gl(smin, s1);
  return gl(s0, s1);
}

std::size_t find_node(std::span<const double> grid, double x) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), x);
  if (it == grid.end() || *it != x)
    throw InputError("function not sampled at measure atom t=" + std::to_string(x));
  return static_cast<std::size_t>(it - grid.begin());
}

}  // namespace

cplx Density::operator()(double x) const {
  if (breakpoints.empty() || x < breakpoints.front() || x > breakpoints.back()) return 0.0;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.end()) return values.back();
  const auto k = static_cast<std::size_t>(it - breakpoints.begin());
  const double x0 = breakpoints[k - 1];
  const double x1 = breakpoints[k];
  const double s = (x - x0) / (x1 - x0);
  return values[k - 1] * (1.0 - s) + values[k] * s;
}

BVMeasure::BVMeasure(double domain_length, cplx jump_at_zero, std::vector<Atom> atoms,
                     Density density)
    : domain_length_(domain_length),
      jump_(jump_at_zero),
      atoms_(std::move(atoms)),
      density_(std::move(density)) {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length))
    throw InputError("measure domain length must be positive");
  if (!finite(jump_)) throw InputError("measure jump must be finite");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (a.location == 0.0)
      throw InputError("atom at t=0 is not allowed; mass at 0 belongs to jump_at_zero");
    if (!(a.location > 0.0 && a.location <= domain_length_))
      throw InputError("atom location outside (0, T]");
    if (i > 0 && !(a.location > atoms_[i - 1].location))
      throw InputError("atom locations must be strictly increasing");
    if (!finite(a.weight)) throw InputError("atom weight must be finite");
  }
  const auto& d = density_;
  if (!d.breakpoints.empty()) {
    if (d.breakpoints.size() < 2 || d.breakpoints.size() != d.values.size())
      throw InputError("density needs >= 2 breakpoints and one value per breakpoint");
    if (d.breakpoints.front() < 0.0 || d.breakpoints.back() > domain_length_)
      throw InputError("density breakpoints outside [0, T]");
    for (std::size_t i = 1; i < d.breakpoints.size(); ++i)
      if (!(d.breakpoints[i] > d.breakpoints[i - 1]))
        throw InputError("density breakpoints must be strictly increasing");
    for (const auto& v : d.values)
      if (!finite(v)) throw InputError("density values must be finite");
  } else if (!d.values.empty()) {
    throw InputError("density values without breakpoints");
  }
}

std::vector<double> BVMeasure::breakpoints() const {
  std::vector<double> out;
  for (const auto& a : atoms_) out.push_back(a.location);
  for (double b : density_.breakpoints)
    if (b > 0.0) out.push_back(b);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double BVMeasure::support_end() const {
  double end = 0.0;
  if (!atoms_.empty()) end = atoms_.back().location;
  const auto& d = density_;
  for (std::size_t i = d.breakpoints.size(); i-- > 0;) {
    const bool live = d.values[i] != cplx{} || (i > 0 && d.values[i - 1] != cplx{});
    if (live) {
      end = std::max(end, d.breakpoints[i]);
      break;
    }
  }
  return end;
}

cplx stieltjes_integrate(const SampledFunction& f, const BVMeasure& m) {
  const auto& grid = f.grid;
  if (grid.size() < 2 || f.values.size() != grid.size())
    throw InputError("sampled function needs >= 2 nodes with one value each");
  const double T = m.domain_length();
  if (grid.front() != 0.0 || std::abs(grid.back() - T) > 1e-12 * T)
    throw DomainError("sampled function and measure live on different intervals");
  const bool with_derivs = f.derivatives.size() == grid.size();

  cplx acc = m.jump_at_zero() * f.values[0];
  for (const auto& a : m.atoms()) acc += a.weight * f.values[find_node(grid, a.location)];

  const auto& d = m.density();
  if (d.empty()) return acc;
  const auto lo = std::lower_bound(grid.begin(), grid.end(), d.breakpoints.front());
  std::size_t i = lo == grid.begin() ? 0 : static_cast<std::size_t>(lo - grid.begin()) - 1;
  std::size_t piece = 0;
  for (; i + 1 < grid.size() && grid[i] < d.breakpoints.back(); ++i) {
    const double x0 = std::max(grid[i], d.breakpoints.front());
    const double x1 = std::min(grid[i + 1], d.breakpoints.back());
    if (x1 <= x0) continue;
    while (piece + 2 < d.breakpoints.size() && d.breakpoints[piece + 1] <= x0) ++piece;
    const double h = x1 - x0;
    const cplx d0 = d(x0);
    const cplx d1 = d(x1);
    // Clipped intervals fall back to plain trapezoid with interpolated samples.
    const bool aligned = x0 == grid[i] && x1 == grid[i + 1];
    const cplx f0 = aligned ? f.values[i]
                            : f.values[i] + (f.values[i + 1] - f.values[i]) *
                                                ((x0 - grid[i]) / (grid[i + 1] - grid[i]));
    const cplx f1 = aligned ? f.values[i + 1]
                            : f.values[i] + (f.values[i + 1] - f.values[i]) *
                                                ((x1 - grid[i]) / (grid[i + 1] - grid[i]));
    acc += 0.5 * h * (f0 * d0 + f1 * d1);
    const bool one_piece = d.breakpoints[piece] <= x0 && x1 <= d.breakpoints[piece + 1];
    if (with_derivs && aligned && one_piece) {
      const cplx slope = (d.values[piece + 1] - d.values[piece]) /
                         (d.breakpoints[piece + 1] - d.breakpoints[piece]);
      const cplx g0 = f.derivatives[i] * d0 + f0 * slope;
      const cplx g1 = f.derivatives[i + 1] * d1 + f1 * slope;
      acc += h * h / 12.0 * (g0 - g1);
    }
  }
  return acc;
}

namespace {

Density clip_density(const Density& d, double lo, double hi) {
  Density out;
  if (d.empty() || hi <= d.breakpoints.front() || lo >= d.breakpoints.back()) return out;
  const double a = std::max(lo, d.breakpoints.front());
  const double b = std::min(hi, d.breakpoints.back());
  if (!(b > a)) return out;
  out.breakpoints.push_back(a);
  out.values.push_back(d(a));
  for (std::size_t i = 0; i < d.breakpoints.size(); ++i) {
    if (d.breakpoints[i] > a && d.breakpoints[i] < b) {
      out.breakpoints.push_back(d.breakpoints[i]);
      out.values.push_back(d.values[i]);
    }
  }
  out.breakpoints.push_back(b);
  out.values.push_back(d(b));
  return out;
}

}  // namespace

BVMeasure truncate(const BVMeasure& m, double a) {
  const double T = m.domain_length();
  if (!(a > 0.0 && a <= T)) throw InputError("truncation point must lie in (0, T]");
  if (a == T) return m;
  std::vector<Atom> atoms;
  for (const auto& at : m.atoms())
    if (at.location <= a) atoms.push_back(at);
  return BVMeasure(T, m.jump_at_zero(), std::move(atoms), clip_density(m.density(), 0.0, a));
}

BVMeasure restrict_to(const BVMeasure& m, double lo, double hi) {
  const double T = m.domain_length();
  if (!(lo >= 0.0 && hi <= T && lo < hi)) throw InputError("restriction window must satisfy 0 <= lo < hi <= T");
  std::vector<Atom> atoms;
  for (const auto& at : m.atoms())
    if (at.location > lo && at.location <= hi) atoms.push_back(at);
  return BVMeasure(T, 0.0, std::move(atoms), clip_density(m.density(), lo, hi));
}

BVMeasure merge(const BVMeasure& a, const BVMeasure& b) {
  if (a.domain_length() != b.domain_length())
    throw DomainError("cannot merge measures on different intervals");
  std::vector<Atom> atoms;
  std::size_t i = 0, j = 0;
  const auto& aa = a.atoms();
  const auto& ba = b.atoms();
  while (i < aa.size() || j < ba.size()) {
    if (j == ba.size() || (i < aa.size() && aa[i].location < ba[j].location)) {
      atoms.push_back(aa[i++]);
    } else if (i == aa.size() || ba[j].location < aa[i].location) {
      atoms.push_back(ba[j++]);
    } else {
      atoms.push_back({aa[i].location, aa[i].weight + ba[j].weight});
      ++i;
      ++j;
    }
  }
  Density d;
  std::vector<double> bps = a.density().breakpoints;
  bps.insert(bps.end(), b.density().breakpoints.begin(), b.density().breakpoints.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  // A continuous piecewise-linear density cannot represent an interior drop.
  for (const auto* m : {&a, &b}) {
    const auto& md = m->density();
    if (md.empty()) continue;
    const bool covers = bps.front() >= md.breakpoints.front() && bps.back() <= md.breakpoints.back();
    if (!covers && (md.values.front() != cplx{} || md.values.back() != cplx{}))
      throw InputError("merge requires densities that vanish at the ends of their support");
  }
  for (double x : bps) {
    d.breakpoints.push_back(x);
    d.values.push_back(a.density()(x) + b.density()(x));
  }
  return BVMeasure(a.domain_length(), a.jump_at_zero() + b.jump_at_zero(), std::move(atoms),
                   std::move(d));
}

double total_variation(const BVMeasure& m) {
  double tv = std::abs(m.jump_at_zero());
  for (const auto& a : m.atoms()) tv += std::abs(a.weight);
  const auto& d = m.density();
  for (std::size_t i = 0; i + 1 < d.breakpoints.size(); ++i) {
    const double h = d.breakpoints[i + 1] - d.breakpoints[i];
    tv += h * abs_linear_integral(d.values[i], d.values[i + 1] - d.values[i], 0.0, 1.0);
  }
  return tv;
}

LinearForm LinearForm::point(double x, int order) {
  if (order != 0 && order != 1) throw InputError("point form order must be 0 or 1");
  if (!std::isfinite(x) || x < 0.0) throw InputError("point form location must be finite and >= 0");
  return LinearForm(PointEvaluation{x, order});
}

cplx LinearForm::jump_at_zero() const {
  if (is_point()) {
    const auto& p = as_point();
    return (p.x == 0.0 && p.order == 0) ? cplx{1.0, 0.0} : cplx{};
  }
  return as_nonlocal().jump_at_zero();
}

std::vector<double> LinearForm::breakpoints() const {
  if (is_point()) return {as_point().x};
  return as_nonlocal().breakpoints();
}

BVMeasure LinearForm::to_measure(double domain_length) const {
  if (!is_point()) return as_nonlocal();
  const auto& p = as_point();
  if (p.order != 0) throw InputError("derivative point forms have no measure representation");
  if (p.x == 0.0) return BVMeasure(domain_length, 1.0);
  return BVMeasure(domain_length, 0.0, {Atom{p.x, 1.0}});
}

}  // namespace nlsl

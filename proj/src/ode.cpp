#include "nlsl/ode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nlsl/errors.hpp"

namespace nlsl {

namespace {

constexpr double kRescaleThreshold = 1e8;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct State {
  cplx y, dy;
};

// One classical RK4 step of y' = dy, dy' = (q - lambda) y with a = q - lambda sampled at
// the step start, midpoint and end.
inline State rk4_step(State s, cplx a0, cplx am, cplx a1, double h) {
  const cplx k1y = s.dy, k1z = a0 * s.y;
  const cplx y2 = s.y + 0.5 * h * k1y, z2 = s.dy + 0.5 * h * k1z;
  const cplx k2y = z2, k2z = am * y2;
  const cplx y3 = s.y + 0.5 * h * k2y, z3 = s.dy + 0.5 * h * k2z;
  const cplx k3y = z3, k3z = am * y3;
  const cplx y4 = s.y + h * k3y, z4 = s.dy + h * k3z;
  const cplx k4y = z4, k4z = a1 * y4;
  return {s.y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
          s.dy + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)};
}

// Integrates one or two solutions from the chosen endpoint. Both share rescaling.
std::vector<SolutionTrace> integrate(const Discretization& disc, const SpectralPoint& p,
                                     Endpoint from, std::span<const State> initial) {
  const auto& x = *disc.nodes;
  const std::size_t n = x.size();
  const std::size_t m = initial.size();
  if (!finite(p.lambda)) throw InputError("spectral parameter must be finite");
  for (const auto& s : initial)
    if (!finite(s.y) || !finite(s.dy)) throw InputError("initial data must be finite");

  std::vector<std::vector<State>> vals(m, std::vector<State>(n));
  std::vector<double> node_scale(n, 0.0);
  const double dnorm = 1.0 / std::max(1.0, std::abs(p.rho));
  double running = 0.0;

  std::vector<State> cur(initial.begin(), initial.end());
  auto store = [&](std::size_t i) {
    double big = 0.0;
    for (const auto& s : cur) big = std::max({big, std::abs(s.y), std::abs(s.dy) * dnorm});
    if (!std::isfinite(big)) throw RangeError("solution overflow during integration");
    if (big > kRescaleThreshold) {
      for (auto& s : cur) {
        s.y /= big;
        s.dy /= big;
      }
      running += std::log(big);
    }
    for (std::size_t k = 0; k < m; ++k) vals[k][i] = cur[k];
    node_scale[i] = running;
  };

  if (from == Endpoint::left) {
    store(0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = x[i + 1] - x[i];
      for (auto& s : cur)
        s = rk4_step(s, disc.q_start[i] - p.lambda, disc.q_mid[i] - p.lambda,
                     disc.q_end[i] - p.lambda, h);
      store(i + 1);
    }
  } else {
    store(n - 1);
    for (std::size_t i = n - 1; i-- > 0;) {
      const double h = x[i] - x[i + 1];
      for (auto& s : cur)
        s = rk4_step(s, disc.q_end[i] - p.lambda, disc.q_mid[i] - p.lambda,
                     disc.q_start[i] - p.lambda, h);
      store(i);
    }
  }

  std::vector<SolutionTrace> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    auto& t = out[k];
    t.grid = disc.nodes;
    t.log_scale = running;
    t.y.resize(n);
    t.dy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = node_scale[i] == running ? 1.0 : std::exp(node_scale[i] - running);
      t.y[i] = vals[k][i].y * f;
      t.dy[i] = vals[k][i].dy * f;
    }
  }
  return out;
}

}  // namespace

SpectralPoint SpectralPoint::from_lambda(cplx lambda) {
  cplx rho = std::sqrt(lambda);
  // The principal root has Re >= 0; lambda < 0 with a signed -0.0 imaginary part lands
  // on -i|lambda|^(1/2) and is flipped like any other lower half-plane root.
  if (rho.imag() < 0.0) rho = -rho;
  return {lambda, rho};
}

SpectralPoint SpectralPoint::from_rho(cplx rho) {
  if (rho.imag() < 0.0 || (rho.imag() == 0.0 && rho.real() < 0.0)) rho = -rho;
  return {rho * rho, rho};
}

Discretization discretize(const Potential& q, std::span<const double> breakpoints, double rho_scale,
                          const GridOptions& options) {
  const double T = q.T();
  if (!(options.h_max > 0.0) || !(options.phase_step > 0.0))
    throw InputError("grid options must be positive");
  if (!std::isfinite(rho_scale)) throw InputError("non-finite rho scale");
  double h = options.h_max;
  const double rs = options.rho_ref > 0.0 ? options.rho_ref : rho_scale;
  if (rs > 0.0) h = std::min(h, options.phase_step / rs);

  std::vector<double> cuts{0.0, T};
  for (double b : breakpoints) {
    if (b < 0.0 || b > T * (1.0 + 1e-14)) throw DomainError("breakpoint outside [0, T]");
    cuts.push_back(std::min(b, T));
  }
  for (double b : q.breakpoints()) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += static_cast<std::size_t>(std::ceil((cuts[i + 1] - cuts[i]) / h));
  if (total > options.max_steps)
    throw RangeError("|rho| T too large for the step budget");

  auto nodes = std::make_shared<std::vector<double>>();
  nodes->reserve(total + 1);
  nodes->push_back(0.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / h)));
    for (std::size_t j = 1; j < k; ++j) nodes->push_back(a + (b - a) * static_cast<double>(j) / k);
    nodes->push_back(b);
  }

  Discretization d;
  d.T = T;
  const std::size_t steps = nodes->size() - 1;
  d.q_start.resize(steps);
  d.q_mid.resize(steps);
  d.q_end.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double a = (*nodes)[i], b = (*nodes)[i + 1];
    d.q_start[i] = q(a);
    d.q_mid[i] = q(0.5 * (a + b));
    d.q_end[i] = q.left_limit(b);
  }
  d.nodes = std::move(nodes);
  return d;
}

std::size_t SolutionTrace::index_of(double x) const {
  const auto& g = *grid;
  const auto it = std::lower_bound(g.begin(), g.end(), x);
  if (it != g.end() && *it == x) return static_cast<std::size_t>(it - g.begin());
  return npos;
}

std::pair<Scaled, Scaled> SolutionTrace::at(double x, bool* interpolated) const {
  const auto& g = *grid;
  if (x < g.front() || x > g.back()) throw DomainError("evaluation point outside [0, T]");
  const std::size_t i = index_of(x);
  if (interpolated) *interpolated = i == npos;
  if (i != npos) return {value(i), derivative(i)};
  const auto it = std::upper_bound(g.begin(), g.end(), x);
  const auto k = static_cast<std::size_t>(it - g.begin()) - 1;
  const double h = g[k + 1] - g[k];
  const double s = (x - g[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const cplx yv = h00 * y[k] + h10 * h * dy[k] + h01 * y[k + 1] + h11 * h * dy[k + 1];
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
  const cplx dv = (d00 * y[k] + d01 * y[k + 1]) / h + d10 * dy[k] + d11 * dy[k + 1];
  return {Scaled(yv, log_scale), Scaled(dv, log_scale)};
}

SolutionTrace integrate_ivp(const Discretization& disc, const SpectralPoint& p, Endpoint x0,
                            cplx y0, cplx dy0) {
  const State s{y0, dy0};
  return std::move(integrate(disc, p, x0, std::span<const State>(&s, 1))[0]);
}

SolutionTrace integrate_ivp(const Potential& q, const SpectralPoint& p, Endpoint x0, cplx y0,
                            cplx dy0, const GridOptions& options) {
  const auto disc = discretize(q, {}, std::abs(p.rho), options);
  return integrate_ivp(disc, p, x0, y0, dy0);
}

FundamentalSystem fundamental_X(const Discretization& disc, const SpectralPoint& p) {
  const State init[2] = {{1.0, 0.0}, {0.0, 1.0}};
  auto t = integrate(disc, p, Endpoint::left, init);
  return {std::move(t[0]), std::move(t[1])};
}

FundamentalSystem fundamental_Z(const Discretization& disc, const SpectralPoint& p) {
  const State init[2] = {{1.0, 0.0}, {0.0, 1.0}};
  auto t = integrate(disc, p, Endpoint::right, init);
  return {std::move(t[0]), std::move(t[1])};
}

WronskianValue wronskian(const SolutionTrace& u, const SolutionTrace& v, double x) {
  bool iu = false, iv = false;
  const auto [uy, udy] = u.at(x, &iu);
  const auto [vy, vdy] = v.at(x, &iv);
  return {uy * vdy - udy * vy, iu || iv};
}

namespace {

void renormalize(SolutionTrace& t) {
  double big = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) big = std::max({big, std::abs(t.y[i]), std::abs(t.dy[i])});
  if (big == 0.0 || !std::isfinite(big)) return;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.y[i] /= big;
    t.dy[i] /= big;
  }
  t.log_scale += std::log(big);
}

}  // namespace

SolutionTrace combine(const Scaled& a, const SolutionTrace& u, const Scaled& b,
                      const SolutionTrace& v) {
  if (u.grid != v.grid && *u.grid != *v.grid) throw DomainError("traces on different grids");
  const double ea = a.is_zero() ? -INFINITY : a.exponent + u.log_scale;
  const double eb = b.is_zero() ? -INFINITY : b.exponent + v.log_scale;
  double s = std::max(ea, eb);
  if (!std::isfinite(s)) s = 0.0;
  const cplx ca = a.is_zero() ? cplx{} : a.mantissa * std::exp(ea - s);
  const cplx cb = b.is_zero() ? cplx{} : b.mantissa * std::exp(eb - s);
  SolutionTrace out;
  out.grid = u.grid;
  out.log_scale = s;
  out.y.resize(u.size());
  out.dy.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.y[i] = ca * u.y[i] + cb * v.y[i];
    out.dy[i] = ca * u.dy[i] + cb * v.dy[i];
  }
  renormalize(out);
  return out;
}

SolutionTrace scale(const Scaled& a, const SolutionTrace& u) {
  SolutionTrace out = u;
  for (auto& z : out.y) z *= a.mantissa;
  for (auto& z : out.dy) z *= a.mantissa;
  out.log_scale += a.exponent;
  return out;
}

Scaled apply(const LinearForm& form, const SolutionTrace& u) {
  if (form.is_point()) {
    const auto& p = form.as_point();
    const auto [yv, dv] = u.at(p.x);
    return p.order == 0 ? yv : dv;
  }
  return {stieltjes_integrate(u.sampled(), form.as_nonlocal()), u.log_scale};
}

std::pair<Scaled, Scaled> trace_difference(const SolutionTrace& u, const SolutionTrace& v,
                                           double derivative_weight) {
  if (u.size() != v.size()) throw DomainError("traces on different grids");
  const double s = std::max(u.log_scale, v.log_scale);
  const double fu = std::exp(u.log_scale - s), fv = std::exp(v.log_scale - s);
  double diff = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    diff = std::max(diff, std::abs(fu * u.y[i] - fv * v.y[i]));
    diff = std::max(diff, derivative_weight * std::abs(fu * u.dy[i] - fv * v.dy[i]));
    mag = std::max({mag, std::abs(fu * u.y[i]), derivative_weight * std::abs(fu * u.dy[i])});
  }
  return {Scaled(diff, s), Scaled(mag, s)};
}

void write_csv(std::ostream& out, const SolutionTrace& u) {
  out << "x,re_y,im_y,re_dy,im_dy,log_scale\n";
  out.precision(17);
  for (std::size_t i = 0; i < u.size(); ++i)
    out << (*u.grid)[i] << ',' << u.y[i].real() << ',' << u.y[i].imag() << ',' << u.dy[i].real()
        << ',' << u.dy[i].imag() << ',' << u.log_scale << '\n';
}

}  // namespace nlsl

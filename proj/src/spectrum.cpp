#include "nlsl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlsl/errors.hpp"

namespace nlsl {

namespace {

constexpr double kPi = std::numbers::pi;

// |f| on the contour relative to this fraction of its median triggers a nudge.
constexpr double kDipRatio = 1e-3;
constexpr int kMaxNudges = 5;
constexpr int kMaxSegmentRefinements = 40;

struct ContourResult {
  int winding = 0;
  bool dip = false;
};

double edge_samples(cplx a, cplx b, double T, double sample_phase) {
  // rho T advances by about |d lambda| T / (2 |rho|) along the edge.
  constexpr int kPieces = 16;
  double phase = 0.0;
  for (int k = 0; k < kPieces; ++k) {
    const cplx mid = a + (b - a) * ((k + 0.5) / kPieces);
    const double r = std::max(std::sqrt(std::abs(mid)), 0.5);
    phase += std::abs(b - a) / kPieces * T / (2.0 * r);
  }
  return std::max(4.0, std::ceil(phase / sample_phase));
}

// Walks the boundary counterclockwise, accumulating arg f with adaptive refinement.
ContourResult trace_contour(const CharFunction& f, const SearchBox& box) {
  if (box.empty()) return {};
  const double T = f.spec().T();
  const cplx corners[4] = {{box.re_min, box.im_min},
                           {box.re_max, box.im_min},
                           {box.re_max, box.im_max},
                           {box.re_min, box.im_max}};
  const double min_seg = 1e-13 * (1.0 + std::abs(box.center()) + box.width() + box.height());

  double total_phase = 0.0;
  std::vector<double> normalized;  // log |f| - |Im rho| T at each accepted sample
  const auto record = [&](cplx z, const Scaled& v) {
    if (v.is_zero()) throw ContourError("characteristic function vanishes on the contour");
    normalized.push_back(v.log_abs() - std::abs(SpectralPoint::from_lambda(z).rho.imag()) * T);
  };

  // Phase change from (za, fa) to (zb, fb), bisecting until each step is below pi/2.
  const auto segment = [&](auto&& self, cplx za, const Scaled& fa, cplx zb, const Scaled& fb,
                           int depth) -> double {
    const double d = std::arg(fb.mantissa / fa.mantissa);
    if (std::abs(d) <= kPi / 2) return d;
    if (depth >= kMaxSegmentRefinements || std::abs(zb - za) < min_seg)
      throw ContourError("phase step above pi/2 after refinement; a zero is too close to the contour");
    const cplx zm = 0.5 * (za + zb);
    const Scaled fm = f(zm);
    record(zm, fm);
    return self(self, za, fa, zm, fm, depth + 1) + self(self, zm, fm, zb, fb, depth + 1);
  };

  Scaled f_prev = f(corners[0]);
  record(corners[0], f_prev);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 4];
    const int n = static_cast<int>(edge_samples(a, b, T, box.sample_phase));
    cplx z_prev = a;
    for (int k = 1; k <= n; ++k) {
      const cplx z = (k == n) ? b : a + (b - a) * (static_cast<double>(k) / n);
      const Scaled fz = f(z);
      if (!(e == 3 && k == n)) record(z, fz);
      total_phase += segment(segment, z_prev, f_prev, z, fz, 0);
      z_prev = z;
      f_prev = fz;
    }
  }

  const double turns = total_phase / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1)
    throw ContourError("winding number is not close to an integer");

  std::vector<double> sorted = normalized;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double lowest = *std::min_element(normalized.begin(), normalized.end());
  return {static_cast<int>(rounded), lowest < median + std::log(kDipRatio)};
}

// Nudges the box outwards while the contour passes close to a zero.
std::pair<ContourResult, SearchBox> settle_box(const CharFunction& f, const SearchBox& box) {
  SearchBox current = box;
  std::optional<std::pair<ContourResult, SearchBox>> first_ok;
  for (int attempt = 0; attempt <= kMaxNudges; ++attempt) {
    try {
      const ContourResult r = trace_contour(f, current);
      if (!r.dip) return {r, current};
      if (!first_ok) first_ok.emplace(r, current);
    } catch (const ContourError&) {
      if (attempt == kMaxNudges && !first_ok) throw;
    }
    current = current.inflated(0.01);
  }
  return *first_ok;
}

struct Finder {
  const CharFunction& f;
  SpectrumOptions options;
  std::vector<Eigenvalue> found;

  std::optional<cplx> newton(cplx z, const SearchBox& box) const {
    const SearchBox region = box.inflated(0.05);
    double step_size = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
      const Scaled fz = f(z);
      if (fz.is_zero()) return z;
      const Scaled dz = f.derivative(z);
      if (dz.is_zero()) return std::nullopt;
      const cplx step = (fz / dz).value();
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !region.contains(z))
        return std::nullopt;
      const double s = std::abs(step);
      if (s <= 1e-14 * (1.0 + std::abs(z))) break;
      // Stagnation at the noise floor.
      if (it > 8 && s >= step_size) break;
      step_size = s;
    }
    const double log_f = f(z).log_abs();
    if (log_f > std::log(options.tol) + log_modulus_scale(z, f.spec().T())) return std::nullopt;
    return z;
  }

  std::vector<SearchBox> split(const SearchBox& b, double fraction) const {
    const double aspect = b.width() / b.height();
    const double xs = b.re_min + fraction * b.width();
    const double ys = b.im_min + fraction * b.height();
    SearchBox lo = b, hi = b;
    if (aspect > 2.0) {
      lo.re_max = hi.re_min = xs;
      return {lo, hi};
    }
    if (aspect < 0.5) {
      lo.im_max = hi.im_min = ys;
      return {lo, hi};
    }
    SearchBox q[4] = {b, b, b, b};
    q[0].re_max = q[2].re_max = xs;
    q[1].re_min = q[3].re_min = xs;
    q[0].im_max = q[1].im_max = ys;
    q[2].im_min = q[3].im_min = ys;
    return {q[0], q[1], q[2], q[3]};
  }

  void solve(const SearchBox& box, int n, int depth) {
    if (n <= 0) return;
    if (n == 1) {
      if (auto z = newton(box.center(), box); z && box.contains(*z)) {
        found.push_back({*z, 1});
        return;
      }
    }
    if (depth >= box.max_depth) {
      const auto z = newton(box.center(), box);
      found.push_back({z ? *z : box.center(), n});
      return;
    }

    // Children must account for the parent's winding number; the split line is moved
    // when it runs through a zero.
    std::optional<std::vector<std::pair<SearchBox, int>>> fallback;
    for (double fraction : {0.5, 0.42, 0.58, 0.35, 0.65}) {
      std::vector<std::pair<SearchBox, int>> kids;
      bool dip = false;
      int sum = 0;
      try {
        for (const auto& child : split(box, fraction)) {
          const ContourResult r = trace_contour(f, child);
          dip = dip || r.dip;
          sum += r.winding;
          kids.emplace_back(child, r.winding);
        }
      } catch (const ContourError&) {
        continue;
      }
      if (sum != n) continue;
      if (!dip) {
        fallback = std::move(kids);
        break;
      }
      if (!fallback) fallback = std::move(kids);
    }
    if (!fallback) throw ContourError("sub-box winding numbers do not add up to the parent's");
    for (const auto& [child, k] : *fallback) solve(child, k, depth + 1);
  }
};

Spectrum real_fast_path(const CharFunction& f, const SearchBox& box, const SpectrumOptions&) {
  if (!f.spec().is_real())
    throw InputError("real fast path requires a real potential and real boundary forms");
  Spectrum s;
  s.source = f.which();
  s.box = box;
  if (box.empty() || box.im_min > 0.0 || box.im_max < 0.0) return s;
  const double T = f.spec().T();
  // Real-valued on the real axis; divide out the growth for lambda < 0.
  const auto g = [&](double x) {
    const cplx rho = SpectralPoint::from_lambda(x).rho;
    return (f(x) / Scaled(1.0, std::abs(rho.imag()) * T)).value().real();
  };
  const int n = static_cast<int>(edge_samples(box.re_min, box.re_max, T, box.sample_phase));
  double xa = box.re_min, ga = g(xa);
  for (int k = 1; k <= n; ++k) {
    const double xb = box.re_min + box.width() * k / n;
    const double gb = g(xb);
    if (ga == 0.0 && k > 1) s.entries.push_back({xa, 1});
    if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) {
      // Illinois false position.
      double lo = xa, hi = xb, glo = ga, ghi = gb;
      int side = 0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double x = (lo * ghi - hi * glo) / (ghi - glo);
        const double gx = g(x);
        if (gx == 0.0) {
          lo = hi = x;
          break;
        }
        if ((gx < 0.0) == (glo < 0.0)) {
          lo = x;
          glo = gx;
          if (side == -1) ghi *= 0.5;
          side = -1;
        } else {
          hi = x;
          ghi = gx;
          if (side == 1) glo *= 0.5;
          side = 1;
        }
      }
      s.entries.push_back({0.5 * (lo + hi), 1});
    }
    xa = xb;
    ga = gb;
  }
  s.winding_total = static_cast<int>(s.entries.size());
  return s;
}

}  // namespace

bool SearchBox::contains(cplx z, double margin) const {
  return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
         z.imag() <= im_max + margin;
}

SearchBox SearchBox::inflated(double fraction) const {
  SearchBox b = *this;
  const double dx = fraction * width(), dy = fraction * height();
  b.re_min -= dx;
  b.re_max += dx;
  b.im_min -= dy;
  b.im_max += dy;
  return b;
}

double SearchBox::rho_max() const {
  double r = 0.0;
  for (double x : {re_min, re_max})
    for (double y : {im_min, im_max}) r = std::max(r, std::sqrt(std::abs(cplx(x, y))));
  return r;
}

CharFunction::CharFunction(ProblemSpec spec, CharKind which, double rho_ref, GridOptions options)
    : spec_(std::move(spec)), which_(which), rho_ref_(std::max(rho_ref, 1.0)) {
  spec_.validate();
  options.rho_ref = rho_ref_;
  disc_ = std::make_shared<const Discretization>(
      discretize(spec_, SpectralPoint::from_rho(rho_ref_), options));
}

Scaled CharFunction::operator()(cplx lambda) const {
  const std::pair<double, double> key{lambda.real(), lambda.imag()};
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const auto p = SpectralPoint::from_lambda(lambda);
  Scaled v;
  switch (which_) {
    case CharKind::omega:
      v = Evaluation(spec_, disc_, p).omega();
      break;
    case CharKind::delta1:
      v = -apply(spec_.U1, integrate_ivp(*disc_, p, Endpoint::right, 0.0, 1.0));
      break;
    case CharKind::delta2:
      v = -apply(spec_.U2, integrate_ivp(*disc_, p, Endpoint::right, 0.0, 1.0));
      break;
    case CharKind::delta11:
      v = apply(spec_.U1, integrate_ivp(*disc_, p, Endpoint::right, 1.0, 0.0));
      break;
  }
  std::lock_guard lock(mutex_);
  cache_.emplace(key, v);
  return v;
}

Scaled CharFunction::derivative(cplx lambda) const {
  const double h = 1e-6 * (1.0 + std::abs(lambda));
  return ((*this)(lambda + h) - (*this)(lambda - h)) / Scaled(2.0 * h);
}

std::size_t CharFunction::evaluations() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

double log_modulus_scale(cplx lambda, double T) {
  return 0.5 * std::log1p(std::abs(lambda)) +
         std::abs(SpectralPoint::from_lambda(lambda).rho.imag()) * T;
}

std::vector<cplx> Spectrum::values() const {
  std::vector<cplx> v;
  for (const auto& e : entries) v.insert(v.end(), e.multiplicity, e.lambda);
  return v;
}

int count_zeros(const CharFunction& f, const SearchBox& box) {
  return settle_box(f, box).first.winding;
}

Spectrum find_spectrum(const CharFunction& f, const SearchBox& box, const SpectrumOptions& options) {
  Spectrum s;
  if (options.real_fast_path) {
    s = real_fast_path(f, box, options);
  } else {
    s.source = f.which();
    s.box = box;
    if (!box.empty()) {
      const auto [outer, settled] = settle_box(f, box);
      s.box = settled;
      s.winding_total = outer.winding;
      Finder finder{f, options, {}};
      finder.solve(settled, outer.winding, 0);
      s.entries = std::move(finder.found);
    }
  }
  std::sort(s.entries.begin(), s.entries.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return s;
}

Spectrum find_spectrum(const ProblemSpec& spec, CharKind which, const SearchBox& box,
                       const SpectrumOptions& options, const GridOptions& grid) {
  const CharFunction f(spec, which, box.inflated(0.1).rho_max(), grid);
  return find_spectrum(f, box, options);
}

bool is_self_adjoint(const ProblemSpec& spec) {
  const auto point = [](const LinearForm& f) { return f.is_point() && f.as_point().order <= 1; };
  return spec.q.is_real() && point(spec.U1) && point(spec.U2);
}

Spectrum first_zeros(const ProblemSpec& spec, CharKind which, int count, const GridOptions& grid) {
  if (count <= 0) throw InputError("count must be positive");
  const double T = spec.T();
  double sup_q = 0.0, sup_im = 0.0;
  for (int i = 0; i <= 256; ++i) {
    const cplx v = spec.q(T * i / 256.0);
    sup_q = std::max(sup_q, std::abs(v));
    sup_im = std::max(sup_im, std::abs(v.imag()));
  }
  const bool sa = is_self_adjoint(spec);
  SpectrumOptions opts;
  opts.real_fast_path = sa;
  // Desk-scale search region: nothing below -(sup|q| + 10), growing to the right.
  SearchBox box;
  box.re_min = -(sup_q + 10.0);
  double hi = std::max(20.0, (count + 2.0) * (count + 2.0) * (kPi / T) * (kPi / T));
  for (int attempt = 0; attempt < 10; ++attempt, hi *= 2.0) {
    box.re_max = hi;
    const double h = sa ? 1.0 : std::max(2.0 + sup_im, 0.05 * hi);
    box.im_min = -h;
    box.im_max = h;
    Spectrum s = find_spectrum(spec, which, box, opts, grid);
    int total = 0;
    std::size_t keep = 0;
    while (keep < s.entries.size() && total < count) total += s.entries[keep++].multiplicity;
    if (total >= count && keep < s.entries.size()) {
      s.entries.resize(keep);
      return s;
    }
  }
  throw RangeError("could not locate the requested number of zeros");
}

SeparationReport separation(std::span<const cplx> a, std::span<const cplx> b, double separation_tol) {
  SeparationReport r;
  r.min_gap = std::numeric_limits<double>::infinity();
  for (cplx x : a)
    for (cplx y : b)
      if (const double d = std::abs(x - y); d < r.min_gap) {
        r.min_gap = d;
        r.closest = std::make_pair(x, y);
      }
  r.holds = r.min_gap > separation_tol;
  return r;
}

SeparationReport condition_S(const ProblemSpec& spec, const SearchBox& box, double separation_tol,
                             const GridOptions& grid) {
  if (box.empty()) {
    SeparationReport r;
    r.min_gap = std::numeric_limits<double>::infinity();
    return r;
  }
  SpectrumOptions opts;
  opts.real_fast_path = is_self_adjoint(spec);
  const auto l1 = find_spectrum(spec, CharKind::delta1, box, opts, grid).values();
  const auto xi = find_spectrum(spec, CharKind::omega, box, opts, grid).values();
  return separation(l1, xi, separation_tol);
}

}  // namespace nlsl

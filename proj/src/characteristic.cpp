#include "nlsl/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsl/errors.hpp"

namespace nlsl {

namespace {

constexpr double kRouteTolerance = 1e-6;
// |Im rho| T above which the exponential basis replaces X.
constexpr double kExponentialBasisThreshold = 2.0;
constexpr double kVanishTolerance = 1e-7;
constexpr double kCollinearityTolerance = 1e-6;

LinearForm end_form(double T, int order) { return LinearForm::point(T, order); }

bool form_is_real(const LinearForm& f) {
  if (f.is_point()) return true;
  const auto& m = f.as_nonlocal();
  if (m.jump_at_zero().imag() != 0.0) return false;
  for (const auto& a : m.atoms())
    if (a.weight.imag() != 0.0) return false;
  for (const auto& v : m.density().values)
    if (v.imag() != 0.0) return false;
  return true;
}

void check_form_domain(const LinearForm& f, double T, const char* name) {
  if (f.is_point()) {
    const auto& p = f.as_point();
    if (p.x < 0.0 || p.x > T) throw DomainError(std::string(name) + " evaluation point outside [0, T]");
  } else if (f.as_nonlocal().domain_length() != T) {
    throw DomainError(std::string(name) + " measure and potential have different T");
  }
}

// log of max_k |a(W_k)| * max_k |b(W_k)|, the natural size of det[a(W_k), b(W_k)].
double determinant_scale(const LinearForm& a, const LinearForm& b, const FundamentalSystem& w) {
  const double la = std::max(apply(a, w.first).log_abs(), apply(a, w.second).log_abs());
  const double lb = std::max(apply(b, w.first).log_abs(), apply(b, w.second).log_abs());
  return la + lb;
}

// Bound on |f(y)| / max(|y|, |y'| / max(1, |rho|)).
double form_norm(const LinearForm& f, double rho_abs) {
  if (f.is_point()) return f.as_point().order == 0 ? 1.0 : std::max(1.0, rho_abs);
  return total_variation(f.as_nonlocal());
}

double abs_max(const SolutionTrace& t, double dweight, double& log_scale) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    m = std::max({m, std::abs(t.y[i]), dweight * std::abs(t.dy[i])});
  log_scale = t.log_scale;
  return m;
}

}  // namespace

void ProblemSpec::validate(bool require_H1) const {
  check_form_domain(U1, T(), "U1");
  check_form_domain(U2, T(), "U2");
  if (require_H1 && H1() == cplx{}) throw InputError("U1 must have a nonzero jump at 0 (H1 != 0)");
}

std::vector<double> ProblemSpec::breakpoints() const {
  std::vector<double> b = U1.breakpoints();
  const auto b2 = U2.breakpoints();
  b.insert(b.end(), b2.begin(), b2.end());
  b.push_back(T());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

bool ProblemSpec::is_real() const { return q.is_real() && form_is_real(U1) && form_is_real(U2); }

std::string_view to_string(CharKind k) {
  switch (k) {
    case CharKind::omega: return "omega";
    case CharKind::delta1: return "delta1";
    case CharKind::delta2: return "delta2";
    case CharKind::delta11: return "delta11";
  }
  return "?";
}

CharKind char_kind_from_string(std::string_view s) {
  if (s == "omega") return CharKind::omega;
  if (s == "delta1") return CharKind::delta1;
  if (s == "delta2") return CharKind::delta2;
  if (s == "delta11") return CharKind::delta11;
  throw InputError("unknown characteristic function '" + std::string(s) + "'");
}

Discretization discretize(const ProblemSpec& spec, const SpectralPoint& p,
                          const GridOptions& options, std::span<const double> extra) {
  spec.validate();
  auto b = spec.breakpoints();
  b.insert(b.end(), extra.begin(), extra.end());
  return discretize(spec.q, b, std::abs(p.rho), options);
}

Scaled form_determinant(const LinearForm& a, const LinearForm& b, const FundamentalSystem& w) {
  return apply(a, w.first) * apply(b, w.second) - apply(b, w.first) * apply(a, w.second);
}

Evaluation::Evaluation(ProblemSpec spec, const SpectralPoint& p, const GridOptions& options,
                       std::vector<double> extra_breakpoints)
    : spec_(std::move(spec)), p_(p) {
  disc_ = std::make_shared<const Discretization>(discretize(spec_, p_, options, extra_breakpoints));
}

Evaluation::Evaluation(ProblemSpec spec, std::shared_ptr<const Discretization> disc,
                       const SpectralPoint& p)
    : spec_(std::move(spec)), p_(p), disc_(std::move(disc)) {}

const FundamentalSystem& Evaluation::X() {
  if (!x_) x_ = fundamental_X(*disc_, p_);
  return *x_;
}

const FundamentalSystem& Evaluation::Z() {
  if (!z_) z_ = fundamental_Z(*disc_, p_);
  return *z_;
}

const FundamentalSystem& Evaluation::E() {
  if (!e_) {
    const cplx ir = cplx(0.0, 1.0) * p_.rho;
    e_ = FundamentalSystem{integrate_ivp(*disc_, p_, Endpoint::right, 1.0, ir),
                           integrate_ivp(*disc_, p_, Endpoint::left, 1.0, -ir)};
    e_wronskian_ = wronskian(e_->first, e_->second, 0.0).value;
  }
  return *e_;
}

bool Evaluation::uses_exponential_basis() const {
  return std::abs(p_.rho.imag()) * spec_.T() > kExponentialBasisThreshold;
}

std::pair<const FundamentalSystem*, Scaled> Evaluation::basis() {
  if (!uses_exponential_basis()) return {&X(), Scaled(1.0)};
  const auto& e = E();
  return {&e, *e_wronskian_};
}

Scaled Evaluation::omega() {
  const auto [b, w] = basis();
  return form_determinant(spec_.U1, spec_.U2, *b) / w;
}

CharValue Evaluation::delta(int j) {
  if (j != 1 && j != 2) throw InputError("delta index must be 1 or 2");
  const LinearForm& U = j == 1 ? spec_.U1 : spec_.U2;
  const LinearForm V = end_form(spec_.T(), 0);
  const auto [b, w] = basis();
  const Scaled det = form_determinant(U, V, *b) / w;
  const Scaled zr = -apply(U, Z().second);
  const double scale = std::max(zr.log_abs(), determinant_scale(U, V, *b) - w.log_abs());
  if ((det - zr).log_abs() > std::log(kRouteTolerance) + scale)
    throw ConsistencyError("determinant and Z-form routes for Delta" + std::to_string(j) +
                           " disagree; integration grid too coarse");
  return {j == 1 ? CharKind::delta1 : CharKind::delta2, p_.lambda, zr, det, zr};
}

CharValue Evaluation::delta11() {
  const LinearForm V = end_form(spec_.T(), 1);
  const auto [b, w] = basis();
  const Scaled det = form_determinant(spec_.U1, V, *b) / w;
  const Scaled zr = apply(spec_.U1, Z().first);
  const double scale = std::max(zr.log_abs(), determinant_scale(spec_.U1, V, *b) - w.log_abs());
  if ((det - zr).log_abs() > std::log(kRouteTolerance) + scale)
    throw ConsistencyError("determinant and Z-form routes for Delta11 disagree; grid too coarse");
  return {CharKind::delta11, p_.lambda, zr, det, zr};
}

CharValue Evaluation::characteristic(CharKind k) {
  switch (k) {
    case CharKind::omega: {
      const Scaled w = omega();
      return {k, p_.lambda, w, w, w};
    }
    case CharKind::delta1: return delta(1);
    case CharKind::delta2: return delta(2);
    case CharKind::delta11: return delta11();
  }
  throw InputError("unknown characteristic function");
}

double Evaluation::log_pole_guard() const {
  return std::log(1e-10) + 0.5 * std::log1p(std::abs(p_.lambda)) +
         std::abs(p_.rho.imag()) * spec_.T();
}

Scaled Evaluation::weyl_M() {
  const Scaled d1 = delta(1).value;
  if (d1.log_abs() < log_pole_guard())
    throw PoleError("lambda too close to an eigenvalue of L1 (pole of M)");
  return delta(2).value / d1;
}

Scaled Evaluation::weyl_N() {
  const Scaled d11 = delta11().value;
  if (d11.log_abs() < log_pole_guard())
    throw PoleError("lambda too close to an eigenvalue of L11 (pole of N)");
  return delta(1).value / d11;
}

// Both are invariant under a change of basis once divided by its Wronskian.
SolutionTrace Evaluation::phi() {
  const auto [b, w] = basis();
  const Scaled iw = Scaled(1.0) / w;
  return combine(apply(spec_.U1, b->first) * iw, b->second, -apply(spec_.U1, b->second) * iw, b->first);
}

SolutionTrace Evaluation::theta() {
  const auto [b, w] = basis();
  const Scaled iw = Scaled(1.0) / w;
  return combine(apply(spec_.U2, b->second) * iw, b->first, -apply(spec_.U2, b->first) * iw, b->second);
}

// psi is the solution with psi(T) = 0, psi'(T) = -1; integrating it from T keeps it on the
// dominant branch instead of cancelling two growing X-terms.
SolutionTrace Evaluation::psi() { return scale(Scaled(-1.0), Z().second); }

SolutionTrace Evaluation::Phi() {
  const Scaled d1 = delta(1).value;
  if (d1.log_abs() < log_pole_guard())
    throw PoleError("lambda too close to an eigenvalue of L1 (pole of Phi)");
  return scale(Scaled(1.0) / d1, psi());
}

SolutionTrace Evaluation::v1() { return Z().first; }

// v2 = Z2 + N Z1 is the solution with U1(v2) = 0 and v2'(T) = 1, i.e. phi / phi'(T).
SolutionTrace Evaluation::v2() {
  const Scaled d11 = delta11().value;
  if (d11.log_abs() < log_pole_guard())
    throw PoleError("lambda too close to an eigenvalue of L11 (pole of v2)");
  return scale(Scaled(1.0) / d11, phi());
}

cplx omega(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options) {
  return Evaluation(spec, p, options).omega().value();
}

CharValue delta_j(const ProblemSpec& spec, int j, const SpectralPoint& p,
                  const GridOptions& options) {
  return Evaluation(spec, p, options).delta(j);
}

CharValue delta_11(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options) {
  return Evaluation(spec, p, options).delta11();
}

cplx weyl_M(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options) {
  return Evaluation(spec, p, options).weyl_M().value();
}

cplx weyl_N(const ProblemSpec& spec, const SpectralPoint& p, const GridOptions& options) {
  return Evaluation(spec, p, options).weyl_N().value();
}

CombinationSolutions combo_solutions(const ProblemSpec& spec, const SpectralPoint& p,
                                     const GridOptions& options) {
  Evaluation ev(spec, p, options);
  return {ev.phi(), ev.theta(), ev.psi(), ev.Phi(), ev.v1(), ev.v2()};
}

SplitResidual split_identity_check(const ProblemSpec& spec, double a, const SpectralPoint& p,
                                   const GridOptions& options) {
  const double T = spec.T();
  if (!(a > 0.0 && a <= T)) throw InputError("split point must lie in (0, T]");
  const BVMeasure m = spec.U1.to_measure(T);
  Evaluation ev(spec, p, options, {a, 0.5 * a});
  const auto& z = ev.Z();
  const auto I = [](const BVMeasure& mu, const SolutionTrace& t) {
    return Scaled(stieltjes_integrate(t.sampled(), mu), t.log_scale);
  };
  const BVMeasure full = truncate(m, a);
  const BVMeasure half = truncate(m, 0.5 * a);
  const BVMeasure tail = restrict_to(m, 0.5 * a, a);

  const Scaled d1_a = -I(full, z.second);
  const Scaled d1_h = -I(half, z.second);
  const Scaled tail2 = I(tail, z.second);
  const Scaled d11_a = I(full, z.first);
  const Scaled d11_h = I(half, z.first);
  const Scaled tail1 = I(tail, z.first);

  SplitResidual r;
  r.delta1_residual = d1_h - (d1_a + tail2);
  r.delta11_residual = d11_h - (d11_a - tail1);
  const double s = std::max({d1_a.log_abs(), tail2.log_abs(), d11_a.log_abs(), tail1.log_abs(),
                             d1_h.log_abs(), d11_h.log_abs()});
  r.scale = Scaled(1.0, std::isfinite(s) ? s : 0.0);
  return r;
}

DValue collinearity_ratio(Evaluation& ev) {
  const double w = 1.0 / std::max(1.0, std::abs(ev.point().rho));
  const auto& x = ev.X();
  const SolutionTrace ph = ev.phi();
  const SolutionTrace th = ev.theta();

  // phi = X2 U1(X1) - X1 U1(X2) is bounded by |U1| |X|^2; vanishing is judged against that.
  double sx = 0.0;
  const double mx = std::max(abs_max(x.first, w, sx), abs_max(x.second, w, sx));
  const double rho_abs = std::abs(ev.point().rho);
  const auto term_scale = [&](const LinearForm& f) {
    return std::log(form_norm(f, rho_abs)) + 2.0 * (sx + std::log(mx));
  };
  double sp = 0.0, st = 0.0;
  const double np = abs_max(ph, w, sp);
  const double nt = abs_max(th, w, st);
  const double rel_phi = np == 0.0 ? 0.0 : std::exp(std::log(np) + sp - term_scale(ev.spec().U1));
  const double rel_theta = nt == 0.0 ? 0.0 : std::exp(std::log(nt) + st - term_scale(ev.spec().U2));

  const bool phi_zero = !(rel_phi > kVanishTolerance);
  const bool theta_zero = !(rel_theta > kVanishTolerance);
  if (phi_zero && theta_zero)
    throw CollinearityError("phi and theta both vanish; zero of omega is not simple");
  if (theta_zero) return {true, {}, 0.0};
  if (phi_zero) return {false, 0.0, 0.0};

  // Least squares phi ~ d theta over y and weighted y' samples, on normalised columns.
  const std::size_t n = ph.size();
  std::vector<cplx> a(2 * n), b(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    a[2 * i] = ph.y[i] / np;
    a[2 * i + 1] = w * ph.dy[i] / np;
    b[2 * i] = th.y[i] / nt;
    b[2 * i + 1] = w * th.dy[i] / nt;
  }
  cplx ba = 0.0;
  double bb = 0.0, aa = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ba += std::conj(b[i]) * a[i];
    bb += std::norm(b[i]);
    aa += std::norm(a[i]);
  }
  const cplx c = ba / bb;
  double rr = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rr += std::norm(a[i] - c * b[i]);
  DValue d;
  d.defect = std::sqrt(rr / aa);
  d.value = (c * (np / nt)) * std::exp(sp - st);
  return d;
}

std::vector<DValue> d_sequence(const ProblemSpec& spec, std::span<const cplx> xi,
                               const GridOptions& options) {
  std::vector<DValue> out;
  out.reserve(xi.size());
  for (const cplx& z : xi) {
    Evaluation ev(spec, SpectralPoint::from_lambda(z), options);
    DValue d = collinearity_ratio(ev);
    if (d.defect > kCollinearityTolerance)
      throw CollinearityError("phi and theta not collinear at xi = (" + std::to_string(z.real()) +
                              ", " + std::to_string(z.imag()) +
                              "); not a simple zero of omega");
    out.push_back(d);
  }
  return out;
}

}  // namespace nlsl

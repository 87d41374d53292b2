#include "nlsl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "nlsl/asymptotics.hpp"
#include "nlsl/characteristic.hpp"
#include "nlsl/errors.hpp"
#include "nlsl/inversion.hpp"
#include "nlsl/parallel.hpp"
#include "nlsl/scenarios.hpp"
#include "nlsl/spectrum.hpp"

namespace nlsl {

namespace {

using std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(2) << std::scientific << v;
  return os.str();
}

SearchBox make_box(double re0, double re1, double im0, double im1) {
  SearchBox b;
  b.re_min = re0;
  b.re_max = re1;
  b.im_min = im0;
  b.im_max = im1;
  return b;
}

ProblemSpec dirichlet(Potential q, double a) { return {std::move(q), LinearForm::point(0.0), LinearForm::point(a)}; }

double rel_to(const Scaled& r, const Scaled& scale) { return r.is_zero() ? 0.0 : std::exp(r.log_abs() - scale.log_abs()); }

Scaled magnitude(const Scaled& s) { return s.is_zero() ? Scaled() : Scaled(1.0, s.log_abs()); }

// |u||v'| + |u'||v| at x: what a Wronskian cancels.
Scaled wronskian_scale(const SolutionTrace& u, const SolutionTrace& v, double x) {
  const auto [uy, udy] = u.at(x);
  const auto [vy, vdy] = v.at(x);
  return magnitude(uy * vdy) + magnitude(udy * vy);
}

// 1. Closed forms for q = 0, U1 = y(0): Delta1 = sin(rho pi)/rho, Delta11 = cos(rho pi).
Outcome zero_potential_oracle() {
  constexpr double kTol = 1e-8;
  constexpr int kPoints = 200;
  const ProblemSpec spec = dirichlet(Potential::zero(pi), pi / 2);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> lambdas;
  for (int i = 0; i < kPoints; ++i) {
    const double r = 100.0 * std::sqrt(u(rng));
    lambdas.push_back(std::polar(r, 2.0 * pi * u(rng)));
  }
  std::vector<double> e1(kPoints), e11(kPoints);
  parallel_for(kPoints, [&](std::size_t i) {
    const auto p = SpectralPoint::from_lambda(lambdas[i]);
    const cplx rho = p.rho;
    // relative to the modulus scale, since both closed forms have zeros
    const double growth = std::exp(std::abs(rho.imag()) * pi);
    const cplx d1 = delta_j(spec, 1, p).value.value();
    const cplx d11 = delta_11(spec, p).value.value();
    e1[i] = std::abs(d1 - std::sin(rho * pi) / rho) / (growth / std::max(1.0, std::abs(rho)));
    e11[i] = std::abs(d11 - std::cos(rho * pi)) / growth;
  });
  const double m1 = *std::max_element(e1.begin(), e1.end());
  const double m11 = *std::max_element(e11.begin(), e11.end());
  return {m1 <= kTol && m11 <= kTol, "max rel Delta1 " + sci(m1) + ", Delta11 " + sci(m11) + " (tol " + sci(kTol) + ")"};
}

// 2. Dirichlet squares from the contour finder; winding totals under two partitions.
Outcome spectrum_correctness() {
  constexpr double kTol = 1e-7;
  const ProblemSpec spec = dirichlet(Potential::zero(pi), pi / 2);
  const SearchBox box = make_box(0.5, 110.0, -1.0, 1.0);
  const CharFunction f(spec, CharKind::delta1, box.inflated(0.1).rho_max());
  const Spectrum s = find_spectrum(f, box);
  const auto v = s.values();
  double err = v.size() == 10 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < v.size() && n < 10; ++n)
    err = std::max(err, std::abs(v[n] - cplx((n + 1.0) * (n + 1.0))));

  const auto partition_total = [&](const std::vector<double>& re_cuts, const std::vector<double>& im_cuts) {
    std::vector<double> re{box.re_min}, im{box.im_min};
    re.insert(re.end(), re_cuts.begin(), re_cuts.end());
    im.insert(im.end(), im_cuts.begin(), im_cuts.end());
    re.push_back(box.re_max);
    im.push_back(box.im_max);
    int total = 0;
    for (std::size_t i = 0; i + 1 < re.size(); ++i)
      for (std::size_t j = 0; j + 1 < im.size(); ++j) total += count_zeros(f, make_box(re[i], re[i + 1], im[j], im[j + 1]));
    return total;
  };
  const int whole = count_zeros(f, box);
  const int p1 = partition_total({13.7, 47.2, 88.9}, {0.21});
  const int p2 = partition_total({30.3, 70.1}, {-0.37, 0.55});
  const bool pass = v.size() == 10 && err <= kTol && whole == 10 && p1 == whole && p2 == whole;
  std::ostringstream os;
  os << v.size() << " zeros, max |lambda_n - n^2| " << sci(err) << " (tol " << sci(kTol) << "), windings " << whole
     << "/" << p1 << "/" << p2;
  return {pass, os.str()};
}

ProblemSpec random_problem(std::mt19937_64& rng, double T) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = Potential::cosine(T, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
  const BVMeasure s1(T, {1.0 + 0.5 * u(rng), 0.5 * u(rng)}, {{0.4 * T, {u(rng), u(rng)}}},
                     Density{{0.1 * T, 0.6 * T}, {{u(rng), u(rng)}, {u(rng), u(rng)}}});
  const BVMeasure s2(T, {u(rng), u(rng)}, {{0.3 * T, {u(rng), u(rng)}}, {0.8 * T, {u(rng), 0.0}}},
                     Density{{0.0, 0.5 * T, T}, {{u(rng), 0.0}, {u(rng), u(rng)}, {0.0, u(rng)}}});
  return {q, LinearForm::nonlocal(s1), LinearForm::nonlocal(s2)};
}

// 3. Identity suite on random complex instances.
Outcome identity_suite() {
  constexpr double kTol = 1e-7;
  constexpr int kInstances = 20;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0), uT(1.0, 2.5), ua(0.3, 1.0);
  struct Instance {
    ProblemSpec spec;
    cplx lambda;
    double a;
    LinearForm Q;
  };
  std::vector<Instance> inst;
  for (int i = 0; i < kInstances; ++i) {
    const double T = uT(rng);
    auto spec = random_problem(rng, T);
    const cplx l(30.0 * u(rng), 10.0 * u(rng));
    const double a = ua(rng) * T;
    const auto Q = LinearForm::nonlocal(BVMeasure(T, {u(rng), u(rng)}, {{0.5 * T, {u(rng), u(rng)}}}));
    inst.push_back({std::move(spec), l, a, Q});
  }
  // worst ratio per identity, in the order of names below
  std::vector<std::array<double, 7>> worst(kInstances);
  parallel_for(kInstances, [&](std::size_t i) {
    const auto& in = inst[i];
    const double T = in.spec.T();
    const auto p = SpectralPoint::from_lambda(in.lambda);
    Evaluation ev(in.spec, p, {}, {0.5 * T});
    auto& w = worst[i];
    w.fill(0.0);
    const auto& X = ev.X();
    const auto& Z = ev.Z();
    w[0] = std::max(relative_difference(form_determinant(in.spec.U2, in.Q, Z), form_determinant(in.spec.U2, in.Q, X)),
                    relative_difference(form_determinant(in.spec.U1, in.spec.U2, Z),
                                        form_determinant(in.spec.U1, in.spec.U2, X)));
    const auto phi = ev.phi(), theta = ev.theta(), psi = ev.psi(), Phi = ev.Phi(), v1 = ev.v1(), v2 = ev.v2();
    for (double x : {0.0, 0.5 * T, T}) {
      w[1] = std::max({w[1], rel_to(wronskian(theta, phi, x).value - ev.omega(), wronskian_scale(theta, phi, x)),
                       rel_to(wronskian(psi, phi, x).value - ev.delta(1).value, wronskian_scale(psi, phi, x))});
      w[4] = std::max(w[4], rel_to(wronskian(Phi, phi, x).value - Scaled(1.0),
                                   wronskian_scale(Phi, phi, x) + Scaled(1.0)));
      w[5] = std::max(w[5], rel_to(wronskian(v1, v2, x).value - Scaled(1.0), wronskian_scale(v1, v2, x) + Scaled(1.0)));
    }
    for (CharKind k : {CharKind::delta1, CharKind::delta2, CharKind::delta11}) {
      const CharValue c = ev.characteristic(k);
      w[2] = std::max(w[2], relative_difference(c.z_route, c.det_route));
    }
    const auto lhs = scale(ev.omega(), Phi);
    const auto rhs = combine(Scaled(1.0), theta, ev.weyl_M(), phi);
    const auto [d12, m12] = trace_difference(lhs, rhs);
    w[3] = rel_to(d12, m12);
    const auto split = split_identity_check(in.spec, in.a, p);
    w[6] = std::max(rel_to(split.delta1_residual, split.scale), rel_to(split.delta11_residual, split.scale));
  });
  std::array<double, 7> total{};
  for (const auto& w : worst)
    for (std::size_t k = 0; k < 7; ++k) total[k] = std::max(total[k], w[k]);
  const char* names[] = {"det Z/X", "W(theta,phi) W(psi,phi)", "Z routes", "omega Phi", "W(Phi,phi)", "W(v1,v2)", "split"};
  std::ostringstream os;
  bool pass = true;
  for (std::size_t k = 0; k < 7; ++k) {
    os << (k ? ", " : "") << names[k] << " " << sci(total[k]);
    pass = pass && total[k] <= kTol;
  }
  os << " (tol " << sci(kTol) << ")";
  return {pass, os.str()};
}

// 4. q + c has spectra and M shifted by c.
Outcome shift_covariance() {
  constexpr double kTol = 1e-7;
  constexpr double kRho = 9.0;
  const auto q = Potential::cosine(pi, {{0.3, 0.2}, 0.5, {0.0, -0.4}});
  const ProblemSpec spec{q, LinearForm::nonlocal(BVMeasure(pi, 1.0, {{1.3, 0.5}})), LinearForm::point(2.0)};
  GridOptions g;
  g.rho_ref = kRho;
  const SearchBox box = make_box(-5.0, 60.0, -2.0, 2.0);
  const auto base = find_spectrum(CharFunction(spec, CharKind::delta1, kRho, g), box).values();
  const auto lambdas = default_lambda_grid(20);
  std::vector<cplx> m0;
  for (cplx l : lambdas) m0.push_back(weyl_M(spec, SpectralPoint::from_lambda(l), g));
  double spec_err = 0.0, m_err = 0.0;
  bool counts = true;
  for (double c : {-1.0, 0.5, 2.0}) {
    const ProblemSpec sc = spec.with_potential(q.shifted(c));
    const SearchBox bc = make_box(box.re_min + c, box.re_max + c, box.im_min, box.im_max);
    const auto shifted = find_spectrum(CharFunction(sc, CharKind::delta1, kRho, g), bc).values();
    if (shifted.size() != base.size()) {
      counts = false;
      continue;
    }
    for (std::size_t n = 0; n < base.size(); ++n)
      spec_err = std::max(spec_err, std::abs(shifted[n] - c - base[n]) / std::max(1.0, std::abs(base[n])));
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      const cplx mc = weyl_M(sc, SpectralPoint::from_lambda(lambdas[k] + c), g);
      m_err = std::max(m_err, std::abs(mc - m0[k]) / std::abs(m0[k]));
    }
  }
  std::ostringstream os;
  os << base.size() << " eigenvalues; spectra " << sci(spec_err) << ", M " << sci(m_err) << " (tol " << sci(kTol)
     << ")";
  return {counts && !base.empty() && spec_err <= kTol && m_err <= kTol, os.str()};
}

Potential random_smooth(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c{0.2 * u(rng)};
  for (int k = 1; k <= 4; ++k) c.emplace_back(u(rng) / k);
  return Potential::cosine(pi, c);
}

// 5. Leading term of Delta1 along arg rho = pi/3.
Outcome delta1_asymptotics() {
  constexpr double kFinal = 0.05;
  RaySpec r;
  r.arg = pi / 3;
  r.radii = {5.0, 10.0, 20.0, 40.0};
  const std::vector<Potential> corpus{Potential::zero(pi), Potential::constant(pi, 1.0), random_smooth(2024)};
  bool pass = true;
  std::ostringstream os;
  os << "error at |rho| = 40:";
  for (const auto& q : corpus) {
    const auto rep = asym_report(AsymQuantity::Delta1, 0.0, 0, r, dirichlet(q, pi / 2));
    pass = pass && rep.decreasing && rep.final_error < kFinal;
    os << " " << sci(rep.final_error) << (rep.decreasing ? "" : " (not decreasing)");
  }
  os << " (limit " << sci(kFinal) << ")";
  return {pass, os.str()};
}

// 6. Counterexample 1: (M, omega) agree, q differs, S fails, D separates.
Outcome counterexample1() {
  constexpr double kRel = 1e-6, kQ = 0.1, kD = 0.01;
  const auto cfg = build(ScenarioName::counterexample1);
  const auto r = verify_counterexample(cfg, default_lambda_grid(50), kRel);
  const bool pass = r.M.within(kRel) && r.omega.within(kRel) && r.q_distance > kQ && !r.S.holds && r.d_score &&
                    *r.d_score > kD;
  std::ostringstream os;
  os << "|M-M~| " << sci(r.M.max_dev) << "/" << sci(r.M.scale) << ", |w-w~| " << sci(r.omega.max_dev) << "/"
     << sci(r.omega.scale) << ", |q-q~| " << sci(r.q_distance) << ", S " << (r.S.holds ? "holds" : "fails")
     << ", D score " << sci(r.d_score.value_or(0.0));
  return {pass, os.str()};
}

// 7. Counterexample 2: S holds, M agrees, q differs.
Outcome counterexample2() {
  constexpr double kRel = 1e-6;
  const auto cfg = build(ScenarioName::counterexample2);
  const auto r = verify_counterexample(cfg, default_lambda_grid(50), kRel);
  const bool pass = r.S.holds && r.S.min_gap > 10.0 * cfg.separation_tol && r.M.within(kRel) && r.q_distance > 0.1;
  std::ostringstream os;
  os << "alpha " << cfg.alpha << ", S gap " << sci(r.S.min_gap) << ", |M-M~| " << sci(r.M.max_dev) << "/"
     << sci(r.M.scale) << ", |q-q~| " << sci(r.q_distance);
  return {pass, os.str()};
}

// 8. d_n = -1/M(xi_n) under condition S.
Outcome d_sequence_consistency() {
  constexpr double kTol = 1e-6;
  constexpr int kCount = 6;
  const auto q = Potential::cosine(pi, {0.3, {0.2, 0.1}, -0.4});
  const BVMeasure s1(pi, 1.0, {{0.8, 0.3}}, Density{{0.5, 2.0}, {0.2, {0.1, -0.1}}});
  const ProblemSpec spec{q, LinearForm::nonlocal(s1), LinearForm::point(1.3)};
  const auto zeros = first_zeros(spec, CharKind::omega, kCount);
  const auto all = zeros.values();
  if (static_cast<int>(all.size()) < kCount) return {false, "fewer than 6 zeros of omega found"};
  const std::vector<cplx> xi(all.begin(), all.begin() + kCount);
  SearchBox around = make_box(xi.front().real() - 1.0, xi.back().real() + 1.0, -1.0, 1.0);
  for (cplx z : xi) {
    around.im_min = std::min(around.im_min, z.imag() - 1.0);
    around.im_max = std::max(around.im_max, z.imag() + 1.0);
  }
  const auto S = condition_S(spec, around, 1e-6);
  GridOptions g;
  g.rho_ref = around.inflated(0.1).rho_max();
  const auto d = d_sequence(spec, xi, g);
  double err = 0.0;
  for (int n = 0; n < kCount; ++n) {
    if (d[n].infinite) {
      err = std::numeric_limits<double>::infinity();
      continue;
    }
    const cplx m = weyl_M(spec, SpectralPoint::from_lambda(xi[n]), g);
    err = std::max(err, std::abs(d[n].value + 1.0 / m) / std::abs(d[n].value));
  }
  std::ostringstream os;
  os << "S " << (S.holds ? "holds" : "fails") << " (gap " << sci(S.min_gap) << "), max rel |d_n + 1/M| " << sci(err)
     << " (tol " << sci(kTol) << ")";
  return {S.holds && err <= kTol, os.str()};
}

Parameterization cosine_basis(int dim) {
  Parameterization p;
  p.kind = Parameterization::Kind::cosine;
  p.T = pi;
  p.dim = dim;
  return p;
}

std::string coeff_report(const std::vector<double>& got, const std::vector<double>& want, double& err) {
  std::ostringstream os;
  err = 0.0;
  os << "coeffs";
  for (std::size_t k = 0; k < got.size(); ++k) {
    err = std::max(err, std::abs(got[k] - want[k]));
    os << " " << std::fixed << std::setprecision(6) << got[k];
  }
  return os.str();
}

// 9. Two spectra (Delta1, Delta11), 8 + 8 eigenvalues, 4 cosine coefficients.
Outcome inverse_problem_2() {
  constexpr double kTol = 1e-3;
  const std::vector<double> truth = {0.0, 0.7, -0.3, 0.0};
  const auto param = cosine_basis(4);
  SynthesisOptions so;
  so.count = 8;
  const auto target = synthesize(TargetKind::two_spectra, dirichlet(param.potential(truth), 1.0), so);
  ReconstructOptions ro;
  ro.starts = 5;
  const auto res = reconstruct(target, param, std::vector<double>(4, 0.0), ro);
  double err = 0.0;
  auto detail = coeff_report(res.coeffs, truth, err);
  detail += ", max error " + sci(err) + " (tol " + sci(kTol) + "), residual " + sci(res.residual_norm);
  return {err <= kTol, detail};
}

// 10. Three spectra with a = 1, condition S' checked first.
Outcome inverse_problem_4() {
  constexpr double kTol = 1e-3;
  const std::vector<double> truth = {0.4, -0.5, 0.3, 0.2};
  const auto param = cosine_basis(4);
  SynthesisOptions so;
  so.count = 8;
  const auto target = synthesize(TargetKind::three_spectra, dirichlet(param.potential(truth), 1.0), so);
  if (!target.certificate || !target.certificate->holds) return {false, "condition S' fails on the data box"};
  ReconstructOptions ro;
  ro.starts = 3;
  const auto res = reconstruct(target, param, std::vector<double>(4, 0.0), ro);
  double err = 0.0;
  auto detail = "S' gap " + sci(target.certificate->min_gap) + ", " + coeff_report(res.coeffs, truth, err);
  detail += ", max error " + sci(err) + " (tol " + sci(kTol) + ")";
  return {err <= kTol, detail};
}

// 11. No zero of omega Delta1 Delta2 belongs to exactly two of L0, L1, L2.
Outcome overlap_rule() {
  constexpr int kInstances = 10;
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ua(0.5, 2.5);
  int zeros = 0, twos = 0, threes = 0;
  for (int i = 0; i < kInstances; ++i) {
    const double a = ua(rng);
    std::vector<cplx> c;
    for (int k = 0; k < 4; ++k) c.emplace_back(u(rng) / (1 + k));
    const auto r = three_spectra_overlap_rule(dirichlet(Potential::cosine(pi, c), a), a, make_box(-5.0, 150.0, -1.0, 1.0));
    zeros += static_cast<int>(r.entries.size());
    twos += r.exactly_two;
    threes += r.exactly_three;
  }
  std::ostringstream os;
  os << zeros << " zeros over " << kInstances << " instances, exactly-two " << twos << ", exactly-three " << threes;
  return {twos == 0 && zeros > 0, os.str()};
}

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds; 0 = none
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "zero-potential oracle", 10.0, zero_potential_oracle},
      {2, "spectrum correctness", 30.0, spectrum_correctness},
      {3, "identity suite", 60.0, identity_suite},
      {4, "shift covariance", 0.0, shift_covariance},
      {5, "Delta1 asymptotics", 0.0, delta1_asymptotics},
      {6, "counterexample 1", 0.0, counterexample1},
      {7, "counterexample 2", 0.0, counterexample2},
      {8, "D-sequence consistency", 0.0, d_sequence_consistency},
      {9, "two-spectra reconstruction", 300.0, inverse_problem_2},
      {10, "three-spectra reconstruction", 0.0, inverse_problem_4},
      {11, "three-spectra overlap rule", 0.0, overlap_rule},
  };
  return list;
}

}  // namespace

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << "  " << r.name << "  (" << r.detail << "; "
     << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream* progress) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.id) == options.only.end())
      continue;
    CriterionResult r{c.id, c.name, false, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.run();
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0 && r.seconds > c.budget) {
      r.pass = false;
      r.detail += ", over the " + std::to_string(static_cast<int>(c.budget)) + " s budget";
    }
    if (progress) *progress << format_line(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nlsl

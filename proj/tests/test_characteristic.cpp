#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlsl/characteristic.hpp"
#include "nlsl/errors.hpp"

using namespace nlsl;
using std::numbers::pi;

namespace {

ProblemSpec zero_point_problem(double a, double T = pi) {
  return {Potential::zero(T), LinearForm::point(0.0), LinearForm::point(a)};
}

SpectralPoint sp(cplx l) { return SpectralPoint::from_lambda(l); }

ProblemSpec random_problem(std::mt19937_64& rng, double T) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = Potential::cosine(T, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
  const BVMeasure s1(T, {1.0 + 0.5 * u(rng), 0.5 * u(rng)}, {{0.4 * T, {u(rng), u(rng)}}},
                     Density{{0.1 * T, 0.6 * T}, {{u(rng), u(rng)}, {u(rng), u(rng)}}});
  const BVMeasure s2(T, {u(rng), u(rng)}, {{0.3 * T, {u(rng), u(rng)}}, {0.8 * T, {u(rng), 0.0}}},
                     Density{{0.0, 0.5 * T, T}, {{u(rng), 0.0}, {u(rng), u(rng)}, {0.0, u(rng)}}});
  return {q, LinearForm::nonlocal(s1), LinearForm::nonlocal(s2)};
}

double rel(const Scaled& a, const Scaled& b) { return relative_difference(a, b); }

// |r| relative to the given magnitude.
double rel_to(const Scaled& r, const Scaled& scale) {
  return r.is_zero() ? 0.0 : std::exp(r.log_abs() - scale.log_abs());
}

// |u||v'| + |u'||v| at x: the size of the terms a Wronskian cancels.
Scaled wronskian_scale(const SolutionTrace& u, const SolutionTrace& v, double x) {
  const auto [uy, udy] = u.at(x);
  const auto [vy, vdy] = v.at(x);
  const auto mag = [](const Scaled& s) { return Scaled(1.0, s.log_abs()); };
  return mag(uy * vdy) + mag(udy * vy);
}

}  // namespace

TEST_CASE("omega: zero-potential closed forms") {
  CHECK(std::abs(omega(zero_point_problem(pi / 2), sp(4.0))) < 1e-9);
  CHECK(std::abs(omega(zero_point_problem(pi / 2), sp(1.0)) - 1.0) < 1e-9);
  CHECK(std::abs(omega(zero_point_problem(pi / 2), sp(0.0)) - pi / 2) < 1e-12);
}

TEST_CASE("delta_j: zero-potential closed forms and both routes") {
  const auto spec = zero_point_problem(pi / 2);
  CHECK(std::abs(delta_j(spec, 1, sp(4.0)).value.value()) < 1e-9);
  const auto d = delta_j(spec, 1, sp(0.25));
  CHECK(std::abs(d.value.value() - 2.0) < 1e-9);
  CHECK(rel(d.det_route, d.z_route) < 1e-9);
  // Delta2 = det[U2(X_k), V1(X_k)] = sin(rho (pi - a)) / rho.
  const auto d2 = delta_j(spec, 2, sp(1.0));
  CHECK(std::abs(d2.value.value() - 1.0) < 1e-9);
  const cplx l{7.3, -2.1};
  const cplx r = sp(l).rho;
  CHECK(std::abs(delta_j(spec, 2, sp(l)).value.value() - std::sin(r * (pi - pi / 2)) / r) < 1e-9);
  CHECK_THROWS_AS(delta_j(spec, 3, sp(1.0)), InputError);
}

TEST_CASE("delta_j: constant potential is a spectral shift") {
  const double c = 0.8;
  const GridOptions g{.rho_ref = 4.0};
  const ProblemSpec shifted{Potential::constant(pi, c), LinearForm::point(0.0), LinearForm::point(1.0)};
  for (cplx l : {cplx(3.0, 0.5), cplx(-2.0, 1.0), cplx(11.0, -3.0)}) {
    const auto a = delta_j(shifted, 1, sp(l), g).value;
    const auto b = delta_j(zero_point_problem(1.0), 1, sp(l - c), g).value;
    CHECK(rel(a, b) < 1e-12);
  }
}

TEST_CASE("delta_11: closed forms") {
  const auto spec = zero_point_problem(pi / 2);
  CHECK(std::abs(delta_11(spec, sp(0.25)).value.value()) < 1e-9);
  CHECK(std::abs(delta_11(spec, sp(0.0)).value.value() - 1.0) < 1e-12);
  const cplx l{20.0, 4.0};
  CHECK(std::abs(delta_11(spec, sp(l)).value.value() - std::cos(sp(l).rho * pi)) < 1e-8 * std::abs(std::cos(sp(l).rho * pi)));
}

TEST_CASE("weyl_M: closed form, pole and shift") {
  const auto spec = zero_point_problem(pi / 2);
  // M = Delta2 / Delta1 = sin(rho (pi - a)) / sin(rho pi); at lambda = 1/4 this is sin(pi/4).
  CHECK(std::abs(weyl_M(spec, sp(0.25)) - std::sqrt(0.5)) < 1e-9);
  CHECK_THROWS_AS(weyl_M(spec, sp(1.0)), PoleError);
  CHECK(std::abs(weyl_M(spec, sp(1.0 + 1e-3))) > std::abs(weyl_M(spec, sp(1.0 + 1e-2))) * 5);
  const GridOptions g{.rho_ref = 4.0};
  const ProblemSpec shifted{Potential::constant(pi, 2.0), LinearForm::point(0.0), LinearForm::point(pi / 2)};
  const cplx l{5.5, 0.7};
  CHECK(std::abs(weyl_M(shifted, sp(l), g) - weyl_M(spec, sp(l - 2.0), g)) < 1e-10);
}

TEST_CASE("weyl_N: closed form, pole, both routes") {
  const auto spec = zero_point_problem(pi / 2);
  CHECK(std::abs(weyl_N(spec, sp(4.0))) < 1e-9);
  CHECK_THROWS_AS(weyl_N(spec, sp(0.25)), PoleError);
  std::mt19937_64 rng(5);
  const auto rspec = random_problem(rng, 2.0);
  Evaluation ev(rspec, sp(cplx(6.0, 1.5)));
  const Scaled by_ratio = ev.delta(1).det_route / ev.delta11().det_route;
  const Scaled by_z = -apply(rspec.U1, ev.Z().second) / apply(rspec.U1, ev.Z().first);
  CHECK(rel(by_ratio, by_z) < 1e-8);
  CHECK(rel(ev.weyl_N(), by_z) < 1e-8);
}

TEST_CASE("combination solutions carry their boundary values") {
  std::mt19937_64 rng(9);
  const double T = 2.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto spec = random_problem(rng, T);
    Evaluation ev(spec, sp(cplx(8.0 * trial - 5.0, 2.0)));
    const auto V1 = LinearForm::point(T, 0), V2 = LinearForm::point(T, 1);
    const Scaled w = ev.omega(), d1 = ev.delta(1).value, d2 = ev.delta(2).value,
                 d11 = ev.delta11().value;
    const auto phi = ev.phi(), theta = ev.theta(), psi = ev.psi(), Phi = ev.Phi();
    const auto v1 = ev.v1(), v2 = ev.v2();
    const auto norm = [](const SolutionTrace& t) { return trace_difference(t, scale(Scaled(0.0), t)).second; };

    CHECK(rel_to(apply(spec.U1, phi), norm(phi)) < 1e-8);
    CHECK(rel(apply(spec.U2, phi), w) < 1e-8);
    CHECK(rel(apply(V1, phi), d1) < 1e-8);
    CHECK(rel(apply(V2, phi), d11) < 1e-8);
    CHECK(rel(apply(spec.U1, theta), w) < 1e-8);
    CHECK(rel_to(apply(spec.U2, theta), norm(theta)) < 1e-8);
    CHECK(rel(apply(V1, theta), -d2) < 1e-8);
    CHECK(rel(apply(spec.U1, psi), d1) < 1e-8);
    CHECK(rel(apply(spec.U2, psi), d2) < 1e-8);
    CHECK(apply(V1, psi).is_zero());
    CHECK(rel(apply(V2, psi), Scaled(-1.0)) < 1e-12);
    CHECK(rel(apply(spec.U1, Phi), Scaled(1.0)) < 1e-8);
    CHECK(apply(V1, Phi).is_zero());
    CHECK(rel(apply(V1, v1), Scaled(1.0)) < 1e-14);
    CHECK(apply(V2, v1).is_zero());
    CHECK(rel(apply(V2, v2), Scaled(1.0)) < 1e-8);
    CHECK(rel_to(apply(spec.U1, v2), norm(v2)) < 1e-8);
    for (double x : {0.0, 0.5, 1.3, T})
      CHECK(rel(wronskian(Phi, phi, x).value, Scaled(1.0)) < 1e-8);
  }
}

TEST_CASE("identity suite on random complex instances") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double T = 1.7;
  for (int trial = 0; trial < 8; ++trial) {
    const auto spec = random_problem(rng, T);
    const auto p = sp(cplx(30.0 * u(rng), 10.0 * u(rng)));
    Evaluation ev(spec, p, {}, {0.9});
    const auto& X = ev.X();
    const auto& Z = ev.Z();
    // Determinant over Z equals determinant over X for arbitrary forms.
    const auto Q = LinearForm::nonlocal(BVMeasure(T, {u(rng), u(rng)}, {{0.9, {u(rng), u(rng)}}}));
    CHECK(rel(form_determinant(spec.U2, Q, Z), form_determinant(spec.U2, Q, X)) < 1e-8);
    const auto phi = ev.phi(), theta = ev.theta(), psi = ev.psi();
    for (double x : {0.0, 0.85, T}) {
      CHECK(rel_to(wronskian(theta, phi, x).value - ev.omega(), wronskian_scale(theta, phi, x)) < 1e-8);
      CHECK(rel_to(wronskian(psi, phi, x).value - ev.delta(1).value, wronskian_scale(psi, phi, x)) < 1e-8);
      CHECK(rel(wronskian(ev.v1(), ev.v2(), x).value, Scaled(1.0)) < 1e-8);
    }
    // v2 = Z2 + N Z1 and psi = det[X_k(x), V1(X_k)].
    const auto v2_formula = combine(Scaled(1.0), Z.second, ev.weyl_N(), Z.first);
    const auto [dv, mv] = trace_difference(v2_formula, ev.v2());
    CHECK(rel_to(dv, mv) < 1e-7);
    const auto V1 = LinearForm::point(T, 0);
    const auto psi_x = combine(apply(V1, X.second), X.first, -apply(V1, X.first), X.second);
    const auto [dp, mp] = trace_difference(psi_x, psi);
    CHECK(rel_to(dp, mp) < 1e-7);
    // omega Phi = theta + M phi.
    const auto lhs = scale(ev.omega(), ev.Phi());
    const auto rhs = combine(Scaled(1.0), theta, ev.weyl_M(), phi);
    const auto [d12, m12] = trace_difference(lhs, rhs);
    CHECK(rel_to(d12, m12) < 1e-7);
  }
}

TEST_CASE("conjugate symmetry for real problems") {
  const BVMeasure s1(pi, 1.0, {{1.0, 0.5}});
  const BVMeasure s2(pi, 0.3, {{2.0, -1.0}}, Density{{0.5, 2.5}, {0.2, -0.4}});
  const ProblemSpec spec{Potential::cosine(pi, {0.5, 0.3, -0.2}), LinearForm::nonlocal(s1),
                         LinearForm::nonlocal(s2)};
  const cplx l{12.0, 3.0};
  Evaluation a(spec, sp(l)), b(spec, sp(std::conj(l)));
  for (auto k : {CharKind::omega, CharKind::delta1, CharKind::delta2, CharKind::delta11}) {
    const cplx va = a.characteristic(k).value.value();
    const cplx vb = b.characteristic(k).value.value();
    CHECK(std::abs(va - std::conj(vb)) < 1e-10 * std::abs(va));
  }
}

TEST_CASE("split identity") {
  const double T = 2.0;
  const auto q = Potential::cosine(T, {{0.3, 0.1}, {0.5, 0.0}});
  // Pure jump, a = T: empty tail.
  const ProblemSpec jump{q, LinearForm::nonlocal(BVMeasure(T, 1.5)), LinearForm::point(1.0)};
  const auto r0 = split_identity_check(jump, T, sp(cplx(4.0, 1.0)));
  CHECK(r0.delta1_residual.is_zero());
  CHECK(r0.delta11_residual.is_zero());
  // Atom inside (a/2, a].
  const BVMeasure s1(T, 1.0, {{0.7, {0.5, -0.2}}, {1.6, 0.3}}, Density{{0.2, 1.9}, {0.1, {0.3, 0.2}}});
  const ProblemSpec spec{q, LinearForm::nonlocal(s1), LinearForm::point(1.0)};
  for (double a : {T, 1.2, 0.9}) {
    const auto r = split_identity_check(spec, a, sp(cplx(9.0, -2.0)));
    CHECK(rel_to(r.delta1_residual, r.scale) < 1e-8);
    CHECK(rel_to(r.delta11_residual, r.scale) < 1e-8);
  }
  // Support inside [0, a/2]: the tail vanishes exactly.
  const ProblemSpec early{q, LinearForm::nonlocal(BVMeasure(T, 1.0, {{0.3, 0.5}})), LinearForm::point(1.0)};
  const auto re = split_identity_check(early, 1.2, sp(3.0));
  CHECK(re.delta1_residual.is_zero());
  CHECK_THROWS_AS(split_identity_check(early, 0.0, sp(3.0)), InputError);
}

TEST_CASE("d_sequence: agrees with -1/M under condition S") {
  const auto spec = zero_point_problem(1.0);
  std::vector<cplx> xi;
  for (int n = 1; n <= 4; ++n) xi.emplace_back(n * n * pi * pi);
  const auto d = d_sequence(spec, xi);
  for (int n = 1; n <= 4; ++n) {
    const auto& dn = d[n - 1];
    REQUIRE_FALSE(dn.infinite);
    // Closed form: phi = sin(rho x)/rho, theta = -cos(n pi) sin(rho x)/rho.
    const double closed = (n % 2 == 1) ? 1.0 : -1.0;
    CHECK(std::abs(dn.value - closed) < 1e-6);
    CHECK(std::abs(dn.value + 1.0 / weyl_M(spec, sp(xi[n - 1]))) < 1e-6);
  }
}

TEST_CASE("d_sequence: vanishing theta gives infinity, vanishing phi gives zero") {
  const double T = pi;
  const double a = 0.5, b = 1.5;
  const double xi = std::pow(2 * pi / (b - a), 2);
  // U2(y) = y(a) - y(b) annihilates every zero-potential solution when rho (b - a) = 2 pi.
  const ProblemSpec theta_zero{Potential::zero(T), LinearForm::point(0.0),
                               LinearForm::nonlocal(BVMeasure(T, 0.0, {{a, 1.0}, {b, -1.0}}))};
  const auto d = d_sequence(theta_zero, std::vector<cplx>{xi});
  CHECK(d[0].infinite);
  // U1(y) = y(0) - y(b) annihilates both solutions when rho b = 2 pi.
  const double xi1 = std::pow(2 * pi / b, 2);
  const ProblemSpec phi_zero{Potential::zero(T), LinearForm::nonlocal(BVMeasure(T, 1.0, {{b, -1.0}})),
                             LinearForm::point(0.7)};
  const auto d1 = d_sequence(phi_zero, std::vector<cplx>{xi1});
  CHECK_FALSE(d1[0].infinite);
  CHECK(std::abs(d1[0].value) < 1e-12);
  CHECK_THROWS_AS(d_sequence(zero_point_problem(1.0), std::vector<cplx>{5.0}), CollinearityError);
}

TEST_CASE("validation") {
  const ProblemSpec bad{Potential::zero(1.0), LinearForm::point(0.0), LinearForm::nonlocal(BVMeasure(2.0, 1.0))};
  CHECK_THROWS_AS(omega(bad, sp(1.0)), DomainError);
  const ProblemSpec noh{Potential::zero(1.0), LinearForm::point(0.5), LinearForm::point(0.0)};
  CHECK_THROWS_AS(noh.validate(true), InputError);
  CHECK_NOTHROW(noh.validate(false));
}

TEST_CASE("exponential basis agrees with the X basis where both are accurate") {
  std::mt19937_64 rng(91);
  for (int k = 0; k < 4; ++k) {
    const auto spec = random_problem(rng, pi);
    const auto p = SpectralPoint::from_rho({2.0 + k, 1.2});  // |Im rho| T above the switch
    Evaluation ev(spec, p);
    REQUIRE(ev.uses_exponential_basis());
    const auto& X = ev.X();
    const Scaled om = form_determinant(spec.U1, spec.U2, X);
    CHECK(rel(ev.omega(), om) < 1e-9);
    const auto phi_x = combine(apply(spec.U1, X.first), X.second, -apply(spec.U1, X.second), X.first);
    const auto [d, m] = trace_difference(ev.phi(), phi_x);
    CHECK(rel_to(d, m) < 1e-9);
    const auto theta_x = combine(apply(spec.U2, X.second), X.first, -apply(spec.U2, X.first), X.second);
    const auto [d2, m2] = trace_difference(ev.theta(), theta_x);
    CHECK(rel_to(d2, m2) < 1e-9);
  }
}

TEST_CASE("phi keeps U1(phi) = 0 far up the imaginary direction") {
  const BVMeasure m(pi, {1.0, 0.3}, {{0.8, {0.5, 0.1}}}, Density{{0.2, 1.1}, {{0.3, 0.0}, {-0.4, 0.2}}});
  const ProblemSpec spec{Potential::cosine(pi, {0.2, 0.5}), LinearForm::nonlocal(m), LinearForm::point(2.0)};
  const auto p = SpectralPoint::from_rho(std::polar(60.0, pi / 3));
  Evaluation ev(spec, p);
  const auto phi = ev.phi();
  // |phi(x)| ~ |H1| exp(Im rho x) / (2|rho|); U1(phi) cancels terms of size ~ |phi(1.1)|.
  const Scaled ref = phi.at(1.1).first;
  CHECK(rel_to(apply(spec.U1, phi), ref) < 1e-8);
  CHECK(rel_to(wronskian(ev.theta(), phi, 2.0).value - ev.omega(), wronskian_scale(ev.theta(), phi, 2.0)) < 1e-8);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nlsl/characteristic.hpp"
#include "nlsl/errors.hpp"
#include "nlsl/ode.hpp"

using namespace nlsl;
using std::numbers::pi;

namespace {

cplx end_value(const SolutionTrace& t) { return t.value(t.size() - 1).value(); }
cplx end_deriv(const SolutionTrace& t) { return t.derivative(t.size() - 1).value(); }

Potential smooth_complex(double T) {
  return Potential::cosine(T, {{0.4, 0.2}, {0.7, -0.1}, {-0.3, 0.3}, {0.2, 0.0}});
}

}  // namespace

TEST_CASE("SpectralPoint branch") {
  const auto p = SpectralPoint::from_lambda(4.0);
  CHECK(p.rho == cplx(2.0, 0.0));
  const auto n = SpectralPoint::from_lambda(-4.0);
  CHECK(std::abs(n.rho - cplx(0.0, 2.0)) < 1e-15);
  const auto nm = SpectralPoint::from_lambda(cplx(-4.0, -0.0));
  CHECK(nm.rho.imag() > 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const cplx l{u(rng), u(rng)};
    const auto s = SpectralPoint::from_lambda(l);
    CHECK(s.rho.imag() >= 0.0);
    CHECK(std::abs(s.rho * s.rho - l) <= 1e-14 * std::abs(l));
  }
}

TEST_CASE("integrate_ivp: zero-potential closed forms") {
  const auto q = Potential::zero(pi);
  const auto t = integrate_ivp(q, SpectralPoint::from_lambda(4.0), Endpoint::left, 1.0, 0.0);
  CHECK(std::abs(end_value(t) - 1.0) < 1e-10);
  CHECK(std::abs(end_deriv(t)) < 1e-9);
  for (std::size_t i = 0; i < t.size(); i += 97) {
    const double x = t.nodes()[i];
    CHECK(std::abs(t.value(i).value() - std::cos(2 * x)) < 1e-10);
  }
  const auto lin = integrate_ivp(q, SpectralPoint::from_lambda(0.0), Endpoint::left, 0.0, 1.0);
  CHECK(std::abs(end_value(lin) - pi) < 1e-13);
}

TEST_CASE("integrate_ivp: constant potential equals shifted spectral parameter") {
  const double c = 1.7;
  const GridOptions g{.rho_ref = 3.0};
  const cplx lambda{6.0, 2.0};
  const auto a = integrate_ivp(Potential::constant(pi, c), SpectralPoint::from_lambda(lambda),
                               Endpoint::left, 1.0, 0.5, g);
  const auto b = integrate_ivp(Potential::zero(pi), SpectralPoint::from_lambda(lambda - c),
                               Endpoint::left, 1.0, 0.5, g);
  const auto [diff, mag] = trace_difference(a, b);
  CHECK(std::exp(diff.log_abs() - mag.log_abs()) < 1e-12);
}

TEST_CASE("integrate_ivp: RK4 order under refinement") {
  const auto q = Potential::zero(pi);
  const auto p = SpectralPoint::from_lambda(cplx(9.0, 1.0));
  double prev = 0.0;
  for (double h : {0.04, 0.02, 0.01}) {
    const GridOptions g{.h_max = h, .phase_step = 1e9};
    const auto t = integrate_ivp(q, p, Endpoint::left, 1.0, 0.0, g);
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      err = std::max(err, std::abs(t.value(i).value() - std::cos(p.rho * t.nodes()[i])));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("fundamental systems: initial values, closed forms, Wronskian") {
  const auto q = Potential::zero(pi);
  const auto p = SpectralPoint::from_lambda(4.0);
  const auto disc = discretize(q, {}, std::abs(p.rho));
  const auto X = fundamental_X(disc, p);
  CHECK(X.first.value(0).value() == cplx(1.0));
  CHECK(X.second.derivative(0).value() == cplx(1.0));
  CHECK(std::abs(end_value(X.first) - 1.0) < 1e-10);
  CHECK(std::abs(end_value(X.second)) < 1e-10);
  const auto Z = fundamental_Z(disc, p);
  CHECK(std::abs(Z.first.value(0).value() - 1.0) < 1e-10);
  CHECK(end_value(Z.first) == cplx(1.0));
  CHECK(end_deriv(Z.second) == cplx(1.0));

  const auto p0 = SpectralPoint::from_lambda(0.0);
  const auto d0 = discretize(q, {}, 0.0);
  const auto X0 = fundamental_X(d0, p0);
  const auto Z0 = fundamental_Z(d0, p0);
  for (std::size_t i = 0; i < X0.second.size(); i += 50) {
    CHECK(std::abs(X0.second.value(i).value() - d0.nodes->at(i)) < 1e-13);
    CHECK(std::abs(Z0.second.value(i).value() - (d0.nodes->at(i) - pi)) < 1e-13);
  }

  // Complex potential, complex lambda: Wronskians stay at 1.
  const auto qc = smooth_complex(pi);
  const auto pc = SpectralPoint::from_lambda(cplx(30.0, 12.0));
  const auto dc = discretize(qc, {}, std::abs(pc.rho));
  const auto Xc = fundamental_X(dc, pc);
  const auto Zc = fundamental_Z(dc, pc);
  for (std::size_t i = 0; i < Xc.first.size(); i += 37) {
    const double x = dc.nodes->at(i);
    CHECK(std::abs(wronskian(Xc.first, Xc.second, x).value.value() - 1.0) < 1e-8);
    CHECK(std::abs(wronskian(Zc.first, Zc.second, x).value.value() - 1.0) < 1e-8);
    CHECK(std::abs(wronskian(Xc.first, Xc.first, x).value.value()) < 1e-14 * std::abs(Xc.first.value(i).value() * Xc.first.derivative(i).value()) + 1e-300);
  }
}

TEST_CASE("overflow control keeps mantissas bounded and values exact") {
  const auto q = Potential::zero(pi);
  const auto p = SpectralPoint::from_rho(std::polar(60.0, pi / 3));
  const auto disc = discretize(q, {}, std::abs(p.rho));
  const auto X = fundamental_X(disc, p);
  for (std::size_t i = 0; i < X.second.size(); ++i) CHECK(std::abs(X.second.y[i]) <= 1e8 * 1.01);
  CHECK(X.second.log_scale > 100.0);
  // sin(rho pi)/rho in scaled form.
  const Scaled exact = (scaled_exp(cplx(0, 1) * p.rho * pi) - scaled_exp(-cplx(0, 1) * p.rho * pi)) /
                       Scaled(cplx(0, 2) * p.rho);
  const Scaled got = X.second.value(X.second.size() - 1);
  CHECK(relative_difference(got, exact) < 1e-7);
}

TEST_CASE("Wronskian off-grid is interpolated and flagged") {
  const auto q = smooth_complex(2.0);
  const auto p = SpectralPoint::from_lambda(cplx(5.0, 1.0));
  const auto disc = discretize(q, {}, std::abs(p.rho));
  const auto X = fundamental_X(disc, p);
  const auto w = wronskian(X.first, X.second, 0.123456789);
  CHECK(w.interpolated);
  CHECK(std::abs(w.value.value() - 1.0) < 1e-6);
  CHECK_FALSE(wronskian(X.first, X.second, 0.0).interpolated);
}

TEST_CASE("form determinant is basis-invariant for random forms and systems") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double T = 2.0;
  const auto q = smooth_complex(T);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = SpectralPoint::from_lambda(cplx(10.0 * u(rng), 5.0 * u(rng)));
    const auto Q1 = LinearForm::nonlocal(
        BVMeasure(T, {u(rng), u(rng)}, {{0.5, {u(rng), u(rng)}}}, Density{{0.2, 1.7}, {{u(rng), 0.0}, {0.0, u(rng)}}}));
    const auto Q2 = LinearForm::nonlocal(BVMeasure(T, {u(rng), 0.0}, {{1.1, {u(rng), u(rng)}}, {T, 1.0}}));
    std::vector<double> bps = Q1.breakpoints();
    for (double b : Q2.breakpoints()) bps.push_back(b);
    const auto disc = discretize(q, bps, std::abs(p.rho));
    const auto X = fundamental_X(disc, p);
    const cplx a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)}, d{u(rng), u(rng)};
    const FundamentalSystem W{combine(a, X.first, b, X.second), combine(c, X.first, d, X.second)};
    const Scaled lhs = form_determinant(Q1, Q2, W);
    const Scaled rhs = form_determinant(Q1, Q2, X) * wronskian(W.first, W.second, 0.7).value;
    CHECK(relative_difference(lhs, rhs) < 1e-8);
  }
}

TEST_CASE("errors and CSV export") {
  const auto q = Potential::zero(1.0);
  CHECK_THROWS_AS(integrate_ivp(q, SpectralPoint::from_lambda(cplx(NAN, 0.0)), Endpoint::left, 1.0, 0.0),
                  InputError);
  CHECK_THROWS_AS(integrate_ivp(q, SpectralPoint::from_lambda(1e14), Endpoint::left, 1.0, 0.0),
                  RangeError);
  const auto t = integrate_ivp(q, SpectralPoint::from_lambda(1.0), Endpoint::left, 1.0, 0.0);
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str().rfind("x,re_y,im_y,re_dy,im_dy,log_scale\n0,1,0,0,0,0\n", 0) == 0);
}

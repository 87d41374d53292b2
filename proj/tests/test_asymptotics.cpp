#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nlsl/asymptotics.hpp"
#include "nlsl/errors.hpp"

using namespace nlsl;
using std::numbers::pi;

namespace {

ProblemSpec dirichlet(Potential q = Potential::zero(pi)) {
  return {std::move(q), LinearForm::point(0.0), LinearForm::point(1.0)};
}

// Real cosine potential with ||q||_1 <= 5 and a small mean.
Potential random_smooth(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c{0.2 * u(rng)};
  for (int k = 1; k <= 4; ++k) c.emplace_back(u(rng) / k);
  return Potential::cosine(pi, c);
}

RaySpec ray(std::vector<double> radii, double arg = pi / 3) {
  RaySpec r;
  r.arg = arg;
  r.radii = std::move(radii);
  return r;
}

}  // namespace

TEST_CASE("predict: leading terms against closed forms") {
  const auto s = dirichlet();
  const auto p = SpectralPoint::from_rho(std::polar(3.0, 1.0));
  const cplx rho = p.rho, i{0.0, 1.0};
  CHECK(std::abs(predict(AsymQuantity::Delta1, 0.0, 0, p, s).value() - (-std::exp(-i * rho * pi) / (2.0 * i * rho))) <
        1e-12 * std::abs(std::exp(-i * rho * pi)));
  CHECK(std::abs(predict(AsymQuantity::Delta11, 0.0, 0, p, s).value() - 0.5 * std::exp(-i * rho * pi)) <
        1e-12 * std::abs(std::exp(-i * rho * pi)));
  CHECK(std::abs(predict(AsymQuantity::v2, 1.0, 1, p, s).value() - std::exp(i * rho * (pi - 1.0))) < 1e-12);

  const BVMeasure m(pi, 2.0, {{1.0, 0.5}}, {});
  const ProblemSpec h2{Potential::zero(pi), LinearForm::nonlocal(m), LinearForm::point(1.0)};
  CHECK(std::abs(predict(AsymQuantity::Phi, 0.0, 0, p, h2).value() - 0.5) < 1e-15);
}

TEST_CASE("predict: validity ranges and H1") {
  const auto s = dirichlet();
  const auto p = SpectralPoint::from_rho({2.0, 3.0});
  CHECK_THROWS_AS(predict(AsymQuantity::v1, pi, 0, p, s), InputError);
  CHECK_THROWS_AS(predict(AsymQuantity::Phi, pi, 0, p, s), InputError);
  CHECK_THROWS_AS(predict(AsymQuantity::varphi, 0.0, 0, p, s), InputError);
  CHECK_NOTHROW(predict(AsymQuantity::varphi, pi, 0, p, s));
  CHECK_THROWS_AS(predict(AsymQuantity::Delta1, 0.0, 2, p, s), InputError);
  const ProblemSpec no_jump{Potential::zero(pi), LinearForm::point(0.5), LinearForm::point(1.0)};
  CHECK_THROWS_AS(predict(AsymQuantity::Delta1, 0.0, 0, p, no_jump), InputError);
}

TEST_CASE("asym_report: q = 0 errors equal |exp(2 i rho pi)|") {
  const auto s = dirichlet();
  for (auto q : {AsymQuantity::Delta1, AsymQuantity::Delta11}) {
    const auto rep = asym_report(q, 0.0, 0, ray({0.5, 1.0, 2.0, 4.0}), s);
    for (const auto& row : rep.rows) {
      const double exact = std::exp(-2.0 * pi * row.rho.imag());
      CHECK(std::abs(row.rel_error - exact) < 1e-7);
    }
    CHECK(rep.decreasing);
  }
}

TEST_CASE("asym_report: v1 against cos rho(x - T)") {
  // v1 / prediction = 1 + exp(2 i rho (T - x))
  const auto rep = asym_report(AsymQuantity::v1, 2.5, 0, ray({1.0, 2.0, 4.0, 8.0}), dirichlet());
  for (const auto& row : rep.rows)
    CHECK(std::abs(row.rel_error - std::exp(-2.0 * row.rho.imag() * (pi - 2.5))) < 1e-7);
  CHECK(rep.decreasing);
}

TEST_CASE("asym_report: Delta1 regression corpus along arg pi/3") {
  const std::vector<Potential> corpus{Potential::zero(pi), Potential::constant(pi, 1.0), random_smooth(2024)};
  for (const auto& q : corpus) {
    const auto rep = asym_report(AsymQuantity::Delta1, 0.0, 0, ray({5.0, 10.0, 20.0, 40.0}), dirichlet(q));
    CHECK(rep.decreasing);
    CHECK(rep.final_error < 0.05);
  }
}

TEST_CASE("asym_report: leading terms for a nonlocal U1") {
  // sigma_1 constant after t = 1, so the varphi and v2 terms apply for x > 1/2.
  const BVMeasure m(pi, {1.5, 0.5}, {{0.6, {0.3, -0.2}}}, Density{{0.1, 1.0}, {{0.4, 0.1}, {-0.2, 0.3}}});
  const ProblemSpec s{Potential::cosine(pi, {0.3, {0.2, 0.4}, -0.5}), LinearForm::nonlocal(m), LinearForm::point(2.0)};
  const auto r = ray({5.0, 10.0, 20.0, 40.0, 80.0});
  const double x = pi / 2;
  for (auto q : {AsymQuantity::Phi, AsymQuantity::v1, AsymQuantity::Delta1, AsymQuantity::Delta11,
                 AsymQuantity::varphi, AsymQuantity::v2})
    for (int nu : {0, 1}) {
      CAPTURE(to_string(q));
      CAPTURE(nu);
      const auto rep = asym_report(q, x, nu, r, s);
      CHECK(rep.decreasing);
      CHECK(rep.final_error < 0.05);
    }
}

TEST_CASE("bound_report: growth estimates stay bounded on a G_delta ray") {
  const auto s = dirichlet(random_smooth(7));
  RaySpec r = ray({5.0, 10.0, 20.0, 40.0, 80.0}, 0.3);
  r.domain = RaySpec::Domain::G;
  for (int n = 1; n <= 100; ++n) r.reference_rho.emplace_back(n);
  for (auto q : {AsymQuantity::v1, AsymQuantity::Phi, AsymQuantity::varphi, AsymQuantity::v2})
    for (int nu : {0, 1}) {
      CAPTURE(to_string(q));
      const auto rep = bound_report(q, 1.3, nu, r, s);
      CHECK(rep.bounded);
    }
  CHECK_THROWS_AS(bound_report(AsymQuantity::Delta1, 1.3, 0, r, s), InputError);
}

TEST_CASE("RaySpec: domain checks") {
  RaySpec r = ray({5.0, 10.0}, 0.05);
  CHECK_THROWS_AS(r.validate(), InputError);
  r = ray({10.0, 5.0});
  CHECK_THROWS_AS(r.validate(), InputError);
  r = ray({5.0}, 0.0);
  r.domain = RaySpec::Domain::G;
  r.reference_rho = {5.05};
  CHECK_THROWS_AS(r.validate(), InputError);
  r.reference_rho = {5.5};
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("write_csv: header and one row per radius") {
  const auto rep = asym_report(AsymQuantity::Delta1, 0.0, 0, ray({5.0, 10.0}), dirichlet());
  std::ostringstream os;
  write_csv(os, rep);
  const std::string out = os.str();
  CHECK(out.rfind("radius,re_rho,im_rho,log_abs_computed,arg_computed,log_abs_predicted,arg_predicted,rel_error\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 3);
}

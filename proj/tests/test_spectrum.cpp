#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nlsl/errors.hpp"
#include "nlsl/spectrum.hpp"

using namespace nlsl;
using std::numbers::pi;

namespace {

ProblemSpec dirichlet(double a = pi / 2, Potential q = Potential::zero(pi)) {
  return {std::move(q), LinearForm::point(0.0), LinearForm::point(a)};
}

SearchBox box(double re0, double re1, double im0 = -1.0, double im1 = 1.0) {
  SearchBox b;
  b.re_min = re0;
  b.re_max = re1;
  b.im_min = im0;
  b.im_max = im1;
  return b;
}

CharFunction char_fn(const ProblemSpec& s, CharKind k, const SearchBox& b) {
  return CharFunction(s, k, b.inflated(0.1).rho_max());
}

}  // namespace

TEST_CASE("count_zeros: closed-form zero counts") {
  const auto s = dirichlet();
  const SearchBox b1 = box(0.5, 10.5);
  CHECK(count_zeros(char_fn(s, CharKind::delta1, b1), b1) == 3);
  const SearchBox b2 = box(1.5, 3.5);
  CHECK(count_zeros(char_fn(s, CharKind::delta1, b2), b2) == 0);
  const SearchBox b3 = box(0.0, 7.0);
  CHECK(count_zeros(char_fn(s, CharKind::delta11, b3), b3) == 3);
}

TEST_CASE("count_zeros: a zero on the contour is nudged inside") {
  const auto s = dirichlet();
  const SearchBox b = box(1.0, 5.0);
  CHECK(count_zeros(char_fn(s, CharKind::delta1, b), b) == 2);
}

TEST_CASE("count_zeros: winding numbers add up over a partition") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = Potential::cosine(pi, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), 0.0}});
  const auto s = dirichlet(1.0, q);
  const SearchBox whole = box(-3.3, 40.7, -2.1, 2.3);
  const auto f = char_fn(s, CharKind::delta1, whole);
  const int total = count_zeros(f, whole);
  CHECK(total == 6);
  int sum = 0;
  const double xs[] = {-3.3, 7.9, 19.3, 30.1, 40.7};
  const double ys[] = {-2.1, 0.37, 2.3};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) sum += count_zeros(f, box(xs[i], xs[i + 1], ys[j], ys[j + 1]));
  CHECK(sum == total);
}

TEST_CASE("find_spectrum: Dirichlet eigenvalues n^2") {
  const auto sp = find_spectrum(dirichlet(), CharKind::delta1, box(0.5, 110.0));
  REQUIRE(sp.entries.size() == 10);
  CHECK(sp.winding_total == 10);
  for (int n = 1; n <= 10; ++n) {
    CHECK(std::abs(sp.entries[n - 1].lambda - double(n * n)) < 1e-8);
    CHECK(sp.entries[n - 1].multiplicity == 1);
  }
}

TEST_CASE("find_spectrum: residual bound at every reported eigenvalue") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto q = Potential::cosine(pi, {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
  const auto s = dirichlet(1.0, q);
  const SearchBox b = box(-5.0, 50.0, -3.0, 3.0);
  const auto f = char_fn(s, CharKind::omega, b);
  const SpectrumOptions opts;
  const auto sp = find_spectrum(f, b, opts);
  CHECK(!sp.entries.empty());
  for (const auto& e : sp.entries)
    CHECK(f(e.lambda).log_abs() <= std::log(opts.tol) + log_modulus_scale(e.lambda, pi));
}

TEST_CASE("find_spectrum: constant shift moves the spectrum") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<cplx> coeffs{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
  const double c = 1.5;
  auto shifted = coeffs;
  shifted[0] += c;
  const SearchBox b = box(-2.0, 40.0, -3.0, 3.0);
  const SearchBox bc = box(-2.0 + c, 40.0 + c, -3.0, 3.0);
  GridOptions g;
  g.rho_ref = 8.0;  // one grid for both, so the shift is exact up to rounding
  const auto a = find_spectrum(dirichlet(1.0, Potential::cosine(pi, coeffs)), CharKind::delta1, b, {}, g);
  const auto s = find_spectrum(dirichlet(1.0, Potential::cosine(pi, shifted)), CharKind::delta1, bc, {}, g);
  REQUIRE(a.entries.size() == s.entries.size());
  REQUIRE(!a.entries.empty());
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    CHECK(std::abs(a.entries[i].lambda + c - s.entries[i].lambda) < 1e-7);
}

TEST_CASE("find_spectrum: conjugate pairs for a real nonlocal problem") {
  const BVMeasure m(pi, 1.0, {{1.0, 4.0}}, Density{{0.5, 2.5}, {-3.0, 3.0}});
  const ProblemSpec s{Potential::cosine(pi, {0.3, -0.8}), LinearForm::nonlocal(m), LinearForm::point(2.0)};
  const SearchBox b = box(-10.0, 30.0, -6.0, 6.0);
  for (CharKind k : {CharKind::omega, CharKind::delta1, CharKind::delta11}) {
    const auto sp = find_spectrum(s, k, b);
    CHECK(!sp.entries.empty());
    for (const auto& e : sp.entries) {
      const auto it = std::find_if(sp.entries.begin(), sp.entries.end(), [&](const Eigenvalue& o) {
        return std::abs(o.lambda - std::conj(e.lambda)) < 1e-7 * (1.0 + std::abs(e.lambda));
      });
      CHECK(it != sp.entries.end());
    }
  }
}

TEST_CASE("find_spectrum: Delta1 and Delta11 zeros are disjoint") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const BVMeasure m(pi, {1.0, 0.2}, {{0.7, {u(rng), u(rng)}}}, Density{{0.2, 1.9}, {{u(rng), u(rng)}, {u(rng), u(rng)}}});
  const ProblemSpec s{Potential::cosine(pi, {{u(rng), u(rng)}, {u(rng), u(rng)}}), LinearForm::nonlocal(m),
                      LinearForm::point(1.0)};
  const SearchBox b = box(-5.0, 40.0, -4.0, 4.0);
  const auto d1 = find_spectrum(s, CharKind::delta1, b).values();
  const auto d11 = find_spectrum(s, CharKind::delta11, b).values();
  CHECK(!d1.empty());
  CHECK(!d11.empty());
  CHECK(separation(d1, d11, 1e-6).holds);
}

TEST_CASE("find_spectrum: real fast path matches the contour search") {
  const auto s = dirichlet(1.0, Potential::cosine(pi, {0.4, 0.3, -0.2}));
  const SearchBox b = box(-2.0, 60.0);
  SpectrumOptions fast;
  fast.real_fast_path = true;
  const auto a = find_spectrum(s, CharKind::delta1, b);
  const auto r = find_spectrum(s, CharKind::delta1, b, fast);
  REQUIRE(a.entries.size() == r.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i)
    CHECK(std::abs(a.entries[i].lambda - r.entries[i].lambda) < 1e-8);

  const ProblemSpec complex_q = dirichlet(1.0, Potential::constant(pi, {0.0, 1.0}));
  CHECK_THROWS_AS(find_spectrum(complex_q, CharKind::delta1, b, fast), InputError);
}

TEST_CASE("condition_S: closed-form examples") {
  const SearchBox b = box(0.5, 40.0);
  const auto fails = condition_S(dirichlet(pi / 2), b, 1e-6);
  CHECK_FALSE(fails.holds);
  CHECK(fails.min_gap < 1e-7);
  REQUIRE(fails.closest);
  // a shared zero (2n)^2
  const double r = std::sqrt(fails.closest->first.real()) / 2.0;
  CHECK(std::abs(r - std::round(r)) < 1e-6);

  const auto holds = condition_S(dirichlet(1.0), b, 1e-6);
  CHECK(holds.holds);
  CHECK(holds.min_gap > 0.1);

  const auto empty = condition_S(dirichlet(1.0), box(3.0, 3.0), 1e-6);
  CHECK(empty.holds);
  CHECK(std::isinf(empty.min_gap));
}

TEST_CASE("separation: nearest pair") {
  const std::vector<cplx> a{1.0, {2.0, 1.0}};
  const std::vector<cplx> b{{2.0, 1.5}, 10.0};
  const auto r = separation(a, b, 0.1);
  CHECK(r.holds);
  CHECK(r.min_gap == doctest::Approx(0.5));
  CHECK(r.closest->first == cplx(2.0, 1.0));
  CHECK(separation(a, {}, 0.1).holds);
}

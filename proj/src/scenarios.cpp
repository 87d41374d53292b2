#include "nlsl/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlsl/errors.hpp"
#include "nlsl/inversion.hpp"
#include "nlsl/parallel.hpp"

namespace nlsl {

namespace {

constexpr double kPi = std::numbers::pi;

double sup_abs(const Potential& q) {
  double m = 0.0;
  for (int i = 0; i <= 2000; ++i) m = std::max(m, std::abs(q(q.T() * i / 2000.0)));
  return m;
}

void check_pi(const Potential& q, std::string_view what) {
  if (std::abs(q.T() - kPi) > 1e-12) throw InputError(std::string(what) + ": requires T = pi");
}

// q(x) = q(x + pi/2) on (0, pi/2), sampled including both one-sided limits.
void check_half_periodic(const Potential& q) {
  const double tol = 1e-10 * (1.0 + sup_abs(q));
  for (int i = 0; i <= 2000; ++i) {
    const double x = 0.5 * kPi * i / 2000.0;
    const double y = std::min(x + 0.5 * kPi, kPi);
    if (std::abs(q(x) - q(y)) > tol || (i > 0 && std::abs(q.left_limit(x) - q.left_limit(y)) > tol)) {
      std::ostringstream os;
      os << "counterexample1: q must satisfy q(x) = q(x + pi/2) on (0, pi/2); fails at x = " << x;
      throw InputError(os.str());
    }
  }
}

// Closed intervals, so the one-sided values at alpha0 and pi - alpha0 facing the ends count.
void check_vanishing_ends(const Potential& q, double alpha0) {
  std::vector<cplx> vals = {q(0.0), q.left_limit(alpha0), q(kPi - alpha0), q.left_limit(kPi)};
  std::vector<double> at = {0.0, alpha0, kPi - alpha0, kPi};
  for (int i = 1; i < 1000; ++i) {
    const double x = alpha0 * i / 1000.0;
    for (double y : {x, kPi - x}) {
      vals.push_back(q(y));
      at.push_back(y);
    }
  }
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] != cplx{}) {
      std::ostringstream os;
      os << "counterexample2: q must vanish on [0, alpha0] and [pi - alpha0, pi]; q(" << at[i] << ") != 0";
      throw InputError(os.str());
    }
}

ProblemSpec dirichlet_pair(const Potential& q, double b) {
  return {q, LinearForm::point(0.0), LinearForm::point(b)};
}

GridDeviation compare(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  GridDeviation d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.max_dev = std::max(d.max_dev, std::abs(a[i] - b[i]));
    d.scale = std::max({d.scale, std::abs(a[i]), std::abs(b[i])});
  }
  return d;
}

}  // namespace

std::string_view to_string(ScenarioName n) {
  switch (n) {
    case ScenarioName::counterexample1: return "counterexample1";
    case ScenarioName::counterexample2: return "counterexample2";
    case ScenarioName::three_spectra: return "three_spectra";
  }
  return "?";
}

ScenarioName scenario_from_string(std::string_view s) {
  for (auto n : {ScenarioName::counterexample1, ScenarioName::counterexample2, ScenarioName::three_spectra})
    if (to_string(n) == s) return n;
  throw InputError("unknown scenario '" + std::string(s) + "'");
}

Potential counterexample1_potential(double amplitude, int cells) {
  if (cells < 2 || cells % 2 != 0) throw InputError("counterexample1 preset needs an even cell count");
  std::vector<double> nodes;
  std::vector<cplx> values;
  const int half = cells / 2;
  for (int k = 0; k <= cells; ++k) {
    nodes.push_back(kPi * k / cells);
    const double s = 0.5 * kPi * (k % half) / half;
    values.emplace_back(amplitude * s * (0.5 * kPi - s) * (0.5 * kPi - s));
  }
  nodes.back() = kPi;
  return Potential::from_grid(std::move(nodes), std::move(values));
}

Potential counterexample2_potential(double alpha0) {
  if (!(alpha0 > 0.0 && alpha0 < 0.5 * kPi)) throw InputError("counterexample2: alpha0 must lie in (0, pi/2)");
  const double lo = alpha0, hi = kPi - alpha0, w = hi - lo;
  return Potential::piecewise(kPi, {lo, lo + 0.35 * w, lo + 0.6 * w, hi}, {0.0, 1.5, -0.7, 0.8, 0.0});
}

SearchBox default_scenario_box() {
  SearchBox b;
  b.re_min = -20.0;
  b.re_max = 150.0;
  b.im_min = -1.0;
  b.im_max = 1.0;
  return b;
}

ScenarioConfig build(ScenarioName name, const ScenarioParams& params) {
  const SearchBox box = params.box.value_or(default_scenario_box());
  if (!(params.separation_tol > 0.0)) throw InputError("separation_tol must be positive");
  switch (name) {
    case ScenarioName::counterexample1: {
      const Potential q = params.q.value_or(counterexample1_potential());
      check_pi(q, "counterexample1");
      check_half_periodic(q);
      return ScenarioConfig{.name = name,
                            .separation_tol = params.separation_tol,
                            .box = box,
                            .spec = dirichlet_pair(q, 0.5 * kPi),
                            .spec_tilde = dirichlet_pair(q.reflected(), 0.5 * kPi)};
    }
    case ScenarioName::counterexample2: {
      const double alpha0 = params.alpha0;
      if (!(alpha0 > 0.0 && alpha0 < 0.5 * kPi)) throw InputError("counterexample2: alpha0 must lie in (0, pi/2)");
      const Potential q = params.q.value_or(counterexample2_potential(alpha0));
      check_pi(q, "counterexample2");
      check_vanishing_ends(q, alpha0);
      double alpha = 0.0;
      if (params.alpha) {
        alpha = *params.alpha;
        if (!(alpha > 0.0 && alpha < alpha0)) throw InputError("counterexample2: alpha must lie in (0, alpha0)");
      } else {
        // geometric decrease until the spectra are clearly apart on the box
        for (int k = 1; k <= 40 && alpha == 0.0; ++k) {
          const double cand = alpha0 * std::pow(0.8, k);
          if (condition_S(dirichlet_pair(q, kPi - cand), box, params.separation_tol).min_gap >
              10.0 * params.separation_tol)
            alpha = cand;
        }
        if (alpha == 0.0) throw ConsistencyError("counterexample2: no alpha separates the spectra on the box");
      }
      return ScenarioConfig{.name = name,
                            .alpha = alpha,
                            .alpha0 = alpha0,
                            .separation_tol = params.separation_tol,
                            .box = box,
                            .spec = dirichlet_pair(q, kPi - alpha),
                            .spec_tilde = dirichlet_pair(q.reflected(), kPi - alpha)};
    }
    case ScenarioName::three_spectra: {
      const Potential q = params.q.value_or(Potential::cosine(params.T, {0.4, -0.5, 0.3, 0.2}));
      if (!(params.a > 0.0 && params.a < q.T())) throw InputError("three_spectra: a must lie in (0, T)");
      return ScenarioConfig{.name = name,
                            .a = params.a,
                            .separation_tol = params.separation_tol,
                            .box = box,
                            .spec = dirichlet_pair(q, params.a),
                            .spec_tilde = dirichlet_pair(q.reflected(), params.a)};
    }
  }
  throw InputError("unknown scenario");
}

CounterexampleReport verify_counterexample(const ScenarioConfig& cfg, const std::vector<cplx>& lambdas,
                                           double rel_tol) {
  if (cfg.name == ScenarioName::three_spectra)
    throw InputError("verify_counterexample applies to counterexample1 and counterexample2");
  CounterexampleReport rep;

  double rho = 1.0;
  for (cplx l : lambdas) rho = std::max(rho, std::sqrt(std::abs(l)));
  GridOptions g;
  g.rho_ref = rho;

  struct Row {
    cplx d1, d2, om;
  };
  const auto eval = [&](const ProblemSpec& s) {
    std::vector<Row> rows(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
      const auto p = SpectralPoint::from_lambda(lambdas[i]);
      rows[i] = {delta_j(s, 1, p, g).value.value(), delta_j(s, 2, p, g).value.value(), omega(s, p, g)};
    });
    return rows;
  };
  const auto ra = eval(cfg.spec), rb = eval(cfg.spec_tilde);
  std::vector<cplx> d1a, d1b, d2a, d2b, oma, omb, ma, mb;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    d1a.push_back(ra[i].d1);
    d1b.push_back(rb[i].d1);
    d2a.push_back(ra[i].d2);
    d2b.push_back(rb[i].d2);
    oma.push_back(ra[i].om);
    omb.push_back(rb[i].om);
    if (ra[i].d1 == cplx{} || rb[i].d1 == cplx{}) throw PoleError("lambda grid hits an eigenvalue of L1");
    ma.push_back(ra[i].d2 / ra[i].d1);
    mb.push_back(rb[i].d2 / rb[i].d1);
  }
  rep.delta1 = compare(d1a, d1b);
  rep.delta2 = compare(d2a, d2b);
  rep.omega = compare(oma, omb);
  rep.M = compare(ma, mb);
  rep.q_distance = sup_distance(cfg.spec.q, cfg.spec_tilde.q);
  rep.S = condition_S(cfg.spec, cfg.box, cfg.separation_tol);
  rep.S_tilde = condition_S(cfg.spec_tilde, cfg.box, cfg.separation_tol);

  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) rep.failures.push_back(what);
  };
  if (cfg.name == ScenarioName::counterexample1) {
    DistinguishGrid dg;
    dg.lambdas = lambdas;
    dg.box = cfg.box;
    rep.d_score = distinguishability(cfg.spec, cfg.spec_tilde, TargetKind::weyl_pair_with_D, dg).score;
    need(rep.M.within(rel_tol), "M differs from M~");
    need(rep.omega.within(rel_tol), "omega differs from omega~");
    need(rep.q_distance > 0.1, "q and q~ are within 0.1");
    need(!rep.S.holds, "condition S holds");
  } else {
    // L2 is the Dirichlet problem on (pi - alpha, pi), where q vanishes
    const double a = cfg.alpha;
    SearchBox b2;
    b2.re_min = 1.0;
    b2.re_max = 4.5 * std::pow(kPi / a, 2);
    b2.im_min = -1.0;
    b2.im_max = 1.0;
    SpectrumOptions opts;
    opts.real_fast_path = is_self_adjoint(cfg.spec);
    const auto l2 = find_spectrum(cfg.spec, CharKind::delta2, b2, opts).values();
    double err = 0.0;
    for (int n = 1; n <= 2; ++n) {
      const double want = std::pow(kPi * n / a, 2);
      double best = std::numeric_limits<double>::infinity();
      for (cplx z : l2) best = std::min(best, std::abs(z - want));
      err = std::max(err, best / want);
    }
    rep.lambda2_closed_form_error = err;
    need(rep.delta1.within(rel_tol), "Delta1 differs from Delta1~");
    need(rep.delta2.within(rel_tol), "Delta2 differs from Delta2~");
    need(rep.M.within(rel_tol), "M differs from M~");
    need(rep.S.holds && rep.S.min_gap > 10.0 * cfg.separation_tol, "condition S fails or is marginal");
    need(err < 1e-6, "Lambda2 does not contain (pi n / alpha)^2");
  }
  rep.expectations_met = rep.failures.empty();
  return rep;
}

OverlapReport three_spectra_overlap_rule(const ProblemSpec& spec, double a, const SearchBox& box, double tol) {
  const auto is_eval = [](const LinearForm& f, double x) {
    return f.is_point() && f.as_point().order == 0 && f.as_point().x == x;
  };
  if (!is_eval(spec.U1, 0.0) || !is_eval(spec.U2, a))
    throw InputError("overlap rule requires U1 = y(0) and U2 = y(a)");
  OverlapReport rep;
  if (box.empty()) return rep;

  const double rho = box.inflated(0.1).rho_max();
  SpectrumOptions opts;
  opts.real_fast_path = is_self_adjoint(spec);
  GridOptions g;
  g.rho_ref = rho;
  std::vector<std::vector<cplx>> sets;
  for (CharKind k : {CharKind::omega, CharKind::delta1, CharKind::delta2})
    sets.push_back(find_spectrum(CharFunction(spec, k, rho, g), box, opts).values());

  const auto near = [&](cplx z, const std::vector<cplx>& s, bool& ambiguous) {
    const double r = tol * (1.0 + std::abs(z));
    bool hit = false;
    for (cplx w : s) {
      const double d = std::abs(z - w);
      if (d <= r) hit = true;
      else if (d <= 100.0 * r) ambiguous = true;
    }
    return hit;
  };
  std::vector<cplx> seen;
  for (const auto& s : sets)
    for (cplx z : s) {
      bool ignored = false;
      if (near(z, seen, ignored)) continue;
      seen.push_back(z);
      OverlapEntry e;
      e.lambda = z;
      bool ambiguous = false;
      e.in_L0 = near(z, sets[0], ambiguous);
      e.in_L1 = near(z, sets[1], ambiguous);
      e.in_L2 = near(z, sets[2], ambiguous);
      e.count = e.in_L0 + e.in_L1 + e.in_L2;
      if (ambiguous) {
        std::ostringstream os;
        os << "zero near " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
           << "i is within 100 tol of another problem's zero";
        rep.warnings.push_back(os.str());
      }
      if (e.count == 1) ++rep.exactly_one;
      else if (e.count == 2) ++rep.exactly_two;
      else ++rep.exactly_three;
      rep.entries.push_back(e);
    }
  std::sort(rep.entries.begin(), rep.entries.end(), [](const OverlapEntry& x, const OverlapEntry& y) {
    return x.lambda.real() < y.lambda.real();
  });
  return rep;
}

}  // namespace nlsl

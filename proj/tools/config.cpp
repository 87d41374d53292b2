#include "nlsl/config.hpp"

#include <limits>
#include <numbers>
#include <sstream>

#include "json_reader.hpp"

namespace nlsl {

namespace {

using detail::json;
using detail::JsonReader;

std::string join(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& s : v) os << "\n  " << s;
  return os.str();
}

template <class E, class F>
std::optional<E> enum_value(JsonReader& r, const json& j, const std::string& path, F&& from_string) {
  const auto s = r.string(j, path);
  if (!s) return std::nullopt;
  try {
    return from_string(*s);
  } catch (const Error& e) {
    r.fail(path, e.what());
    return std::nullopt;
  }
}

// Runs a library constructor, recording its InputError at path.
template <class F>
auto guarded(JsonReader& r, const std::string& path, F&& make) -> std::optional<decltype(make())> {
  try {
    return make();
  } catch (const Error& e) {
    r.fail(path, e.what());
    return std::nullopt;
  }
}

std::optional<double> positive(JsonReader& r, const json& j, const std::string& path) {
  const auto v = r.number(j, path);
  if (v && !(*v > 0.0)) {
    r.fail(path, "must be positive");
    return std::nullopt;
  }
  return v;
}

std::optional<Potential> read_potential(JsonReader& r, const json& j, const std::string& path, double T) {
  if (!j.is_object()) {
    r.fail(path, "expected an object");
    return std::nullopt;
  }
  std::optional<std::string> type;
  r.required(j, "type", path, [&](const json& v, const std::string& p) { type = r.string(v, p); });
  if (!type) return std::nullopt;
  const auto allow = [&](std::initializer_list<std::string_view> keys) { r.object(j, path, keys); };
  if (*type == "zero") {
    allow({"type"});
    return Potential::zero(T);
  }
  if (*type == "constant") {
    allow({"type", "value"});
    std::optional<cplx> c;
    r.required(j, "value", path, [&](const json& v, const std::string& p) { c = r.complex(v, p); });
    if (!c) return std::nullopt;
    return Potential::constant(T, *c);
  }
  if (*type == "cosine") {
    allow({"type", "coefficients"});
    std::optional<std::vector<cplx>> c;
    r.required(j, "coefficients", path, [&](const json& v, const std::string& p) { c = r.complexes(v, p); });
    if (!c) return std::nullopt;
    return guarded(r, path, [&] { return Potential::cosine(T, *c); });
  }
  if (*type == "grid") {
    allow({"type", "nodes", "values"});
    std::optional<std::vector<double>> nodes;
    std::optional<std::vector<cplx>> values;
    r.required(j, "nodes", path, [&](const json& v, const std::string& p) { nodes = r.numbers(v, p); });
    r.required(j, "values", path, [&](const json& v, const std::string& p) { values = r.complexes(v, p); });
    if (!nodes || !values) return std::nullopt;
    if (!nodes->empty() && std::abs(nodes->back() - T) > 1e-12 * T) {
      r.fail(path + ".nodes", "last node must equal T");
      return std::nullopt;
    }
    return guarded(r, path, [&] { return Potential::from_grid(*nodes, *values); });
  }
  if (*type == "piecewise") {
    allow({"type", "breakpoints", "values"});
    std::optional<std::vector<double>> b;
    std::optional<std::vector<cplx>> values;
    r.required(j, "breakpoints", path, [&](const json& v, const std::string& p) { b = r.numbers(v, p); });
    r.required(j, "values", path, [&](const json& v, const std::string& p) { values = r.complexes(v, p); });
    if (!b || !values) return std::nullopt;
    return guarded(r, path, [&] { return Potential::piecewise(T, *b, *values); });
  }
  r.fail(path + ".type", "expected one of zero, constant, cosine, grid, piecewise");
  return std::nullopt;
}

std::optional<BVMeasure> read_measure(JsonReader& r, const json& j, const std::string& path, double T) {
  if (!r.object(j, path, {"jump", "atoms", "density"})) return std::nullopt;
  bool ok = true;
  cplx jump{};
  std::vector<Atom> atoms;
  Density density;
  r.member(j, "jump", path, [&](const json& v, const std::string& p) {
    const auto c = r.complex(v, p);
    if (c) jump = *c;
    else ok = false;
  });
  r.member(j, "atoms", path, [&](const json& v, const std::string& p) {
    if (!v.is_array()) {
      r.fail(p, "expected an array of [t, [re, im]] pairs");
      ok = false;
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 2) {
        r.fail(pi, "expected an atom [t, [re, im]]");
        ok = false;
        continue;
      }
      const auto t = r.number(v[i][0], pi + "[0]");
      const auto w = r.complex(v[i][1], pi + "[1]");
      if (!t || !w) {
        ok = false;
        continue;
      }
      if (*t == 0.0) {
        r.fail(pi, "atom at t = 0 is not allowed: the mass at 0 belongs in 'jump'");
        ok = false;
      } else if (!(*t > 0.0 && *t <= T)) {
        r.fail(pi + "[0]", "atom location must lie in (0, T]");
        ok = false;
      } else {
        atoms.push_back({*t, *w});
      }
    }
  });
  r.member(j, "density", path, [&](const json& v, const std::string& p) {
    if (!r.object(v, p, {"breakpoints", "values"})) {
      ok = false;
      return;
    }
    std::optional<std::vector<double>> b;
    std::optional<std::vector<cplx>> vals;
    r.required(v, "breakpoints", p, [&](const json& x, const std::string& q) { b = r.numbers(x, q); });
    r.required(v, "values", p, [&](const json& x, const std::string& q) { vals = r.complexes(x, q); });
    if (b && vals) density = Density{*b, *vals};
    else ok = false;
  });
  if (!ok) return std::nullopt;
  return guarded(r, path, [&] { return BVMeasure(T, jump, atoms, density); });
}

std::optional<LinearForm> read_form(JsonReader& r, const json& j, const std::string& path, double T) {
  if (!r.object(j, path, {"point", "measure"})) return std::nullopt;
  if (j.contains("point") == j.contains("measure")) {
    r.fail(path, "exactly one of 'point' or 'measure' is required");
    return std::nullopt;
  }
  if (j.contains("measure")) {
    const auto m = read_measure(r, j.at("measure"), path + ".measure", T);
    if (!m) return std::nullopt;
    return LinearForm::nonlocal(*m);
  }
  const std::string p = path + ".point";
  const json& pt = j.at("point");
  if (!r.object(pt, p, {"x", "order"})) return std::nullopt;
  std::optional<double> x;
  long long order = 0;
  r.required(pt, "x", p, [&](const json& v, const std::string& q) { x = r.number(v, q); });
  r.member(pt, "order", p, [&](const json& v, const std::string& q) {
    const auto o = r.integer(v, q);
    if (o && (*o == 0 || *o == 1)) order = *o;
    else if (o) r.fail(q, "order must be 0 or 1");
  });
  if (!x) return std::nullopt;
  if (!(*x >= 0.0 && *x <= T)) {
    r.fail(p + ".x", "evaluation point must lie in [0, T]");
    return std::nullopt;
  }
  return LinearForm::point(*x, static_cast<int>(order));
}

std::optional<SearchBox> read_box(JsonReader& r, const json& j, const std::string& path) {
  if (!r.object(j, path, {"re", "im", "sample_phase", "max_depth"})) return std::nullopt;
  SearchBox b;
  bool ok = true;
  const auto range = [&](const char* key, double& lo, double& hi) {
    r.required(j, key, path, [&](const json& v, const std::string& p) {
      const auto n = r.numbers(v, p);
      if (!n || n->size() != 2) {
        if (n) r.fail(p, "expected [min, max]");
        ok = false;
        return;
      }
      lo = (*n)[0];
      hi = (*n)[1];
      if (!(lo <= hi)) {
        r.fail(p, "min must not exceed max");
        ok = false;
      }
    });
  };
  range("re", b.re_min, b.re_max);
  range("im", b.im_min, b.im_max);
  r.member(j, "sample_phase", path, [&](const json& v, const std::string& p) {
    const auto s = positive(r, v, p);
    if (s) b.sample_phase = *s;
  });
  r.member(j, "max_depth", path, [&](const json& v, const std::string& p) {
    const auto d = r.integer(v, p);
    if (d && *d >= 1 && *d <= 60) b.max_depth = static_cast<int>(*d);
    else if (d) r.fail(p, "must lie in [1, 60]");
  });
  if (!ok) return std::nullopt;
  return b;
}

void read_grid(JsonReader& r, const json& j, const std::string& path, GridOptions& g) {
  if (!r.object(j, path, {"h_max", "phase_step"})) return;
  r.member(j, "h_max", path, [&](const json& v, const std::string& p) {
    if (const auto x = positive(r, v, p)) g.h_max = *x;
  });
  r.member(j, "phase_step", path, [&](const json& v, const std::string& p) {
    if (const auto x = positive(r, v, p)) g.phase_step = *x;
  });
}

// T, potential, U1, U2 at the level of obj.
std::optional<ProblemSpec> read_problem(JsonReader& r, const json& obj, const std::string& path, bool need_potential) {
  std::optional<double> T;
  r.required(obj, "T", path, [&](const json& v, const std::string& p) { T = positive(r, v, p); });
  if (!T) return std::nullopt;
  std::optional<Potential> q = Potential::zero(*T);
  if (need_potential)
    r.required(obj, "potential", path,
               [&](const json& v, const std::string& p) { q = read_potential(r, v, p, *T); });
  else
    r.member(obj, "potential", path, [&](const json& v, const std::string& p) { q = read_potential(r, v, p, *T); });
  std::optional<LinearForm> u1, u2;
  r.required(obj, "U1", path, [&](const json& v, const std::string& p) { u1 = read_form(r, v, p, *T); });
  r.required(obj, "U2", path, [&](const json& v, const std::string& p) { u2 = read_form(r, v, p, *T); });
  if (!q || !u1 || !u2) return std::nullopt;
  ProblemSpec spec{*q, *u1, *u2};
  if (!guarded(r, path, [&] {
        spec.validate();
        return true;
      }))
    return std::nullopt;
  return spec;
}

SpectrumSection read_spectrum(JsonReader& r, const json& j, const std::string& path) {
  SpectrumSection s;
  if (!r.object(j, path, {"which", "box", "tol", "fast_path"})) return s;
  r.member(j, "which", path, [&](const json& v, const std::string& p) {
    if (auto k = enum_value<CharKind>(r, v, p, char_kind_from_string)) s.which = *k;
  });
  r.required(j, "box", path, [&](const json& v, const std::string& p) {
    if (auto b = read_box(r, v, p)) s.box = *b;
  });
  r.member(j, "tol", path, [&](const json& v, const std::string& p) {
    if (auto t = positive(r, v, p)) s.tol = *t;
  });
  r.member(j, "fast_path", path, [&](const json& v, const std::string& p) { s.fast_path = r.boolean(v, p); });
  return s;
}

AsymSection read_asym(JsonReader& r, const json& j, const std::string& path) {
  AsymSection a;
  if (!r.object(j, path, {"quantity", "x", "nu", "domain", "delta", "arg", "radii", "reference_rho"})) return a;
  r.member(j, "quantity", path, [&](const json& v, const std::string& p) {
    if (auto q = enum_value<AsymQuantity>(r, v, p, asym_quantity_from_string)) a.quantity = *q;
  });
  r.member(j, "x", path, [&](const json& v, const std::string& p) {
    if (auto x = r.number(v, p)) a.x = *x;
  });
  r.member(j, "nu", path, [&](const json& v, const std::string& p) {
    const auto n = r.integer(v, p);
    if (n && (*n == 0 || *n == 1)) a.nu = static_cast<int>(*n);
    else if (n) r.fail(p, "nu must be 0 or 1");
  });
  r.member(j, "domain", path, [&](const json& v, const std::string& p) {
    const auto s = r.string(v, p);
    if (s && *s == "Pi") a.rays.domain = RaySpec::Domain::Pi;
    else if (s && *s == "G") a.rays.domain = RaySpec::Domain::G;
    else if (s) r.fail(p, "domain must be Pi or G");
  });
  r.member(j, "delta", path, [&](const json& v, const std::string& p) {
    if (auto d = positive(r, v, p)) a.rays.delta = *d;
  });
  r.member(j, "arg", path, [&](const json& v, const std::string& p) {
    if (auto x = r.number(v, p)) a.rays.arg = *x;
  });
  r.member(j, "radii", path, [&](const json& v, const std::string& p) {
    if (auto x = r.numbers(v, p)) a.rays.radii = *x;
  });
  r.member(j, "reference_rho", path, [&](const json& v, const std::string& p) {
    if (auto x = r.complexes(v, p)) a.rays.reference_rho = *x;
  });
  guarded(r, path, [&] {
    a.rays.validate();
    return true;
  });
  return a;
}

InvertSection read_invert(JsonReader& r, const json& j, const std::string& path, double T) {
  InvertSection s;
  s.basis.T = T;
  if (!r.object(j, path, {"target", "count", "lambdas", "separation_tol", "basis", "initial", "starts", "spread",
                          "tol", "max_iterations", "lower", "upper", "target_file"}))
    return s;
  r.member(j, "target", path, [&](const json& v, const std::string& p) {
    if (auto k = enum_value<TargetKind>(r, v, p, target_kind_from_string)) s.kind = *k;
  });
  r.member(j, "count", path, [&](const json& v, const std::string& p) {
    const auto c = r.integer(v, p);
    if (c && *c >= 1 && *c <= 200) s.synthesis.count = static_cast<int>(*c);
    else if (c) r.fail(p, "must lie in [1, 200]");
  });
  r.member(j, "lambdas", path, [&](const json& v, const std::string& p) {
    if (auto l = r.complexes(v, p)) s.synthesis.lambdas = *l;
  });
  r.member(j, "separation_tol", path, [&](const json& v, const std::string& p) {
    if (auto t = positive(r, v, p)) s.synthesis.separation_tol = *t;
  });
  r.member(j, "basis", path, [&](const json& v, const std::string& p) {
    if (!r.object(v, p, {"kind", "dim", "period"})) return;
    r.member(v, "kind", p, [&](const json& x, const std::string& q) {
      if (auto k = enum_value<Parameterization::Kind>(r, x, q, basis_from_string)) s.basis.kind = *k;
    });
    r.member(v, "dim", p, [&](const json& x, const std::string& q) {
      const auto d = r.integer(x, q);
      if (d && *d >= 1 && *d <= 64) s.basis.dim = static_cast<int>(*d);
      else if (d) r.fail(q, "must lie in [1, 64]");
    });
    r.member(v, "period", p, [&](const json& x, const std::string& q) {
      if (auto t = positive(r, x, q)) s.basis.period = *t;
    });
    guarded(r, p, [&] {
      s.basis.validate();
      return true;
    });
  });
  r.member(j, "initial", path, [&](const json& v, const std::string& p) {
    if (auto x = r.numbers(v, p)) s.initial = *x;
  });
  r.member(j, "starts", path, [&](const json& v, const std::string& p) {
    const auto c = r.integer(v, p);
    if (c && *c >= 1 && *c <= 1000) s.options.starts = static_cast<int>(*c);
    else if (c) r.fail(p, "must lie in [1, 1000]");
  });
  r.member(j, "spread", path, [&](const json& v, const std::string& p) {
    const auto x = r.number(v, p);
    if (x && *x >= 0.0) s.options.spread = *x;
    else if (x) r.fail(p, "must be non-negative");
  });
  r.member(j, "tol", path, [&](const json& v, const std::string& p) {
    if (auto t = positive(r, v, p)) s.options.tol = *t;
  });
  r.member(j, "max_iterations", path, [&](const json& v, const std::string& p) {
    const auto c = r.integer(v, p);
    if (c && *c >= 1) s.options.max_iterations = static_cast<int>(*c);
    else if (c) r.fail(p, "must be at least 1");
  });
  r.member(j, "lower", path, [&](const json& v, const std::string& p) {
    if (auto x = r.numbers(v, p)) s.options.lower = *x;
  });
  r.member(j, "upper", path, [&](const json& v, const std::string& p) {
    if (auto x = r.numbers(v, p)) s.options.upper = *x;
  });
  r.member(j, "target_file", path, [&](const json& v, const std::string& p) { s.target_file = r.string(v, p); });
  if (s.initial.empty()) s.initial.assign(s.basis.dim, 0.0);
  if (static_cast<int>(s.initial.size()) != s.basis.dim) r.fail(path + ".initial", "length must equal basis.dim");
  for (const auto* b : {&s.options.lower, &s.options.upper})
    if (!b->empty() && static_cast<int>(b->size()) != s.basis.dim)
      r.fail(path + (b == &s.options.lower ? ".lower" : ".upper"), "length must equal basis.dim");
  return s;
}

ScenarioSection read_scenario(JsonReader& r, const json& j, const std::string& path) {
  ScenarioSection s;
  if (!r.object(j, path, {"name", "alpha0", "alpha", "a", "T", "separation_tol", "box", "potential", "lambdas",
                          "rel_tol"}))
    return s;
  r.required(j, "name", path, [&](const json& v, const std::string& p) {
    if (auto n = enum_value<ScenarioName>(r, v, p, scenario_from_string)) s.name = *n;
  });
  auto& q = s.params;
  r.member(j, "alpha0", path, [&](const json& v, const std::string& p) {
    if (auto x = positive(r, v, p)) q.alpha0 = *x;
  });
  r.member(j, "alpha", path, [&](const json& v, const std::string& p) { q.alpha = positive(r, v, p); });
  r.member(j, "a", path, [&](const json& v, const std::string& p) {
    if (auto x = positive(r, v, p)) q.a = *x;
  });
  r.member(j, "T", path, [&](const json& v, const std::string& p) {
    if (auto x = positive(r, v, p)) q.T = *x;
  });
  r.member(j, "separation_tol", path, [&](const json& v, const std::string& p) {
    if (auto x = positive(r, v, p)) q.separation_tol = *x;
  });
  r.member(j, "box", path, [&](const json& v, const std::string& p) { q.box = read_box(r, v, p); });
  r.member(j, "potential", path, [&](const json& v, const std::string& p) {
    const double T = s.name == ScenarioName::three_spectra ? q.T : std::numbers::pi;
    q.q = read_potential(r, v, p, T);
  });
  r.member(j, "lambdas", path, [&](const json& v, const std::string& p) {
    if (auto l = r.complexes(v, p)) s.lambdas = *l;
  });
  r.member(j, "rel_tol", path, [&](const json& v, const std::string& p) {
    if (auto x = positive(r, v, p)) s.rel_tol = *x;
  });
  return s;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string(".: not valid JSON (") + e.what() + ")"});
  }
}

std::optional<DataGroup> read_group(JsonReader& r, const json& j, const std::string& path) {
  if (!r.object(j, path, {"type", "source", "box", "rho_ref", "points", "values", "infinite", "weights"}))
    return std::nullopt;
  DataGroup g;
  bool ok = true;
  r.required(j, "type", path, [&](const json& v, const std::string& p) {
    const auto s = r.string(v, p);
    bool found = false;
    for (auto t : {DataGroup::Type::spectrum, DataGroup::Type::weyl_M, DataGroup::Type::omega, DataGroup::Type::D})
      if (s && *s == to_string(t)) {
        g.type = t;
        found = true;
      }
    if (s && !found) r.fail(p, "expected spectrum, M, omega or D");
    ok = ok && found;
  });
  r.member(j, "source", path, [&](const json& v, const std::string& p) {
    if (auto k = enum_value<CharKind>(r, v, p, char_kind_from_string)) g.source = *k;
    else ok = false;
  });
  r.member(j, "box", path, [&](const json& v, const std::string& p) {
    if (auto b = read_box(r, v, p)) g.box = *b;
    else ok = false;
  });
  if (g.type == DataGroup::Type::spectrum && !j.contains("box")) r.fail(path + ".box", "spectrum groups need a box");
  r.required(j, "rho_ref", path, [&](const json& v, const std::string& p) {
    if (auto x = positive(r, v, p)) g.rho_ref = *x;
    else ok = false;
  });
  r.required(j, "points", path, [&](const json& v, const std::string& p) {
    if (auto x = r.complexes(v, p)) g.points = *x;
    else ok = false;
  });
  r.member(j, "values", path, [&](const json& v, const std::string& p) {
    if (auto x = r.complexes(v, p)) g.values = *x;
    else ok = false;
  });
  r.member(j, "infinite", path, [&](const json& v, const std::string& p) {
    if (!v.is_array()) {
      r.fail(p, "expected an array of booleans");
      ok = false;
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto b = r.boolean(v[i], p + "[" + std::to_string(i) + "]");
      g.infinite.push_back(b.value_or(false));
    }
  });
  r.member(j, "weights", path, [&](const json& v, const std::string& p) {
    if (auto x = r.numbers(v, p)) g.weights = *x;
    else ok = false;
  });
  // D values at infinity are stored as 0 with the flag set
  if (g.type == DataGroup::Type::D && g.values.size() == g.infinite.size())
    for (std::size_t i = 0; i < g.values.size(); ++i)
      if (g.infinite[i]) g.values[i] = 0.0;
  if (!ok) return std::nullopt;
  return g;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : InputError(join(issues)), issues_(std::move(issues)) {}

RunConfig parse_config(const std::string& text) {
  const json j = parse_json(text);
  JsonReader r;
  RunConfig cfg;
  if (!r.object(j, "", {"T", "potential", "U1", "U2", "grid", "seed", "output", "threads", "lambdas", "spectrum",
                        "asym", "invert", "scenario"}))
    throw ConfigError(r.issues);

  if (j.contains("T") || j.contains("potential") || j.contains("U1") || j.contains("U2"))
    cfg.problem = read_problem(r, j, "", true);
  r.member(j, "grid", "", [&](const json& v, const std::string& p) { read_grid(r, v, p, cfg.grid); });
  r.member(j, "seed", "", [&](const json& v, const std::string& p) {
    const auto s = r.integer(v, p);
    if (s && *s >= 0) cfg.seed = static_cast<std::uint64_t>(*s);
    else if (s) r.fail(p, "must be non-negative");
  });
  r.member(j, "output", "", [&](const json& v, const std::string& p) {
    if (!r.object(v, p, {"path", "format"})) return;
    r.member(v, "path", p, [&](const json& x, const std::string& q) {
      if (auto s = r.string(x, q)) cfg.output_path = *s;
    });
    r.member(v, "format", p, [&](const json& x, const std::string& q) {
      const auto s = r.string(x, q);
      if (s && (*s == "json" || *s == "csv")) cfg.format = *s;
      else if (s) r.fail(q, "format must be json or csv");
    });
  });
  r.member(j, "threads", "", [&](const json& v, const std::string& p) {
    const auto t = r.integer(v, p);
    if (t && *t >= 1 && *t <= 256) cfg.threads = static_cast<int>(*t);
    else if (t) r.fail(p, "must lie in [1, 256]");
  });
  r.member(j, "lambdas", "", [&](const json& v, const std::string& p) {
    if (auto l = r.complexes(v, p)) cfg.lambdas = *l;
  });
  r.member(j, "spectrum", "", [&](const json& v, const std::string& p) { cfg.spectrum = read_spectrum(r, v, p); });
  r.member(j, "asym", "", [&](const json& v, const std::string& p) { cfg.asym = read_asym(r, v, p); });
  r.member(j, "invert", "", [&](const json& v, const std::string& p) {
    if (!cfg.problem) r.fail(p, "invert needs the problem (T, potential, U1, U2)");
    cfg.invert = read_invert(r, v, p, cfg.problem ? cfg.problem->T() : 1.0);
  });
  r.member(j, "scenario", "", [&](const json& v, const std::string& p) { cfg.scenario = read_scenario(r, v, p); });
  if (cfg.invert) cfg.invert->options.seed = cfg.seed;
  if (!r.issues.empty()) throw ConfigError(r.issues);
  return cfg;
}

InverseTarget parse_target(const std::string& text) {
  const json j = parse_json(text);
  JsonReader r;
  if (!r.object(j, "", {"kind", "T", "potential", "U1", "U2", "grid", "groups", "certificate"}))
    throw ConfigError(r.issues);
  std::optional<TargetKind> kind;
  r.required(j, "kind", "", [&](const json& v, const std::string& p) {
    kind = enum_value<TargetKind>(r, v, p, target_kind_from_string);
  });
  auto spec = read_problem(r, j, "", false);
  GridOptions grid;
  r.member(j, "grid", "", [&](const json& v, const std::string& p) { read_grid(r, v, p, grid); });
  std::vector<DataGroup> groups;
  r.required(j, "groups", "", [&](const json& v, const std::string& p) {
    if (!v.is_array()) {
      r.fail(p, "expected an array of data groups");
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i)
      if (auto g = read_group(r, v[i], p + "[" + std::to_string(i) + "]")) groups.push_back(std::move(*g));
  });
  std::optional<SeparationReport> cert;
  r.member(j, "certificate", "", [&](const json& v, const std::string& p) {
    if (!r.object(v, p, {"holds", "min_gap"})) return;
    SeparationReport s;
    r.required(v, "holds", p, [&](const json& x, const std::string& q) { s.holds = r.boolean(x, q).value_or(false); });
    r.member(v, "min_gap", p, [&](const json& x, const std::string& q) {
      s.min_gap = x.is_null() ? std::numeric_limits<double>::infinity() : r.number(x, q).value_or(0.0);
    });
    cert = s;
  });
  if (!r.issues.empty() || !kind || !spec) throw ConfigError(r.issues);
  InverseTarget t{*kind, *spec, grid, std::move(groups), cert};
  // For three spectra condition S' is a property of the data themselves.
  if (t.kind == TargetKind::three_spectra && t.groups.size() == 3)
    t.certificate = separation(t.groups[0].points, t.groups[1].points, 1e-6);
  t.validate();
  return t;
}

}  // namespace nlsl

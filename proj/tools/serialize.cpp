#include "nlsl/serialize.hpp"

#include <cmath>

namespace nlsl {

namespace {

// Infinity has no JSON literal; null stands for it.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json complex_list(const std::vector<cplx>& v) {
  Json a = Json::array();
  for (cplx z : v) a.push_back(to_json(z));
  return a;
}

Json deviation(const GridDeviation& d) { return {{"max_dev", number(d.max_dev)}, {"scale", number(d.scale)}}; }

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const SearchBox& b) {
  return {{"re", {b.re_min, b.re_max}},
          {"im", {b.im_min, b.im_max}},
          {"sample_phase", b.sample_phase},
          {"max_depth", b.max_depth}};
}

Json to_json(const Potential& q) {
  switch (q.kind()) {
    case Potential::Kind::cosine:
      return {{"type", "cosine"}, {"coefficients", complex_list(q.values())}};
    case Potential::Kind::grid:
      return {{"type", "grid"}, {"nodes", q.nodes()}, {"values", complex_list(q.values())}};
    case Potential::Kind::piecewise:
      return {{"type", "piecewise"}, {"breakpoints", q.nodes()}, {"values", complex_list(q.values())}};
  }
  return nullptr;
}

Json to_json(const LinearForm& f) {
  if (f.is_point()) return {{"point", {{"x", f.as_point().x}, {"order", f.as_point().order}}}};
  const auto& m = f.as_nonlocal();
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) atoms.push_back(Json::array({a.location, to_json(a.weight)}));
  Json out = {{"jump", to_json(m.jump_at_zero())}, {"atoms", atoms}};
  if (!m.density().empty())
    out["density"] = {{"breakpoints", m.density().breakpoints}, {"values", complex_list(m.density().values)}};
  return {{"measure", out}};
}

Json to_json(const SeparationReport& s) {
  Json out = {{"holds", s.holds}, {"min_gap", number(s.min_gap)}};
  if (s.closest) out["closest"] = {to_json(s.closest->first), to_json(s.closest->second)};
  return out;
}

Json to_json(const Spectrum& s) {
  Json ev = Json::array();
  for (const auto& e : s.entries) ev.push_back(Json::array({e.lambda.real(), e.lambda.imag(), e.multiplicity}));
  return {{"source", std::string(to_string(s.source))},
          {"eigenvalues", ev},
          {"winding_total", s.winding_total},
          {"box", to_json(s.box)}};
}

Json to_json(const InverseTarget& t) {
  Json groups = Json::array();
  for (const auto& g : t.groups) {
    Json o = {{"type", std::string(to_string(g.type))}, {"rho_ref", g.rho_ref}, {"points", complex_list(g.points)}};
    if (g.type == DataGroup::Type::spectrum) {
      o["source"] = std::string(to_string(g.source));
      o["box"] = to_json(g.box);
    }
    if (!g.values.empty()) o["values"] = complex_list(g.values);
    if (!g.infinite.empty()) {
      Json inf = Json::array();
      for (char c : g.infinite) inf.push_back(c != 0);
      o["infinite"] = inf;
    }
    if (!g.weights.empty()) o["weights"] = g.weights;
    groups.push_back(o);
  }
  Json out = {{"kind", std::string(to_string(t.kind))},
              {"T", t.templ.T()},
              {"U1", to_json(t.templ.U1)},
              {"U2", to_json(t.templ.U2)},
              {"grid", {{"h_max", t.grid.h_max}, {"phase_step", t.grid.phase_step}}},
              {"groups", groups}};
  if (t.certificate) {
    out["certificate"] = {{"holds", t.certificate->holds}, {"min_gap", number(t.certificate->min_gap)}};
  }
  return out;
}

Json to_json(const ReconstructionResult& r) {
  Json starts = Json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"initial", s.initial},
                      {"coeffs", s.coeffs},
                      {"residual_norm", s.residual_norm},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"stop_reason", s.stop_reason}});
  return {{"coeffs", r.coeffs},
          {"potential", to_json(r.q_est)},
          {"residual_norm", r.residual_norm},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"per_datum", r.per_datum},
          {"starts", starts},
          {"diagnostics", r.diagnostics}};
}

Json to_json(const CounterexampleReport& r) {
  Json out = {{"M", deviation(r.M)},
              {"omega", deviation(r.omega)},
              {"delta1", deviation(r.delta1)},
              {"delta2", deviation(r.delta2)},
              {"q_distance", r.q_distance},
              {"condition_S", to_json(r.S)},
              {"condition_S_tilde", to_json(r.S_tilde)}};
  if (r.lambda2_closed_form_error) out["lambda2_closed_form_error"] = *r.lambda2_closed_form_error;
  if (r.d_score) out["d_score"] = *r.d_score;
  out["expectations_met"] = r.expectations_met;
  out["failures"] = r.failures;
  return out;
}

Json to_json(const OverlapReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"lambda", to_json(e.lambda)},
                       {"L0", e.in_L0},
                       {"L1", e.in_L1},
                       {"L2", e.in_L2},
                       {"count", e.count}});
  return {{"entries", entries},
          {"exactly_one", r.exactly_one},
          {"exactly_two", r.exactly_two},
          {"exactly_three", r.exactly_three},
          {"holds", r.holds()},
          {"warnings", r.warnings}};
}

}  // namespace nlsl

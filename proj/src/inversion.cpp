#include "nlsl/inversion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nlsl/assignment.hpp"
#include "nlsl/errors.hpp"
#include "nlsl/parallel.hpp"

namespace nlsl {

namespace {

std::shared_ptr<const Discretization> group_grid(const ProblemSpec& spec, const GridOptions& base,
                                                 double rho_ref) {
  GridOptions g = base;
  g.rho_ref = rho_ref;
  return std::make_shared<const Discretization>(discretize(spec, SpectralPoint::from_rho(rho_ref), g));
}

// M = Delta2 / Delta1 = U2(Z2) / U1(Z2), with the pole guard.
cplx weyl_value(const ProblemSpec& spec, const std::shared_ptr<const Discretization>& disc, cplx lambda) {
  const auto p = SpectralPoint::from_lambda(lambda);
  const auto z2 = integrate_ivp(*disc, p, Endpoint::right, 0.0, 1.0);
  const Scaled d1 = apply(spec.U1, z2);
  if (d1.log_abs() < Evaluation(spec, disc, p).log_pole_guard())
    throw PoleError("lambda too close to an eigenvalue of L1 (pole of M)");
  return (apply(spec.U2, z2) / d1).value();
}

cplx omega_value(const ProblemSpec& spec, const std::shared_ptr<const Discretization>& disc, cplx lambda) {
  return Evaluation(spec, disc, SpectralPoint::from_lambda(lambda)).omega().value();
}

DValue d_value(const ProblemSpec& spec, const std::shared_ptr<const Discretization>& disc, cplx xi) {
  Evaluation ev(spec, disc, SpectralPoint::from_lambda(xi));
  return collinearity_ratio(ev);
}

// d in the chart that keeps it bounded: 1/d when the reference is infinite or |d| > 1.
bool reciprocal_chart(bool infinite, cplx d) { return infinite || std::abs(d) > 1.0; }

cplx chart_value(bool infinite, cplx d, bool reciprocal) {
  if (reciprocal) return infinite ? cplx{} : 1.0 / d;
  if (infinite) return {std::numeric_limits<double>::infinity(), 0.0};
  return d;
}

std::vector<cplx> spectrum_values(const ProblemSpec& spec, CharKind which, const SearchBox& box,
                                  const GridOptions& base, double rho_ref) {
  GridOptions g = base;
  g.rho_ref = rho_ref;
  const CharFunction f(spec, which, rho_ref, g);
  SpectrumOptions opts;
  opts.real_fast_path = is_self_adjoint(spec);
  return find_spectrum(f, box, opts).values();
}

// Box around target eigenvalues: room below the first, half a gap above the last.
SearchBox data_box(const std::vector<cplx>& ev, cplx next) {
  SearchBox b;
  double re_lo = ev.front().real(), re_hi = re_lo, im_lo = 0.0, im_hi = 0.0;
  for (cplx z : ev) {
    re_lo = std::min(re_lo, z.real());
    re_hi = std::max(re_hi, z.real());
    im_lo = std::min(im_lo, z.imag());
    im_hi = std::max(im_hi, z.imag());
  }
  const double gap = std::max(next.real() - re_hi, 1e-3);
  b.re_min = re_lo - std::max(2.0, gap);
  b.re_max = re_hi + 0.5 * gap;
  b.im_min = im_lo - 1.0;
  b.im_max = im_hi + 1.0;
  return b;
}

DataGroup spectrum_group(const ProblemSpec& spec, CharKind which, const GridOptions& base, int count) {
  // count + 1 zeros fix the box; the data are then recomputed exactly as residuals do.
  const auto found = first_zeros(spec, which, count + 1, base).values();
  std::vector<cplx> first(found.begin(), found.begin() + count);
  DataGroup g;
  g.type = DataGroup::Type::spectrum;
  g.source = which;
  g.box = data_box(first, found[count]);
  g.rho_ref = g.box.inflated(0.1).rho_max();
  g.points = spectrum_values(spec, which, g.box, base, g.rho_ref);
  if (static_cast<int>(g.points.size()) != count)
    throw ConsistencyError("spectrum in the data box does not reproduce the first zeros");
  return g;
}

double grid_rho(const std::vector<cplx>& lambdas) {
  double r = 1.0;
  for (cplx l : lambdas) r = std::max(r, std::sqrt(std::abs(l)));
  return r;
}

SearchBox union_box(const std::vector<SearchBox>& boxes) {
  SearchBox b = boxes.front();
  for (const auto& o : boxes) {
    b.re_min = std::min(b.re_min, o.re_min);
    b.re_max = std::max(b.re_max, o.re_max);
    b.im_min = std::min(b.im_min, o.im_min);
    b.im_max = std::max(b.im_max, o.im_max);
  }
  return b;
}

void add_datum(Residual& r, std::size_t group, cplx diff, double w) {
  r.values.push_back(w * diff.real());
  r.values.push_back(w * diff.imag());
  r.per_datum.push_back(w * std::abs(diff));
  r.datum_group.push_back(group);
}

void add_invalid(Residual& r, std::size_t group, double w) {
  add_datum(r, group, {kInvalidPenalty, kInvalidPenalty}, w);
  ++r.invalid;
}

}  // namespace

std::string_view to_string(Parameterization::Kind k) {
  switch (k) {
    case Parameterization::Kind::cosine: return "cosine";
    case Parameterization::Kind::piecewise: return "piecewise";
    case Parameterization::Kind::periodic_piecewise: return "periodic_piecewise";
  }
  return "?";
}

Parameterization::Kind basis_from_string(std::string_view s) {
  for (auto k : {Parameterization::Kind::cosine, Parameterization::Kind::piecewise,
                 Parameterization::Kind::periodic_piecewise})
    if (s == to_string(k)) return k;
  throw InputError("unknown basis '" + std::string(s) + "'");
}

void Parameterization::validate() const {
  if (!(T > 0.0)) throw InputError("parameterization needs T > 0");
  if (dim < 1) throw InputError("parameterization needs dim >= 1");
  if (kind == Kind::periodic_piecewise && !(period > 0.0 && period <= T))
    throw InputError("periodic_piecewise needs a period in (0, T]");
}

Potential Parameterization::potential(std::span<const double> c) const {
  validate();
  if (static_cast<int>(c.size()) != dim) throw InputError("coefficient count does not match dim");
  std::vector<cplx> v(c.begin(), c.end());
  switch (kind) {
    case Kind::cosine:
      return Potential::cosine(T, v);
    case Kind::piecewise: {
      std::vector<double> b;
      for (int i = 1; i < dim; ++i) b.push_back(T * i / dim);
      return Potential::piecewise(T, b, v);
    }
    case Kind::periodic_piecewise: {
      std::vector<double> b;
      std::vector<cplx> vals{v[0]};
      const double cell = period / dim;
      for (int k = 1; cell * k < T - 1e-12 * T; ++k) {
        b.push_back(cell * k);
        vals.push_back(v[k % dim]);
      }
      return Potential::piecewise(T, b, vals);
    }
  }
  throw InputError("unknown parameterization");
}

std::string_view to_string(TargetKind k) {
  switch (k) {
    case TargetKind::two_spectra: return "two_spectra";
    case TargetKind::weyl_pair: return "weyl_pair";
    case TargetKind::weyl_pair_with_D: return "weyl_pair_with_D";
    case TargetKind::three_spectra: return "three_spectra";
  }
  return "?";
}

TargetKind target_kind_from_string(std::string_view s) {
  for (auto k : {TargetKind::two_spectra, TargetKind::weyl_pair, TargetKind::weyl_pair_with_D,
                 TargetKind::three_spectra})
    if (s == to_string(k)) return k;
  throw InputError("unknown target kind '" + std::string(s) + "'");
}

std::string_view to_string(DataGroup::Type t) {
  switch (t) {
    case DataGroup::Type::spectrum: return "spectrum";
    case DataGroup::Type::weyl_M: return "M";
    case DataGroup::Type::omega: return "omega";
    case DataGroup::Type::D: return "D";
  }
  return "?";
}

void InverseTarget::validate() const {
  templ.validate();
  if (groups.empty()) throw InputError("target has no data");
  for (const auto& g : groups) {
    if (g.points.empty()) throw InputError("empty data group");
    if (!g.weights.empty() && g.weights.size() != g.points.size())
      throw InputError("weights must match the data count");
    if (g.type != DataGroup::Type::spectrum && g.values.size() != g.points.size())
      throw InputError("data values must match their points");
    if (g.type == DataGroup::Type::D && g.infinite.size() != g.points.size())
      throw InputError("D data need an infinity flag per entry");
  }
  if (kind == TargetKind::two_spectra) {
    if (groups.size() != 2) throw InputError("two_spectra needs the spectra of Delta1 and Delta11");
    if (!separation(groups[0].points, groups[1].points, 1e-9).holds)
      throw InputError("two_spectra lists must be disjoint");
  }
  if (kind == TargetKind::three_spectra && (!certificate || !certificate->holds))
    throw InputError("three_spectra needs a condition S' certificate (disjoint Lambda'_0, Lambda'_1)");
}

std::vector<cplx> default_lambda_grid(int n) {
  std::vector<cplx> g;
  for (int k = 0; k < n; ++k) g.emplace_back(-2.0 + 60.0 * (k + 0.5) / n, 1.0 + 0.02 * k);
  return g;
}

InverseTarget synthesize(TargetKind kind, const ProblemSpec& spec, const SynthesisOptions& options) {
  spec.validate();
  InverseTarget t{kind, spec, {}, {}, {}};
  const GridOptions& base = t.grid;
  const auto lambdas = options.lambdas.empty() ? default_lambda_grid() : options.lambdas;

  const auto weyl_groups = [&] {
    const double rho = grid_rho(lambdas);
    const auto disc = group_grid(spec, base, rho);
    DataGroup m, w;
    m.type = DataGroup::Type::weyl_M;
    w.type = DataGroup::Type::omega;
    m.rho_ref = w.rho_ref = rho;
    m.points = w.points = lambdas;
    for (cplx l : lambdas) {
      m.values.push_back(weyl_value(spec, disc, l));
      w.values.push_back(omega_value(spec, disc, l));
    }
    t.groups.push_back(std::move(m));
    t.groups.push_back(std::move(w));
  };

  switch (kind) {
    case TargetKind::two_spectra:
      spec.validate(true);
      t.groups.push_back(spectrum_group(spec, CharKind::delta1, base, options.count));
      t.groups.push_back(spectrum_group(spec, CharKind::delta11, base, options.count));
      break;
    case TargetKind::weyl_pair:
    case TargetKind::weyl_pair_with_D: {
      weyl_groups();
      const auto xi_group = spectrum_group(spec, CharKind::omega, base, options.count);
      if (kind == TargetKind::weyl_pair_with_D) {
        DataGroup d;
        d.type = DataGroup::Type::D;
        d.rho_ref = xi_group.rho_ref;
        d.points = xi_group.points;
        const auto disc = group_grid(spec, base, d.rho_ref);
        for (cplx xi : d.points) {
          const DValue v = d_value(spec, disc, xi);
          if (v.defect > 1e-6) throw CollinearityError("phi and theta not collinear at a zero of omega");
          d.values.push_back(v.value);
          d.infinite.push_back(v.infinite);
        }
        t.groups.push_back(std::move(d));
      }
      t.certificate = condition_S(spec, xi_group.box, options.separation_tol, base);
      break;
    }
    case TargetKind::three_spectra: {
      const bool ok = spec.U1.is_point() && spec.U1.as_point().x == 0.0 && spec.U1.as_point().order == 0 &&
                      spec.U2.is_point() && spec.U2.as_point().order == 0 && spec.U2.as_point().x > 0.0 &&
                      spec.U2.as_point().x < spec.T();
      if (!ok) throw InputError("three_spectra needs U1 = y(0) and U2 = y(a) with a in (0, T)");
      for (CharKind k : {CharKind::omega, CharKind::delta1, CharKind::delta2})
        t.groups.push_back(spectrum_group(spec, k, base, options.count));
      const SearchBox b = union_box({t.groups[0].box, t.groups[1].box});
      t.certificate = condition_S(spec, b, options.separation_tol, base);
      break;
    }
  }
  return t;
}

double Residual::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

Residual residual(const InverseTarget& target, const Parameterization& param, std::span<const double> coeffs) {
  const ProblemSpec spec = target.templ.with_potential(param.potential(coeffs));
  if (std::abs(spec.T() - target.templ.T()) > 1e-12 * spec.T())
    throw DomainError("parameterization length differs from the target's T");
  Residual r;
  for (std::size_t gi = 0; gi < target.groups.size(); ++gi) {
    const DataGroup& g = target.groups[gi];
    const std::size_t n = g.points.size();
    switch (g.type) {
      case DataGroup::Type::spectrum: {
        std::vector<cplx> comp;
        try {
          comp = spectrum_values(spec, g.source, g.box, target.grid, g.rho_ref);
        } catch (const Error&) {
          for (std::size_t i = 0; i < n; ++i) add_invalid(r, gi, g.weight(i));
          break;
        }
        const auto match = match_points(g.points, comp);
        for (std::size_t i = 0; i < n; ++i) {
          if (match[i] < 0)
            add_invalid(r, gi, g.weight(i));
          else
            add_datum(r, gi, comp[match[i]] - g.points[i], g.weight(i));
        }
        break;
      }
      case DataGroup::Type::weyl_M:
      case DataGroup::Type::omega: {
        const auto disc = group_grid(spec, target.grid, g.rho_ref);
        for (std::size_t i = 0; i < n; ++i) {
          try {
            const cplx v = g.type == DataGroup::Type::weyl_M ? weyl_value(spec, disc, g.points[i])
                                                             : omega_value(spec, disc, g.points[i]);
            add_datum(r, gi, (v - g.values[i]) / std::max(1.0, std::abs(g.values[i])), g.weight(i));
          } catch (const Error&) {
            add_invalid(r, gi, g.weight(i));
          }
        }
        break;
      }
      case DataGroup::Type::D: {
        const auto disc = group_grid(spec, target.grid, g.rho_ref);
        for (std::size_t i = 0; i < n; ++i) {
          const bool recip = reciprocal_chart(g.infinite[i], g.values[i]);
          const cplx want = chart_value(g.infinite[i], g.values[i], recip);
          try {
            const DValue d = d_value(spec, disc, g.points[i]);
            const cplx got = chart_value(d.infinite, d.value, recip);
            if (!std::isfinite(got.real())) throw RangeError("d infinite in the direct chart");
            add_datum(r, gi, got - want, g.weight(i));
          } catch (const Error&) {
            add_invalid(r, gi, g.weight(i));
          }
        }
        break;
      }
    }
  }
  return r;
}

std::vector<double> jacobian(const InverseTarget& target, const Parameterization& param,
                             std::span<const double> coeffs, const Residual& r0, double step_scale) {
  const std::size_t m = r0.values.size(), n = coeffs.size();
  std::vector<double> J(m * n);
  parallel_for(n, [&](std::size_t j) {
    std::vector<double> x(coeffs.begin(), coeffs.end());
    const double h = step_scale * (1.0 + std::abs(x[j]));
    x[j] += h;
    const Residual rj = residual(target, param, x);
    for (std::size_t i = 0; i < m; ++i) J[i * n + j] = (rj.values[i] - r0.values[i]) / h;
  });
  return J;
}

StartResult levenberg_marquardt(const InverseTarget& target, const Parameterization& param, std::vector<double> x,
                                const ReconstructOptions& options, std::vector<double>* record) {
  const std::size_t n = x.size();
  const auto clamp = [&](std::vector<double>& v) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!options.lower.empty()) v[j] = std::max(v[j], options.lower[j]);
      if (!options.upper.empty()) v[j] = std::min(v[j], options.upper[j]);
    }
  };
  clamp(x);
  StartResult out;
  out.initial = x;
  Residual r = residual(target, param, x);
  double f = r.norm();
  if (record) record->push_back(f);
  double mu = 1e-3;
  constexpr double kMuMin = 1e-8, kMuMax = 1e4;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (f < options.tol) {
      out.converged = true;
      out.stop_reason = "residual below tolerance";
      break;
    }
    const std::size_t m = r.values.size();
    const auto Jv = jacobian(target, param, x, r);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> J(Jv.data(), m, n);
    const Eigen::Map<const Eigen::VectorXd> rv(r.values.data(), m);
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;
    const double diag_floor = 1e-12 * std::max(1.0, A.diagonal().maxCoeff());

    bool accepted = false;
    Eigen::VectorXd delta;
    while (true) {
      Eigen::MatrixXd damped = A;
      for (std::size_t j = 0; j < n; ++j) damped(j, j) += mu * std::max(A(j, j), diag_floor);
      delta = damped.ldlt().solve(-g);
      std::vector<double> trial(n);
      for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + delta[j];
      clamp(trial);
      Residual rt = residual(target, param, trial);
      const double ft = rt.norm();
      if (ft < f) {
        for (std::size_t j = 0; j < n; ++j) delta[j] = trial[j] - x[j];
        x = std::move(trial);
        r = std::move(rt);
        f = ft;
        mu = std::max(mu * 0.5, kMuMin);
        accepted = true;
        if (record) record->push_back(f);
        break;
      }
      if (mu >= kMuMax) break;
      mu = std::min(mu * 2.0, kMuMax);
    }
    if (!accepted) {
      out.stop_reason = "no decrease at maximal damping";
      // A stationary point at the noise floor still counts as a local minimum.
      out.converged = g.norm() <= 1e-8 * std::max(1.0, f);
      break;
    }
    double xn = 0.0;
    for (double v : x) xn = std::max(xn, std::abs(v));
    if (delta.lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + xn)) {
      out.converged = true;
      out.stop_reason = "step below 1e-10";
      ++it;
      break;
    }
  }
  if (out.stop_reason.empty()) {
    if (f < options.tol) {
      out.converged = true;
      out.stop_reason = "residual below tolerance";
    } else {
      out.stop_reason = "iteration limit";
    }
  }
  out.coeffs = x;
  out.residual_norm = f;
  out.iterations = it;
  return out;
}

ReconstructionResult reconstruct(const InverseTarget& target, const Parameterization& param,
                                 std::span<const double> initial, const ReconstructOptions& options) {
  target.validate();
  param.validate();
  if (static_cast<int>(initial.size()) != param.dim) throw InputError("initial point does not match dim");
  std::size_t data = 0;
  for (const auto& g : target.groups) data += 2 * g.points.size();
  if (static_cast<std::size_t>(param.dim) > data)
    throw InputError("more parameters than real scalar data");
  if ((!options.lower.empty() && options.lower.size() != initial.size()) ||
      (!options.upper.empty() && options.upper.size() != initial.size()))
    throw InputError("bounds must match dim");
  if (options.starts < 1) throw InputError("at least one start");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-options.spread, options.spread);
  std::vector<std::vector<double>> seeds{std::vector<double>(initial.begin(), initial.end())};
  for (int s = 1; s < options.starts; ++s) {
    auto x = seeds.front();
    for (double& v : x) v += u(rng);
    seeds.push_back(std::move(x));
  }

  ReconstructionResult res;
  res.starts.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    res.starts[s] = levenberg_marquardt(target, param, seeds[s], options);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < res.starts.size(); ++s) {
    const auto& a = res.starts[s];
    const auto& b = res.starts[best];
    if (a.converged != b.converged ? a.converged : a.residual_norm < b.residual_norm) best = s;
  }
  const auto& b = res.starts[best];
  res.coeffs = b.coeffs;
  res.q_est = param.potential(b.coeffs);
  res.residual_norm = b.residual_norm;
  res.iterations = b.iterations;
  res.converged = b.converged;
  res.per_datum = residual(target, param, b.coeffs).per_datum;
  std::ostringstream diag;
  diag.precision(6);
  for (std::size_t s = 0; s < res.starts.size(); ++s)
    diag << "start " << s << ": residual " << res.starts[s].residual_norm << ", " << res.starts[s].iterations
         << " iterations, " << res.starts[s].stop_reason << "\n";
  if (!res.converged) diag << "no start converged\n";
  res.diagnostics = diag.str();
  return res;
}

DistinguishReport distinguishability(const ProblemSpec& a, const ProblemSpec& b, TargetKind kind,
                                     const DistinguishGrid& grid) {
  const GridOptions base;
  DistinguishReport rep;
  const auto add = [&](std::string name, double v) {
    rep.groups.emplace_back(std::move(name), v);
    rep.score = std::max(rep.score, v);
  };
  const double box_rho = grid.box.empty() ? 1.0 : grid.box.inflated(0.1).rho_max();

  // Matched point sets; a count mismatch is total separation.
  const auto compare_sets = [&](const std::vector<cplx>& pa, const std::vector<cplx>& pb) {
    if (pa.size() != pb.size()) return 1.0;
    if (pa.empty()) return 0.0;
    const auto match = match_points(pa, pb);
    double dev = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      dev = std::max(dev, std::abs(pa[i] - pb[match[i]]));
      scale = std::max(scale, std::abs(pa[i]));
    }
    return dev / scale;
  };
  const auto spectra = [&](CharKind k) {
    const auto pa = spectrum_values(a, k, grid.box, base, box_rho);
    const auto pb = spectrum_values(b, k, grid.box, base, box_rho);
    add("spectrum " + std::string(to_string(k)), compare_sets(pa, pb));
  };
  const auto values = [&](const std::string& name, auto&& eval) {
    const double rho = grid_rho(grid.lambdas);
    const auto da = group_grid(a, base, rho);
    const auto db = group_grid(b, base, rho);
    double dev = 0.0, scale = 0.0;
    for (cplx l : grid.lambdas) {
      const cplx va = eval(a, da, l), vb = eval(b, db, l);
      dev = std::max(dev, std::abs(va - vb));
      scale = std::max({scale, std::abs(va), std::abs(vb)});
    }
    add(name, scale > 0.0 ? dev / scale : 0.0);
  };

  switch (kind) {
    case TargetKind::two_spectra:
      spectra(CharKind::delta1);
      spectra(CharKind::delta11);
      break;
    case TargetKind::three_spectra:
      spectra(CharKind::omega);
      spectra(CharKind::delta1);
      spectra(CharKind::delta2);
      break;
    case TargetKind::weyl_pair:
    case TargetKind::weyl_pair_with_D:
      values("M", weyl_value);
      values("omega", omega_value);
      if (kind == TargetKind::weyl_pair_with_D) {
        const auto xa = spectrum_values(a, CharKind::omega, grid.box, base, box_rho);
        const auto xb = spectrum_values(b, CharKind::omega, grid.box, base, box_rho);
        if (xa.size() != xb.size()) {
          add("D", 1.0);
          break;
        }
        const auto da = group_grid(a, base, box_rho);
        const auto db = group_grid(b, base, box_rho);
        const auto match = match_points(xa, xb);
        double dev = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < xa.size(); ++i) {
          const DValue va = d_value(a, da, xa[i]);
          const DValue vb = d_value(b, db, xb[match[i]]);
          const bool recip = reciprocal_chart(va.infinite, va.value);
          const cplx ca = chart_value(va.infinite, va.value, recip);
          const cplx cb = chart_value(vb.infinite, vb.value, recip);
          if (!std::isfinite(cb.real())) {
            dev = std::numeric_limits<double>::infinity();
            continue;
          }
          dev = std::max(dev, std::abs(ca - cb));
          scale = std::max(scale, std::abs(ca));
        }
        add("D", std::min(1.0, dev / scale));
      }
      break;
  }
  return rep;
}

}  // namespace nlsl

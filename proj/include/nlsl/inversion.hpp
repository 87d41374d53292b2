#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlsl/characteristic.hpp"
#include "nlsl/spectrum.hpp"

namespace nlsl {

/// Real coefficient vector -> potential.
struct Parameterization {
  enum class Kind {
    cosine,              // sum_k c_k cos(k pi x / T), k = 0..dim-1
    piecewise,           // dim equal cells on (0, T)
    periodic_piecewise,  // dim equal cells on (0, period), repeated
  };
  Kind kind = Kind::cosine;
  double T = 0.0;
  int dim = 4;
  double period = 0.0;

  Potential potential(std::span<const double> coeffs) const;
  void validate() const;
};
std::string_view to_string(Parameterization::Kind k);
Parameterization::Kind basis_from_string(std::string_view s);

enum class TargetKind { two_spectra, weyl_pair, weyl_pair_with_D, three_spectra };
std::string_view to_string(TargetKind k);
TargetKind target_kind_from_string(std::string_view s);

/// One homogeneous block of data.
struct DataGroup {
  enum class Type { spectrum, weyl_M, omega, D };
  Type type = Type::spectrum;
  CharKind source = CharKind::delta1;  // spectrum groups
  SearchBox box;                       // spectrum groups: where the candidate spectrum is computed
  double rho_ref = 1.0;                // grid of this group, shared by synthesis and residuals
  std::vector<cplx> points;            // target eigenvalues, lambda-grid, or xi_n for D
  std::vector<cplx> values;            // M / omega / d_n values
  std::vector<char> infinite;          // D only: d_n = infinity
  std::vector<double> weights;         // one per datum; empty = all 1

  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
};
std::string_view to_string(DataGroup::Type t);

struct InverseTarget {
  TargetKind kind = TargetKind::two_spectra;
  /// Forms and T; its potential is ignored.
  ProblemSpec templ;
  /// Step law; each group fixes rho_ref.
  GridOptions grid;
  std::vector<DataGroup> groups;
  /// Condition S (weyl targets) or S' (three_spectra) on the data region.
  std::optional<SeparationReport> certificate;

  void validate() const;
};

struct SynthesisOptions {
  int count = 8;                 // eigenvalues per spectrum
  std::vector<cplx> lambdas;     // weyl grid; default: 50 points off the real axis
  double separation_tol = 1e-6;  // for the certificate
};

/// Data generated by the forward solver from spec, for the given kind. For three_spectra
/// spec must have U1 = y(0), U2 = y(a).
InverseTarget synthesize(TargetKind kind, const ProblemSpec& spec, const SynthesisOptions& options = {});

/// Default Weyl grid: n points on a parabola-like arc above the real axis.
std::vector<cplx> default_lambda_grid(int n = 50);

struct Residual {
  std::vector<double> values;           // real components, weighted
  std::vector<double> per_datum;        // |weighted complex mismatch| per datum
  std::vector<std::size_t> datum_group; // group index per datum
  std::size_t invalid = 0;              // data replaced by the penalty

  double norm() const;
};

/// Real penalty per component for data the forward solver cannot produce.
constexpr double kInvalidPenalty = 1e3;

Residual residual(const InverseTarget& target, const Parameterization& param, std::span<const double> coeffs);

struct ReconstructOptions {
  int starts = 5;
  double spread = 0.5;   // uniform perturbation of the initial point for starts 1..n-1
  std::uint64_t seed = 1;
  double tol = 1e-12;    // residual norm accepted as converged
  int max_iterations = 100;
  std::vector<double> lower, upper;  // box constraints; empty = unbounded
};

struct StartResult {
  std::vector<double> initial;
  std::vector<double> coeffs;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

struct ReconstructionResult {
  std::vector<double> coeffs;
  Potential q_est = Potential::zero(1.0);
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> per_datum;
  std::vector<StartResult> starts;
  std::string diagnostics;
};

/// Levenberg-Marquardt from several starts; returns the best local minimum.
ReconstructionResult reconstruct(const InverseTarget& target, const Parameterization& param,
                                 std::span<const double> initial, const ReconstructOptions& options = {});

/// One LM run (exposed for tests). record receives the residual norm of every accepted iterate.
StartResult levenberg_marquardt(const InverseTarget& target, const Parameterization& param,
                                std::vector<double> x, const ReconstructOptions& options,
                                std::vector<double>* record = nullptr);

/// Forward-difference Jacobian, step 1e-6 (1 + |c_j|); row-major m x n.
std::vector<double> jacobian(const InverseTarget& target, const Parameterization& param,
                             std::span<const double> coeffs, const Residual& r0, double step_scale = 1e-6);

struct DistinguishGrid {
  std::vector<cplx> lambdas = default_lambda_grid();
  SearchBox box;  // spectra and zeros of omega
};

struct DistinguishReport {
  double score = 0.0;  // max over data groups of the normalized max deviation
  std::vector<std::pair<std::string, double>> groups;
};

/// Normalized max deviation between the data of two problems.
DistinguishReport distinguishability(const ProblemSpec& a, const ProblemSpec& b, TargetKind kind,
                                     const DistinguishGrid& grid);

}  // namespace nlsl

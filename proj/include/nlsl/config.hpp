#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsl/asymptotics.hpp"
#include "nlsl/errors.hpp"
#include "nlsl/inversion.hpp"
#include "nlsl/scenarios.hpp"

namespace nlsl {

/// Schema violations, one message per offending path.
class ConfigError : public InputError {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct SpectrumSection {
  CharKind which = CharKind::delta1;
  SearchBox box;
  double tol = 1e-10;
  std::optional<bool> fast_path;  // default: when the problem is self-adjoint
};

struct AsymSection {
  AsymQuantity quantity = AsymQuantity::Delta1;
  double x = 0.0;
  int nu = 0;
  RaySpec rays;
};

struct InvertSection {
  TargetKind kind = TargetKind::two_spectra;
  SynthesisOptions synthesis;
  Parameterization basis;
  std::vector<double> initial;  // default: zeros
  ReconstructOptions options;
  std::optional<std::string> target_file;  // data instead of synthesis from the problem
};

struct ScenarioSection {
  ScenarioName name = ScenarioName::counterexample1;
  ScenarioParams params;
  std::vector<cplx> lambdas;  // default grid when empty
  double rel_tol = 1e-6;
};

struct RunConfig {
  std::optional<ProblemSpec> problem;
  GridOptions grid;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: stdout
  std::string format = "json";
  std::optional<int> threads;

  std::vector<cplx> lambdas;  // forward and weyl
  std::optional<SpectrumSection> spectrum;
  std::optional<AsymSection> asym;
  std::optional<InvertSection> invert;
  std::optional<ScenarioSection> scenario;
};

/// Strict parse: unknown keys, wrong types and domain violations are all reported.
RunConfig parse_config(const std::string& text);

/// Inverse-problem data file: kind, forms, grid law and data groups.
InverseTarget parse_target(const std::string& text);

}  // namespace nlsl

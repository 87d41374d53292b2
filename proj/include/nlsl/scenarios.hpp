#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlsl/characteristic.hpp"
#include "nlsl/spectrum.hpp"

namespace nlsl {

enum class ScenarioName { counterexample1, counterexample2, three_spectra };
std::string_view to_string(ScenarioName n);
ScenarioName scenario_from_string(std::string_view s);

struct ScenarioParams {
  std::optional<Potential> q;     // default: the preset of the scenario
  double alpha0 = 0.5;            // counterexample2: q vanishes on [0, alpha0] and [pi - alpha0, pi]
  std::optional<double> alpha;    // counterexample2: searched when unset
  double a = 1.0;                 // three_spectra
  double T = 3.14159265358979323846;  // three_spectra only; the counterexamples fix T = pi
  double separation_tol = 1e-6;
  std::optional<SearchBox> box;   // region for condition S
};

struct ScenarioConfig {
  ScenarioName name = ScenarioName::counterexample1;
  double alpha = 0.0, alpha0 = 0.0, a = 0.0;
  double separation_tol = 1e-6;
  SearchBox box;
  ProblemSpec spec;
  ProblemSpec spec_tilde;  // reflected potential q(T - x)
};

/// Half-periodic grid potential: b(s) = A s (pi/2 - s)^2 on each half of (0, pi).
Potential counterexample1_potential(double amplitude = 2.0, int cells = 128);
/// Piecewise potential vanishing on [0, alpha0] and [pi - alpha0, pi], asymmetric in between.
Potential counterexample2_potential(double alpha0 = 0.5);

SearchBox default_scenario_box();

ScenarioConfig build(ScenarioName name, const ScenarioParams& params = {});

struct GridDeviation {
  double max_dev = 0.0;
  double scale = 0.0;  // max modulus over the grid, both problems
  bool within(double rel) const { return max_dev <= rel * scale; }
};

struct CounterexampleReport {
  GridDeviation M, omega, delta1, delta2;
  double q_distance = 0.0;
  SeparationReport S, S_tilde;
  // counterexample2: largest |lambda - (pi n / alpha)^2| over the closed-form values checked
  std::optional<double> lambda2_closed_form_error;
  // counterexample1: distinguishability with D appended
  std::optional<double> d_score;
  bool expectations_met = false;
  std::vector<std::string> failures;
};

/// Compares the data of the pair on the grid. rel_tol bounds deviations relative to scale.
CounterexampleReport verify_counterexample(const ScenarioConfig& cfg, const std::vector<cplx>& lambdas,
                                           double rel_tol = 1e-6);

struct OverlapEntry {
  cplx lambda;
  bool in_L0 = false, in_L1 = false, in_L2 = false;
  int count = 0;
};

struct OverlapReport {
  std::vector<OverlapEntry> entries;
  int exactly_one = 0, exactly_three = 0, exactly_two = 0;
  std::vector<std::string> warnings;

  bool holds() const { return exactly_two == 0; }
};

/// Zeros of omega, Delta1, Delta2 in the box, classified by the problems they belong to.
OverlapReport three_spectra_overlap_rule(const ProblemSpec& spec, double a, const SearchBox& box,
                                         double tol = 1e-6);

}  // namespace nlsl

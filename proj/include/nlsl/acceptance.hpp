#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlsl {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty = all
};

constexpr int kCriterionCount = 11;

/// Runs the acceptance criteria in order. When progress is set, one line per criterion
/// is written as soon as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            std::ostream* progress = nullptr);

/// "PASS  3  identity suite ... (detail; 1.2 s)"
std::string format_line(const CriterionResult& r);

}  // namespace nlsl

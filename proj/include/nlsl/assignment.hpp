#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nlsl {

/// Minimal-cost assignment for a rows x cols cost matrix (row-major). Returns, for each
/// row, the matched column, or -1 when rows > cols leaves the row unmatched.
std::vector<int> solve_assignment(std::span<const double> cost, std::size_t rows, std::size_t cols);

/// Matches each target point to a distinct computed point, minimizing total distance.
std::vector<int> match_points(std::span<const std::complex<double>> target,
                              std::span<const std::complex<double>> computed);

}  // namespace nlsl

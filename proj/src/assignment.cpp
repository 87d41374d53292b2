#include "nlsl/assignment.hpp"

#include <cmath>
#include <limits>

#include "nlsl/errors.hpp"

namespace nlsl {

namespace {

// Hungarian method with row/column potentials, rows <= cols. 1-based internally.
std::vector<int> hungarian(std::span<const double> a, std::size_t n, std::size_t m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(m + 1);
  std::vector<std::size_t> p(m + 1), way(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  return row_to_col;
}

}  // namespace

std::vector<int> solve_assignment(std::span<const double> cost, std::size_t rows, std::size_t cols) {
  if (cost.size() != rows * cols) throw InputError("cost matrix size does not match its shape");
  for (double c : cost)
    if (!std::isfinite(c)) throw InputError("assignment costs must be finite");
  if (rows == 0) return {};
  if (cols == 0) return std::vector<int>(rows, -1);
  if (rows <= cols) return hungarian(cost, rows, cols);
  std::vector<double> t(cost.size());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j * rows + i] = cost[i * cols + j];
  const auto col_to_row = hungarian(t, cols, rows);
  std::vector<int> out(rows, -1);
  for (std::size_t j = 0; j < cols; ++j) out[col_to_row[j]] = static_cast<int>(j);
  return out;
}

std::vector<int> match_points(std::span<const std::complex<double>> target,
                              std::span<const std::complex<double>> computed) {
  std::vector<double> cost(target.size() * computed.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    for (std::size_t j = 0; j < computed.size(); ++j)
      cost[i * computed.size() + j] = std::abs(target[i] - computed[j]);
  return solve_assignment(cost, target.size(), computed.size());
}

}  // namespace nlsl

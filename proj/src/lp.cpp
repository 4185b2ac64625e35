#include "jackson/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jackson {

namespace {

constexpr double kPivotTolerance = 1e-12;
constexpr int kMaxPivots = 10000;

}  // namespace

GameSolution solve_matrix_game(const Matrix& payoff) {
  const std::size_t m = payoff.rows();
  const std::size_t n = payoff.cols();
  if (m == 0 || n == 0) throw LpError("solve_matrix_game: empty payoff matrix");

  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(payoff(j, k))) throw LpError("solve_matrix_game: non-finite payoff");
      lowest = std::min(lowest, payoff(j, k));
    }
  const double shift = 1.0 - lowest;

  // Tableau columns: n structural, m slack, 1 right-hand side.
  const std::size_t width = n + m + 1;
  Matrix tab(m + 1, width);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < n; ++k) tab(j, k) = payoff(j, k) + shift;
    tab(j, n + j) = 1.0;
    tab(j, width - 1) = 1.0;
  }
  for (std::size_t k = 0; k < n; ++k) tab(m, k) = -1.0;

  std::vector<std::size_t> basis(m);
  for (std::size_t j = 0; j < m; ++j) basis[j] = n + j;

  int pivots = 0;
  while (true) {
    std::size_t entering = width;
    for (std::size_t c = 0; c + 1 < width; ++c)
      if (tab(m, c) < -kPivotTolerance) {
        entering = c;
        break;
      }
    if (entering == width) break;

    std::size_t leaving = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double a = tab(r, entering);
      if (a <= kPivotTolerance) continue;
      const double ratio = tab(r, width - 1) / a;
      if (ratio < best_ratio - kPivotTolerance ||
          (ratio <= best_ratio + kPivotTolerance && leaving < m && basis[r] < basis[leaving])) {
        best_ratio = std::min(best_ratio, ratio);
        leaving = r;
      }
    }
    // B > 0 keeps the feasible region bounded, so this cannot happen for a
    // well-formed game.
    if (leaving == m) throw LpError("solve_matrix_game: unbounded pivot column");
    if (++pivots > kMaxPivots) throw LpError("solve_matrix_game: pivot limit exceeded");

    const double pivot = tab(leaving, entering);
    for (std::size_t c = 0; c < width; ++c) tab(leaving, c) /= pivot;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leaving) continue;
      const double factor = tab(r, entering);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) tab(r, c) -= factor * tab(leaving, c);
    }
    basis[leaving] = entering;
  }

  const double total = tab(m, width - 1);
  if (!(total > 0.0)) throw LpError("solve_matrix_game: degenerate optimum");

  GameSolution sol;
  sol.column_strategy.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) sol.column_strategy[basis[r]] = std::max(0.0, tab(r, width - 1)) / total;
  sol.row_strategy.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) sol.row_strategy[j] = std::max(0.0, tab(m, n + j)) / total;

  auto normalize = [](Vector& v) {
    double s = 0.0;
    for (double x : v) s += x;
    if (s > 0.0)
      for (double& x : v) x /= s;
  };
  normalize(sol.column_strategy);
  normalize(sol.row_strategy);
  sol.value = 1.0 / total - shift;
  return sol;
}

}  // namespace jackson

#pragma once

#include <stdexcept>

#include "jackson/matrix.hpp"

namespace jackson {

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimal mixed strategies of a finite two-player zero-sum game.
struct GameSolution {
  double value = 0.0;
  Vector row_strategy;     // maximizer, a point of the probability simplex
  Vector column_strategy;  // minimizer, a point of the probability simplex
};

/// Solves max_theta min_v theta^T A v over the two probability simplices.
///
/// The payoff is shifted to be strictly positive and the standard form
/// max 1^T y s.t. B y <= 1, y >= 0 is solved with a dense tableau simplex
/// (Bland's rule). The column strategy comes from the primal solution and
/// the row strategy from the slack duals.
GameSolution solve_matrix_game(const Matrix& payoff);

}  // namespace jackson

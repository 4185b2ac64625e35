#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "jackson/matrix.hpp"

namespace jackson::detail {

/// Result of evaluating a trial point. The evaluator may move the point (for
/// instance to pull it back into a feasible set); the simplex stores the
/// returned point.
struct Evaluated {
  Vector point;
  double value;  // minimized
};

using Evaluator = std::function<Evaluated(const Vector&)>;

/// Plain Nelder-Mead minimizer with a hard cap on evaluator calls. Stops
/// early once the simplex values agree to `tolerance`.
inline Evaluated nelder_mead(const Evaluator& eval, const Vector& start, const Vector& steps, std::size_t budget,
                             double tolerance = 1e-13) {
  const std::size_t n = start.size();
  std::size_t used = 0;
  auto call = [&](const Vector& x) {
    ++used;
    return eval(x);
  };

  std::vector<Evaluated> simplex;
  simplex.push_back(call(start));
  for (std::size_t i = 0; i < n && used < budget; ++i) {
    Vector x = simplex.front().point;
    x[i] += steps[i];
    simplex.push_back(call(x));
  }
  auto by_value = [](const Evaluated& a, const Evaluated& b) { return a.value < b.value; };
  if (simplex.size() < n + 1) return *std::min_element(simplex.begin(), simplex.end(), by_value);

  while (used < budget) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (simplex.back().value - simplex.front().value <= tolerance) break;

    Vector centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k].point[i] / static_cast<double>(n);
    auto along = [&](double t) {
      Vector x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex.back().point[i] - centroid[i]);
      return x;
    };

    Evaluated reflected = call(along(-1.0));
    if (reflected.value < simplex.front().value) {
      if (used >= budget) {
        simplex.back() = reflected;
        break;
      }
      Evaluated expanded = call(along(-2.0));
      simplex.back() = expanded.value < reflected.value ? expanded : reflected;
      continue;
    }
    if (reflected.value < simplex[n - 1].value) {
      simplex.back() = reflected;
      continue;
    }
    if (used >= budget) break;
    const bool outside = reflected.value < simplex.back().value;
    Evaluated contracted = call(along(outside ? -0.5 : 0.5));
    if (contracted.value < std::min(reflected.value, simplex.back().value)) {
      simplex.back() = contracted;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t k = 1; k <= n && used < budget; ++k) {
      Vector x(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = simplex.front().point[i] + 0.5 * (simplex[k].point[i] - simplex.front().point[i]);
      simplex[k] = call(x);
    }
  }
  return *std::min_element(simplex.begin(), simplex.end(), by_value);
}

}  // namespace jackson::detail

#pragma once

#include <cmath>
#include <random>

#include "jackson/network.hpp"

namespace testing_support {

using jackson::JacksonNetwork;
using jackson::Matrix;
using jackson::Vector;

inline JacksonNetwork net_a() { return {{1, 0}, {4, 4}, Matrix::from_rows({{0, 1}, {0, 0}})}; }
inline JacksonNetwork net_b() {
  return {{1, 1, 1}, {9, 9, 9}, Matrix::from_rows({{0, 0.25, 0.25}, {0.25, 0, 0.25}, {0.25, 0.25, 0}})};
}
inline JacksonNetwork net_c() {
  return {{1, 1, 1}, {16, 16, 16}, Matrix::from_rows({{0, 0.2, 0.3}, {0.3, 0, 0.2}, {0.2, 0.3, 0}})};
}
inline JacksonNetwork net_d() { return {{1}, {4}, Matrix::from_rows({{0}})}; }
inline JacksonNetwork net_e() { return {{3, 0}, {2, 4}, Matrix::from_rows({{0, 1}, {0, 0}})}; }

/// Random substochastic routing with zero diagonal and row sums at most
/// `max_row`, so the spectral radius is at most `max_row`.
inline Matrix random_routing(std::size_t d, std::mt19937_64& rng, double max_row = 0.9, double sparsity = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix p(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      if (i != j && u(rng) > sparsity) {
        p(i, j) = u(rng);
        sum += p(i, j);
      }
    const double target = max_row * u(rng);
    if (sum > 0.0)
      for (std::size_t j = 0; j < d; ++j) p(i, j) *= target / sum;
  }
  return p;
}

/// Random valid network. All arrival rates are positive, which gives (A2);
/// when `stable`, service rates are set to nu_i times a factor in (1.2, 4).
inline JacksonNetwork random_network(std::size_t d, std::mt19937_64& rng, bool stable = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  JacksonNetwork net;
  net.routing = random_routing(d, rng);
  for (std::size_t i = 0; i < d; ++i) net.lambda.push_back(0.1 + 2.0 * u(rng));
  net.mu.assign(d, 1.0);
  if (stable) {
    const Vector nu = jackson::solve_traffic(net).nu;
    for (std::size_t i = 0; i < d; ++i) net.mu[i] = nu[i] * (1.2 + 2.8 * u(rng));
  } else {
    for (std::size_t i = 0; i < d; ++i) net.mu[i] = 0.5 + 5.0 * u(rng);
  }
  return net;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace testing_support

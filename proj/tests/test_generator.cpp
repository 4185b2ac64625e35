#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "jackson/generator.hpp"
#include "jackson/lyapunov.hpp"
#include "support.hpp"

using namespace jackson;
using namespace testing_support;

namespace {

/// Rates out of x as an explicit map, built from the model definition.
std::map<State, double> transitions(const JacksonNetwork& net, const State& x) {
  std::map<State, double> q;
  const std::size_t d = net.dim();
  for (std::size_t i = 0; i < d; ++i) {
    if (net.lambda[i] > 0.0) {
      State y = x;
      ++y[i];
      q[y] += net.lambda[i];
    }
    if (x[i] == 0) continue;
    State out = x;
    --out[i];
    if (net.exit_probability(i) > 0.0) q[out] += net.mu[i] * net.exit_probability(i);
    for (std::size_t j = 0; j < d; ++j)
      if (net.routing(i, j) > 0.0) {
        State y = out;
        ++y[j];
        q[y] += net.mu[i] * net.routing(i, j);
      }
  }
  return q;
}

double generator_oracle(const JacksonNetwork& net, const StateFunction& f, const State& x) {
  double s = 0.0;
  const double fx = f(x);
  for (const auto& [y, rate] : transitions(net, x)) s += rate * (f(y) - fx);
  return s;
}

State random_state(std::size_t d, std::mt19937_64& rng, long cap) {
  std::uniform_int_distribution<long> k(0, cap);
  std::bernoulli_distribution zero(0.3);
  State x(d);
  for (long& v : x) v = zero(rng) ? 0 : k(rng);
  return x;
}

}  // namespace

TEST_CASE("generator examples") {
  const JacksonNetwork a = net_a();
  const StateFunction pow2 = [](std::span<const long> x) { return std::pow(2.0, static_cast<double>(x[0])); };
  CHECK(apply_generator(a, pow2, State{3, 1}) == doctest::Approx(-8));
  const StateFunction one = [](std::span<const long>) { return 1.0; };
  CHECK(apply_generator(net_c(), one, State{2, 0, 5}) == 0.0);
  const StateFunction first = [](std::span<const long> x) { return static_cast<double>(x[0]); };
  CHECK(apply_generator(a, first, State{0, 0}) == doctest::Approx(1));
  CHECK_THROWS(apply_generator(a, one, State{-1, 0}));
}

TEST_CASE("face Laplace examples") {
  const JacksonNetwork a = net_a();
  const Vector zero(2, 0.0);
  CHECK(face_laplace(a, FaceSet::full(2), zero) == 0.0);
  CHECK(face_laplace(a, FaceSet(2), zero) == 0.0);
  const Vector alpha{std::log(2.0), 0.0};
  CHECK(face_laplace(a, FaceSet::full(2), alpha) == doctest::Approx(-1));
  FaceSet second(2);
  second.insert(1);
  CHECK(face_laplace(a, second, alpha) == doctest::Approx(1));
  CHECK(FaceSet::of_state(State{0, 3}).contains(1));
  CHECK_FALSE(FaceSet::of_state(State{0, 3}).contains(0));
}

TEST_CASE("face system examples") {
  const TrafficSolution ta = solve_traffic(net_a());
  CHECK(solve_face_system(ta, 0, 0.0) == Vector{0, 0});
  const Vector alpha = solve_face_system(ta, 0, 1.0);
  CHECK(alpha[0] == doctest::Approx(std::log(2.0)));
  CHECK(alpha[1] == 0.0);
  CHECK_THROWS_AS(solve_face_system(ta, 0, -1.0), std::domain_error);

  // Circle: G from the displayed closed form, then alpha_j = log(1 + G_j1 / G_11).
  const double p = 0.2, q = 0.3, det = 1 - p * p * p - q * q * q - 3 * p * q;
  const double g11 = (1 - p * q) / det, g21 = (p * p + q) / det, g31 = (q * q + p) / det;
  const Vector ac = solve_face_system(solve_traffic(net_c()), 0, 1.0);
  CHECK(ac[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(ac[1] == doctest::Approx(std::log(1 + g21 / g11)).epsilon(1e-12));
  CHECK(ac[2] == doctest::Approx(std::log(1 + g31 / g11)).epsilon(1e-12));
}

TEST_CASE("exponential rate examples") {
  const JacksonNetwork a = net_a();
  const TrafficSolution ts = solve_traffic(a);
  CHECK(exp_generator_rate(ts, a, 0, 1.0, State{3, 1}) == doctest::Approx(-1));
  CHECK(exp_generator_rate(ts, a, 0, 1.0, State{0, 5}) == doctest::Approx(1));
  CHECK(std::abs(exp_generator_rate(ts, a, 0, 1e-12, State{3, 1})) < 1e-11);
}

TEST_CASE("exp overflow is refused") {
  const Vector alpha{10.0};
  CHECK_THROWS_AS(exp_dot(alpha, State{71}), ExponentOverflow);
  CHECK(exp_dot(alpha, State{70}) == doctest::Approx(std::exp(700.0)));
}

TEST_CASE("generator matches the explicit transition list") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 5;
    const JacksonNetwork net = random_network(d, rng, trial % 2 == 0);
    const State x = random_state(d, rng, 6);
    Vector w(d);
    for (double& v : w) v = u(rng);
    const StateFunction f = [&](std::span<const long> y) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += w[i] * static_cast<double>(y[i] * y[i]);
      return std::sin(s);
    };
    CHECK(apply_generator(net, f, x) == doctest::Approx(generator_oracle(net, f, x)).epsilon(1e-12));
    double total = 0.0;
    for (const auto& [y, rate] : transitions(net, x)) {
      CHECK(rate > 0.0);
      for (long v : y) CHECK(v >= 0);
      total += rate;
    }
    // Outflow equals the diagonal: sum_i lambda_i + sum_{x_i > 0} mu_i.
    double expected = 0.0;
    for (std::size_t i = 0; i < d; ++i) expected += net.lambda[i] + (x[i] > 0 ? net.mu[i] : 0.0);
    CHECK(total == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("exponentials are eigenfunctions face by face") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 5;
    const JacksonNetwork net = random_network(d, rng, trial % 3 != 0);
    Vector alpha(d);
    for (double& v : alpha) v = u(rng);
    const State x = random_state(d, rng, 10);
    const StateFunction f = [&](std::span<const long> y) { return exp_dot(alpha, y); };
    const double lhs = apply_generator(net, f, x);
    const double rhs = face_laplace(net, FaceSet::of_state(x), alpha) * f(x);
    CAPTURE(trial);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(std::abs(lhs), f(x)));
  }
}

TEST_CASE("face system fixed point and rate") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.9, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 5;
    const JacksonNetwork net = random_network(d, rng);
    const TrafficSolution ts = solve_traffic(net);
    const std::size_t i = static_cast<std::size_t>(trial) % d;
    const double s = u(rng);
    const Vector alpha = solve_face_system(ts, i, s);
    CHECK(std::exp(alpha[i]) == doctest::Approx(1 + s));
    for (std::size_t j = 0; j < d; ++j) {
      if (j == i) continue;
      double rhs = net.exit_probability(j);
      for (std::size_t k = 0; k < d; ++k) rhs += net.routing(j, k) * std::exp(alpha[k]);
      CHECK(std::abs(std::exp(alpha[j]) - rhs) <= 1e-10);
    }
    for (int mask = 0; mask < (1 << d); ++mask) {
      FaceSet face(d);
      for (std::size_t k = 0; k < d; ++k)
        if (mask & (1 << k)) face.insert(k);
      const double expected =
          (s / ts.fundamental(i, i)) * (ts.nu[i] - (face.contains(i) ? net.mu[i] / (1 + s) : 0.0));
      CHECK(std::abs(face_laplace(net, face, alpha) - expected) <= 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("closed-form exponential rate matches the generator") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.01, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 5;
    const JacksonNetwork net = random_network(d, rng);
    const TrafficSolution ts = solve_traffic(net);
    const std::size_t i = static_cast<std::size_t>(trial) % d;
    Vector gamma(d, 0.0);
    gamma[i] = u(rng);
    const Matrix arrows = gamma_arrows(ts, gamma);
    const Vector row(arrows.row(i).begin(), arrows.row(i).end());
    const State x = random_state(d, rng, 10);
    const StateFunction f = [&](std::span<const long> y) { return exp_dot(row, y); };
    const double rate = exp_generator_rate(ts, net, i, gamma[i], x);
    CHECK(rel_diff(apply_generator(net, f, x) / f(x), rate) <= 1e-9);
  }
}

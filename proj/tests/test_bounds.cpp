#include <doctest.h>

#include <cmath>
#include <random>

#include "jackson/bounds.hpp"
#include "support.hpp"

using namespace jackson;
using namespace testing_support;

namespace {

double term(const JacksonNetwork& net, const TrafficSolution& ts, std::size_t i, double g) {
  return g / ts.fundamental(i, i) * (net.mu[i] / (1 + g) - ts.nu[i]);
}

}  // namespace

TEST_CASE("objective examples") {
  const JacksonNetwork a = net_a();
  const TrafficSolution ta = solve_traffic(a);
  CHECK(objective(a, ta, Vector{0, 0}) == 0.0);
  CHECK(objective(a, ta, Vector{1, 1}) == doctest::Approx(1));
  const Vector star = gamma_star(a, ta);
  CHECK(star == Vector{1, 1});
  for (std::size_t i = 0; i < 2; ++i) CHECK(term(a, ta, i, star[i]) == doctest::Approx(1));
}

TEST_CASE("lower bound examples") {
  CHECK(lower_bound(net_a(), solve_traffic(net_a())) == doctest::Approx(-1));
  CHECK(lower_bound(net_d(), solve_traffic(net_d())) == doctest::Approx(-1));
  const double b = -(5.0 / 6.0) * std::pow(3 - std::sqrt(2.0), 2);
  CHECK(lower_bound(net_b(), solve_traffic(net_b())) == doctest::Approx(b).epsilon(1e-12));
  CHECK(b == doctest::Approx(-2.0956).epsilon(1e-4));
  CHECK_THROWS(lower_bound(net_e(), solve_traffic(net_e())));
}

TEST_CASE("upper bound examples") {
  for (const JacksonNetwork& net : {net_a(), net_b(), net_d()}) {
    const TrafficSolution ts = solve_traffic(net);
    const GammaBound g = upper_bound_gamma(net, ts);
    CHECK(std::abs(g.value - lower_bound(net, ts)) < 1e-4);
    CHECK(g.verdict != Membership::non_member);
    CHECK(g.evaluations <= 5000u * 8u + 100u);
  }
  const JacksonNetwork a = net_a();
  const TrafficSolution ta = solve_traffic(a);
  CHECK(rho_eps_objective(a, ta, Vector{1, 2}, 1.0) == doctest::Approx(5.0 / 6.0));
  CHECK(std::abs(rho_eps_objective(a, ta, Vector{1, 2}, 1e-9)) < 1e-8);

  const JacksonNetwork d = net_d();
  const TrafficSolution td = solve_traffic(d);
  const RhoEpsBound r = upper_bound_rho_eps(d, td);
  CHECK(r.value == doctest::Approx(-1).epsilon(1e-6));
  CHECK(r.eps / r.rho[0] == doctest::Approx(1).epsilon(1e-3));
}

TEST_CASE("equality diagnostic examples") {
  for (const JacksonNetwork& net : {net_a(), net_b(), net_d()}) {
    const EqualityDiagnosis e = equality_diagnostic(net, solve_traffic(net));
    CHECK(e.equality);
    REQUIRE(e.witness);
  }
  const EqualityDiagnosis a = equality_diagnostic(net_a(), solve_traffic(net_a()));
  for (const DeltaInterval& iv : a.intervals) {
    CHECK(iv.degenerate);
    CHECK(iv.lower == doctest::Approx(1));
    CHECK(iv.upper == doctest::Approx(1));
  }
  CHECK(std::abs((*a.witness)[0] - 1) < 1e-3);
  CHECK(std::abs((*a.witness)[1] - 1) < 1e-3);
}

TEST_CASE("delta intervals solve the defining quadratic") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 5;
    const JacksonNetwork net = random_network(d, rng);
    const TrafficSolution ts = solve_traffic(net);
    double m = INFINITY;
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const double v = std::pow(std::sqrt(net.mu[i]) - std::sqrt(ts.nu[i]), 2) / ts.fundamental(i, i);
      if (v < m) {
        m = v;
        argmin = i;
      }
    }
    const Vector star = gamma_star(net, ts);
    const auto intervals = delta_intervals(net, ts);
    REQUIRE(intervals.size() == d);
    for (const DeltaInterval& iv : intervals) {
      const std::size_t i = iv.index;
      CAPTURE(trial);
      CAPTURE(i);
      CHECK(iv.lower > 0.0);
      CHECK(iv.lower <= star[i] + 1e-9);
      CHECK(iv.upper >= star[i] - 1e-9);
      CHECK(iv.upper < net.mu[i] / ts.nu[i] - 1);
      CHECK(iv.contains_gamma_star);
      if (i == argmin) {
        CHECK(iv.degenerate);
        CHECK(iv.lower == doctest::Approx(star[i]).epsilon(1e-4));
      } else if (!iv.degenerate) {
        CHECK(term(net, ts, i, iv.lower) == doctest::Approx(m).epsilon(1e-9));
        CHECK(term(net, ts, i, iv.upper) == doctest::Approx(m).epsilon(1e-9));
        CHECK(term(net, ts, i, 0.5 * (iv.lower + iv.upper)) >= m - 1e-12);
        CHECK(term(net, ts, i, 0.99 * iv.lower) < m);
      }
    }
  }
}

TEST_CASE("per-queue maximizer matches a fine grid") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double nu = u(rng), mu = nu * (1.1 + u(rng));
    const JacksonNetwork net{{nu}, {mu}, Matrix(1, 1)};
    const TrafficSolution ts = solve_traffic(net);
    const double star = gamma_star(net, ts)[0];
    double best = -INFINITY, arg = 0.0;
    for (double g = 0.0; g < mu / nu - 1; g += 1e-6) {
      const double v = term(net, ts, 0, g);
      if (v > best) {
        best = v;
        arg = g;
      }
    }
    CHECK(std::abs(arg - star) < 1e-5);
    CHECK(best == doctest::Approx(std::pow(std::sqrt(mu) - std::sqrt(nu), 2)).epsilon(1e-10));
  }
}

TEST_CASE("sandwich on random networks") {
  std::mt19937_64 rng(79);
  OptimizerOptions fast;
  fast.budget = 1500;
  fast.starts = 4;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const JacksonNetwork net = random_network(d, rng);
    const TrafficSolution ts = solve_traffic(net);
    const SpectralBoundsReport r = compute_bounds(net, ts, fast);
    CAPTURE(trial);
    CHECK(r.lower <= r.upper_gamma.value + 1e-9);
    CHECK(r.lower <= r.upper_rho_eps.value + 1e-9);
    CHECK(r.upper_gamma.value <= r.upper_rho_eps.value + 1e-9);
    CHECK(r.upper_gamma.value <= 0.0);
    CHECK(gamma_membership(ts, r.upper_gamma.gamma).in_closure());
    CHECK(-objective(net, ts, r.upper_gamma.gamma) == doctest::Approx(r.upper_gamma.value));
    if (r.equality.equality) {
      REQUIRE(r.equality.witness);
      CHECK(gamma_membership(ts, *r.equality.witness).in_closure());
    }
  }
}

TEST_CASE("optimizer is deterministic and monotone in the budget") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    const JacksonNetwork net = random_network(3 + trial % 2, rng);
    const TrafficSolution ts = solve_traffic(net);
    double previous = INFINITY;
    for (std::size_t budget : {200u, 800u, 3000u}) {
      OptimizerOptions o;
      o.budget = budget;
      o.seed = 9;
      const GammaBound a = upper_bound_gamma(net, ts, o);
      const GammaBound b = upper_bound_gamma(net, ts, o);
      CHECK(a.value == b.value);
      CHECK(a.gamma == b.gamma);
      CHECK(a.value <= previous + 1e-12);
      previous = a.value;
    }
  }
}

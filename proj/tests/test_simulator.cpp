#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <cmath>
#include <map>

#include "jackson/simulator.hpp"
#include "support.hpp"

using namespace jackson;
using namespace testing_support;

namespace {

SimConfig config(std::uint64_t seed, double horizon, std::size_t reps, unsigned threads = 0) {
  SimConfig c;
  c.seed = seed;
  c.horizon = horizon;
  c.replications = reps;
  c.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("stream rng") {
  StreamRng a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  for (int k = 0; k < 100; ++k) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
  }
  StreamRng u(5, 3);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double v = u.uniform();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    sum += v;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("path examples") {
  const JacksonNetwork a = net_a();
  StreamRng rng(3, 0);
  const PathSummary zero = simulate_path(a, State{0, 0}, 0.0, rng);
  CHECK(zero.jumps == 0);
  CHECK(zero.final_state == State{0, 0});

  // The sojourn in (1, 1, 1) of NET-B lasts Exp(3 + 27).
  const StateSet moved_b = [](std::span<const long> x) { return !(x[0] == 1 && x[1] == 1 && x[2] == 1); };
  double total = 0.0;
  constexpr int n = 100000;
  for (int k = 0; k < n; ++k) {
    StreamRng r(11, static_cast<std::uint64_t>(k));
    total += *simulate_path(net_b(), State{1, 1, 1}, INFINITY, r, &moved_b).hit_time;
  }
  // Mean holding time 1 / (3 + 27), within 4 standard errors.
  CHECK(std::abs(total / n - 1.0 / 30) < 4 * (1.0 / 30) / std::sqrt(n));

  // Occupied single server of NET-D: mean holding time 1 / (1 + 4).
  const StateSet any_move = [](std::span<const long> x) { return x[0] != 3; };
  total = 0.0;
  for (int k = 0; k < n; ++k) {
    StreamRng r(13, static_cast<std::uint64_t>(k));
    total += *simulate_path(net_d(), State{3}, INFINITY, r, &any_move).hit_time;
  }
  CHECK(std::abs(total / n - 0.2) < 4 * 0.2 / std::sqrt(n));

  // Starting inside the target does not count as a hit at time 0.
  const StateSet low = [](std::span<const long> x) { return x[0] + x[1] <= 30; };
  StreamRng r(17, 0);
  const PathSummary p = simulate_path(a, State{0, 0}, INFINITY, r, &low);
  REQUIRE(p.hit_time);
  CHECK(*p.hit_time > 0.0);
  CHECK(p.jumps == 1);
}

TEST_CASE("jump destinations follow the transition rates") {
  // From (2, 1, 0) of NET-C. Rates: arrivals 1 each, queue 1 serves 16 and
  // queue 2 serves 16, routed by P with the remainder leaving.
  const JacksonNetwork c = net_c();
  const State x0{2, 1, 0};
  std::map<State, double> rates;
  for (std::size_t i = 0; i < 3; ++i) {
    State y = x0;
    ++y[i];
    rates[y] += c.lambda[i];
    if (x0[i] == 0) continue;
    State out = x0;
    --out[i];
    rates[out] += c.mu[i] * c.exit_probability(i);
    for (std::size_t j = 0; j < 3; ++j) {
      if (c.routing(i, j) == 0.0) continue;
      State z = out;
      ++z[j];
      rates[z] += c.mu[i] * c.routing(i, j);
    }
  }
  double total_rate = 0.0;
  for (const auto& kv : rates) total_rate += kv.second;

  const StateSet moved = [&](std::span<const long> x) { return !std::equal(x.begin(), x.end(), x0.begin()); };
  std::map<State, double> counts;
  constexpr int n = 200000;
  for (int k = 0; k < n; ++k) {
    StreamRng r(19, static_cast<std::uint64_t>(k));
    const PathSummary p = simulate_path(c, x0, INFINITY, r, &moved);
    REQUIRE(p.jumps == 1);
    counts[p.final_state] += 1;
  }
  double chi2 = 0.0;
  for (const auto& [y, c_obs] : counts) REQUIRE(rates.count(y));
  for (const auto& [y, rate] : rates) {
    const double expected = n * rate / total_rate;
    chi2 += std::pow(counts[y] - expected, 2) / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(rates.size() - 1));
  CHECK(chi2 < boost::math::quantile(dist, 0.999));
}

TEST_CASE("hitting examples") {
  const JacksonNetwork a = net_a();
  const StateSet axis = [](std::span<const long> x) { return x[0] == 0; };
  std::vector<double> hits;
  for (int k = 0; k < 2000; ++k) {
    StreamRng r(23, static_cast<std::uint64_t>(k));
    const PathSummary p = simulate_path(a, State{5, 0}, INFINITY, r, &axis);
    REQUIRE(p.hit_time);
    hits.push_back(*p.hit_time);
  }
  CHECK(hits.size() == 2000);

  const StateSet low = [](std::span<const long> x) { return x[0] + x[1] <= 30; };
  hits.clear();
  for (int k = 0; k < 501; ++k) {
    StreamRng r(29, static_cast<std::uint64_t>(k));
    hits.push_back(*simulate_path(a, State{40, 0}, INFINITY, r, &low).hit_time);
  }
  std::nth_element(hits.begin(), hits.begin() + 250, hits.end());
  CHECK(hits[250] < 10.0);
}

TEST_CASE("results do not depend on the thread count") {
  const JacksonNetwork b = net_b();
  const TrafficSolution tb = solve_traffic(b);
  const StationaryEstimate one = estimate_stationary(b, tb, config(5, 200, 8, 1), 2);
  const StationaryEstimate many = estimate_stationary(b, tb, config(5, 200, 8, 4), 2);
  REQUIRE(one.joint.size() == many.joint.size());
  for (std::size_t k = 0; k < one.joint.size(); ++k) {
    CHECK(one.joint[k].estimate == many.joint[k].estimate);
    CHECK(one.joint[k].half_width == many.joint[k].half_width);
  }
  CHECK(one.max_abs_deviation == many.max_abs_deviation);

  const StateSet low = [](std::span<const long> x) { return x[0] + x[1] + x[2] <= 2; };
  const TailEstimate t1 = estimate_tail(b, config(9, 1, 3000, 1), low, State{3, 3, 3}, {0.1, 0.5, 1});
  const TailEstimate t4 = estimate_tail(b, config(9, 1, 3000, 3), low, State{3, 3, 3}, {0.1, 0.5, 1});
  for (std::size_t k = 0; k < t1.curve.size(); ++k) CHECK(t1.curve[k].estimate == t4.curve[k].estimate);
}

TEST_CASE("stationary estimates match the product form") {
  const JacksonNetwork a = net_a();
  const StationaryEstimate ea = estimate_stationary(a, solve_traffic(a), config(31, 20000, 4), 3);
  CHECK(ea.joint.size() == 16);
  CHECK(ea.marginals.size() == 2);
  const BoxPoint& m0 = ea.marginals[0][0];
  CHECK(m0.exact == doctest::Approx(0.75));
  CHECK(std::abs(m0.estimate - 0.75) < 3 * m0.half_width / 1.96 + 1e-3);
  const BoxPoint& origin = ea.joint[0];
  CHECK(origin.state == State{0, 0});
  CHECK(origin.exact == doctest::Approx(0.5625));
  CHECK(std::abs(origin.estimate - 0.5625) < 3 * origin.half_width / 1.96 + 1e-3);
  for (const BoxPoint& p : ea.joint) CHECK(p.exact == doctest::Approx(stationary_probability(solve_traffic(a), a, p.state)));

  const JacksonNetwork b = net_b();
  const StationaryEstimate eb = estimate_stationary(b, solve_traffic(b), config(37, 20000, 4), 2);
  for (std::size_t i = 0; i < 3; ++i) {
    const BoxPoint& m = eb.marginals[i][0];
    CHECK(m.exact == doctest::Approx(7.0 / 9));
    CHECK(std::abs(m.estimate - 7.0 / 9) < 3 * m.half_width / 1.96 + 1e-3);
  }
  CHECK(eb.batches == 40);
}

TEST_CASE("tail estimates") {
  const JacksonNetwork a = net_a();
  const StateSet low = [](std::span<const long> x) { return x[0] + x[1] <= 3; };
  const TailEstimate t = estimate_tail(a, config(41, 0, 4000), low, State{8, 0}, {0, 1, 2, 5});
  REQUIRE(t.curve.size() == 4);
  CHECK(t.curve[0].estimate == 1.0);
  for (const TailPoint& p : t.curve) {
    CHECK(p.lower <= p.estimate);
    CHECK(p.estimate <= p.upper);
    CHECK(p.lower >= 0.0);
    CHECK(p.upper <= 1.0);
  }
  CHECK(t.monotone);
  CHECK(t.curve[3].estimate < t.curve[1].estimate);

  const auto margins = verify_against_bound(t, [](double) { return 1.0; });
  for (std::size_t k = 0; k < margins.size(); ++k)
    CHECK(margins[k] == doctest::Approx(1.0 - t.curve[k].lower));

  CHECK_THROWS(estimate_tail(a, config(1, 1, 10), low, State{1, 1}, {1.0}));
}

TEST_CASE("rare tails use exact binomial intervals") {
  const JacksonNetwork a = net_a();
  const StateSet low = [](std::span<const long> x) { return x[0] + x[1] <= 3; };
  const TailEstimate t = estimate_tail(a, config(43, 0, 2000), low, State{5, 0}, {30.0});
  const TailPoint& p = t.curve[0];
  CHECK(p.estimate < 0.01);
  CHECK(p.lower == 0.0);
  // Clopper-Pearson upper edge for 0 successes out of n is 1 - 0.025^(1/n).
  if (p.estimate == 0.0) CHECK(p.upper == doctest::Approx(1 - std::pow(0.025, 1.0 / 2000)).epsilon(1e-9));
  CHECK(p.upper > 0.0);
}

TEST_CASE("invalid configurations are rejected") {
  const JacksonNetwork e = net_e();
  CHECK_THROWS(estimate_stationary(e, solve_traffic(e), config(1, 100, 1), 2));
  const JacksonNetwork a = net_a();
  SimConfig bad = config(1, 100, 1);
  bad.warmup = 200;
  CHECK_THROWS(estimate_stationary(a, solve_traffic(a), bad, 2));
  CHECK_THROWS(estimate_stationary(a, solve_traffic(a), config(1, 100, 0), 2));
}

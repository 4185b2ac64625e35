#include "jackson/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

namespace jackson {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::size_t kBatchesPerReplication = 10;
constexpr double kClopperPearsonBelow = 0.01;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Precomputed jump tables for one network.
struct JumpTable {
  explicit JumpTable(const JacksonNetwork& net) : d(net.dim()), lambda(net.lambda), mu(net.mu) {
    total_arrival = 0.0;
    for (double l : lambda) total_arrival += l;
    cumulative.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        acc += net.routing(i, j);
        cumulative[i].push_back(acc);
      }
    }
  }

  std::size_t d;
  Vector lambda;
  Vector mu;
  double total_arrival;
  std::vector<Vector> cumulative;  // routing CDF per row; the remainder exits
};

/// One jump from x; returns the holding time spent in x before it.
double step(const JumpTable& table, State& x, StreamRng& rng) {
  double total = table.total_arrival;
  for (std::size_t i = 0; i < table.d; ++i)
    if (x[i] > 0) total += table.mu[i];
  if (!(total > 0.0)) throw std::runtime_error("simulate_path: zero total jump rate");
  const double hold = rng.exponential(total);

  double u = rng.uniform() * total;
  for (std::size_t j = 0; j < table.d; ++j) {
    if (u <= table.lambda[j] && table.lambda[j] > 0.0) {
      ++x[j];
      return hold;
    }
    u -= table.lambda[j];
  }
  std::size_t server = table.d;
  for (std::size_t i = 0; i < table.d; ++i) {
    if (x[i] == 0) continue;
    server = i;
    if (u <= table.mu[i]) break;
    u -= table.mu[i];
  }
  if (server == table.d) throw std::runtime_error("simulate_path: jump selection fell through");
  --x[server];
  const double r = rng.uniform();
  const Vector& cdf = table.cumulative[server];
  for (std::size_t j = 0; j < table.d; ++j)
    if (r <= cdf[j] && j != server) {
      ++x[j];
      break;
    }
  return hold;
}

void validate_config(const JacksonNetwork& net, const SimConfig& config) {
  if (!validate_network(net).ok()) throw NetworkError("simulator: invalid network");
  if (config.replications < 1) throw std::invalid_argument("simulator: replications must be at least 1");
  if (!(config.horizon >= 0.0)) throw std::invalid_argument("simulator: horizon must be nonnegative");
}

template <class Work>
void run_replications(std::size_t count, unsigned threads, Work&& work) {
  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < count; r = next++) work(r);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

std::size_t box_index(std::span<const long> x, long cap) {
  std::size_t idx = 0;
  for (long v : x) {
    if (v > cap) return std::numeric_limits<std::size_t>::max();
    idx = idx * static_cast<std::size_t>(cap + 1) + static_cast<std::size_t>(v);
  }
  return idx;
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix(splitmix(seed) ^ splitmix(~stream))) {}

StreamRng::result_type StreamRng::operator()() { return splitmix(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

double StreamRng::uniform() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

double StreamRng::exponential(double rate) { return -std::log(uniform()) / rate; }

PathSummary simulate_path(const JacksonNetwork& net, std::span<const long> initial, double horizon, StreamRng& rng,
                          const StateSet* target) {
  if (initial.size() != net.dim()) throw std::invalid_argument("simulate_path: initial state has the wrong dimension");
  const JumpTable table(net);
  PathSummary out;
  out.final_state.assign(initial.begin(), initial.end());
  double t = 0.0;
  while (true) {
    State next = out.final_state;
    const double hold = step(table, next, rng);
    if (t + hold > horizon) {
      out.elapsed = horizon;
      return out;
    }
    t += hold;
    out.final_state = std::move(next);
    ++out.jumps;
    if (target && (*target)(out.final_state)) {
      out.hit_time = t;
      out.elapsed = t;
      return out;
    }
  }
}

StationaryEstimate estimate_stationary(const JacksonNetwork& net, const TrafficSolution& ts, const SimConfig& config,
                                       long box_cap) {
  validate_config(net, config);
  if (!ts.stable) throw NetworkError("estimate_stationary: network is not stable");
  if (box_cap < 0) throw std::invalid_argument("estimate_stationary: box_cap must be nonnegative");
  const double warmup = config.effective_warmup();
  if (!(config.horizon > warmup && warmup >= 0.0))
    throw std::invalid_argument("estimate_stationary: need horizon > warmup >= 0");

  const std::size_t d = net.dim();
  const std::size_t side = static_cast<std::size_t>(box_cap + 1);
  std::size_t cells = 1;
  for (std::size_t i = 0; i < d; ++i) cells *= side;
  const std::size_t marginal_cells = d * side;
  const double batch_len = (config.horizon - warmup) / static_cast<double>(kBatchesPerReplication);
  const State initial = config.initial_state.empty() ? State(d, 0) : config.initial_state;
  if (initial.size() != d) throw std::invalid_argument("estimate_stationary: initial state has the wrong dimension");

  // occupancy[rep][batch][cell], joint cells first and marginal cells after.
  const std::size_t stride = cells + marginal_cells;
  std::vector<Vector> occupancy(config.replications, Vector(kBatchesPerReplication * stride, 0.0));

  const JumpTable table(net);
  run_replications(config.replications, config.threads, [&](std::size_t rep) {
    StreamRng rng(config.seed, rep);
    Vector& occ = occupancy[rep];
    State x = initial;
    double t = 0.0;
    while (t < config.horizon) {
      State next = x;
      const double hold = step(table, next, rng);
      double from = std::max(t, warmup);
      const double to = std::min(t + hold, config.horizon);
      const std::size_t joint = box_index(x, box_cap);
      while (from < to) {
        std::size_t batch = std::min(kBatchesPerReplication - 1, static_cast<std::size_t>((from - warmup) / batch_len));
        double batch_end = warmup + static_cast<double>(batch + 1) * batch_len;
        // Rounding can place `from` on a batch edge; move on instead of adding nothing.
        if (batch_end <= from && batch + 1 < kBatchesPerReplication) {
          ++batch;
          batch_end = warmup + static_cast<double>(batch + 1) * batch_len;
        }
        const double until = std::min(to, batch == kBatchesPerReplication - 1 ? to : batch_end);
        const double span = until - from;
        double* base = occ.data() + batch * stride;
        if (joint != std::numeric_limits<std::size_t>::max()) base[joint] += span;
        for (std::size_t i = 0; i < d; ++i)
          if (x[i] <= box_cap) base[cells + i * side + static_cast<std::size_t>(x[i])] += span;
        from = until;
      }
      t += hold;
      x = std::move(next);
    }
  });

  // Merge batch means in replication order.
  const std::size_t n = config.replications * kBatchesPerReplication;
  Vector mean(stride, 0.0), sq(stride, 0.0);
  for (const Vector& occ : occupancy)
    for (std::size_t b = 0; b < kBatchesPerReplication; ++b)
      for (std::size_t c = 0; c < stride; ++c) {
        const double v = occ[b * stride + c] / batch_len;
        mean[c] += v;
        sq[c] += v * v;
      }
  auto finish = [&](std::size_t c, BoxPoint& pt) {
    const double m = mean[c] / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (sq[c] - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)) : 0.0;
    pt.estimate = m;
    pt.half_width = kZ95 * std::sqrt(var / static_cast<double>(n));
  };

  StationaryEstimate est;
  est.box_cap = box_cap;
  est.seed = config.seed;
  est.replications = config.replications;
  est.batches = n;
  est.total_time = static_cast<double>(config.replications) * config.horizon;

  State x(d, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    BoxPoint pt;
    pt.state = x;
    finish(c, pt);
    pt.exact = stationary_probability(ts, net, x);
    est.max_abs_deviation = std::max(est.max_abs_deviation, std::abs(pt.estimate - pt.exact));
    est.joint.push_back(std::move(pt));
    for (std::size_t i = d; i-- > 0;) {
      if (++x[i] <= box_cap) break;
      x[i] = 0;
    }
  }
  est.marginals.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < side; ++k) {
      BoxPoint pt;
      pt.state = {static_cast<long>(k)};
      finish(cells + i * side + k, pt);
      const double load = ts.nu[i] / net.mu[i];
      pt.exact = std::pow(load, static_cast<double>(k)) * (1.0 - load);
      est.marginals[i].push_back(std::move(pt));
    }
  return est;
}

TailEstimate estimate_tail(const JacksonNetwork& net, const SimConfig& config, const StateSet& target,
                           std::span<const long> x0, const std::vector<double>& time_grid) {
  validate_config(net, config);
  if (target(x0)) throw std::invalid_argument("estimate_tail: initial state lies in the target set");
  if (time_grid.empty()) throw std::invalid_argument("estimate_tail: empty time grid");
  const double horizon = std::max(config.horizon, *std::max_element(time_grid.begin(), time_grid.end()));

  std::vector<double> hit(config.replications, std::numeric_limits<double>::infinity());
  std::vector<double> elapsed(config.replications, 0.0);
  run_replications(config.replications, config.threads, [&](std::size_t rep) {
    StreamRng rng(config.seed, rep);
    const PathSummary path = simulate_path(net, x0, horizon, rng, &target);
    if (path.hit_time) hit[rep] = *path.hit_time;
    elapsed[rep] = path.elapsed;
  });

  TailEstimate est;
  est.seed = config.seed;
  est.replications = config.replications;
  for (double e : elapsed) est.total_time += e;
  const double n = static_cast<double>(config.replications);
  for (double t : time_grid) {
    const auto survivors = static_cast<std::size_t>(std::count_if(hit.begin(), hit.end(), [t](double h) { return h > t; }));
    TailPoint pt;
    pt.t = t;
    pt.estimate = static_cast<double>(survivors) / n;
    if (pt.estimate < kClopperPearsonBelow) {
      const double k = static_cast<double>(survivors);
      pt.lower = survivors == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, 0.025);
      pt.upper = survivors == config.replications ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 0.975);
    } else {
      const double hw = kZ95 * std::sqrt(pt.estimate * (1.0 - pt.estimate) / n);
      pt.lower = std::max(0.0, pt.estimate - hw);
      pt.upper = std::min(1.0, pt.estimate + hw);
    }
    pt.half_width = 0.5 * (pt.upper - pt.lower);
    est.curve.push_back(pt);
  }
  for (std::size_t k = 1; k < est.curve.size(); ++k)
    if (est.curve[k].t >= est.curve[k - 1].t && est.curve[k].estimate > est.curve[k - 1].estimate) est.monotone = false;
  return est;
}

std::vector<double> verify_against_bound(const TailEstimate& estimate, const std::function<double(double)>& bound) {
  std::vector<double> margins;
  for (const TailPoint& pt : estimate.curve) margins.push_back(bound(pt.t) - pt.lower);
  return margins;
}

}  // namespace jackson

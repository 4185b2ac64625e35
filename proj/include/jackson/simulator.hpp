#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jackson/network.hpp"

namespace jackson {

/// Counter-based random stream: the n-th output is a SplitMix64 hash of
/// (key, n), and the key is derived from (seed, replication). Streams for
/// different replications are independent of evaluation order.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Uniform on (0, 1].
  double uniform();
  double exponential(double rate);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct SimConfig {
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::size_t replications = 1;
  /// Negative means the default of horizon / 100.
  double warmup = -1.0;
  State initial_state;
  /// 0 uses the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;

  double effective_warmup() const { return warmup < 0.0 ? horizon / 100.0 : warmup; }
};

using StateSet = std::function<bool(std::span<const long>)>;

struct PathSummary {
  State final_state;
  std::optional<double> hit_time;
  std::uint64_t jumps = 0;
  double elapsed = 0.0;
};

/// Event-by-event simulation until `horizon`, or until the first entry into
/// `target` strictly after time 0 when a target set is given.
PathSummary simulate_path(const JacksonNetwork& net, std::span<const long> initial, double horizon, StreamRng& rng,
                          const StateSet* target = nullptr);

struct BoxPoint {
  State state;
  double estimate = 0.0;
  double half_width = 0.0;
  double exact = 0.0;
};

struct StationaryEstimate {
  long box_cap = 0;
  std::vector<BoxPoint> joint;  // every state of [0, box_cap]^d
  /// marginals[i][k] = estimated P(X_i = k), k <= box_cap.
  std::vector<std::vector<BoxPoint>> marginals;
  double max_abs_deviation = 0.0;  // over the joint box
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  std::size_t batches = 0;
  double total_time = 0.0;
};

/// Time-average occupancy over [warmup, horizon], averaged over replications.
/// Half-widths are 95% normal intervals from batch means (10 batches per
/// replication).
StationaryEstimate estimate_stationary(const JacksonNetwork& net, const TrafficSolution& ts,
                                       const SimConfig& config, long box_cap);

struct TailPoint {
  double t = 0.0;
  double estimate = 0.0;  // empirical P(tau_E > t)
  double lower = 0.0;     // 95% confidence edges
  double upper = 0.0;
  double half_width = 0.0;
};

struct TailEstimate {
  std::vector<TailPoint> curve;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  double total_time = 0.0;
  bool monotone = true;  // soft diagnostic, no correction applied
};

/// Empirical survival function of the hitting time of `target` from x0.
/// Confidence edges are Wald intervals, or Clopper-Pearson when the estimate
/// is below 0.01. Throws if x0 is in the target.
TailEstimate estimate_tail(const JacksonNetwork& net, const SimConfig& config, const StateSet& target,
                           std::span<const long> x0, const std::vector<double>& time_grid);

/// bound(t) - (estimate(t) - half_width(t)) at every grid point.
std::vector<double> verify_against_bound(const TailEstimate& estimate, const std::function<double(double)>& bound);

}  // namespace jackson

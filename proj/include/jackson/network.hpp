#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jackson/matrix.hpp"

namespace jackson {

/// Queue-length vector in Z_+^d.
using State = std::vector<long>;

/// Open single-class Jackson network: Poisson arrivals `lambda`, exponential
/// servers `mu`, Markovian routing `routing`. Exit probabilities are derived
/// from the row deficits of the routing matrix and never stored.
struct JacksonNetwork {
  Vector lambda;
  Vector mu;
  Matrix routing;

  std::size_t dim() const { return mu.size(); }
  double exit_probability(std::size_t i) const;
};

/// Thrown when an operation's precondition on the network does not hold
/// (unstable network, wrong dimension, non-matching routing pattern...).
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Violation {
  enum class Kind {
    dimension_mismatch,
    negative_arrival_rate,
    nonpositive_service_rate,
    no_arrivals,
    routing_entry_out_of_range,
    self_loop,
    row_sum_exceeds_one,
    spectral_radius_not_below_one,  // (A1)
    unreachable_queue,              // (A2)
  };
  Kind kind;
  std::optional<std::size_t> index;
  std::string message;
};

const char* to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
};

/// Structural checks first, then (A1) and (A2). Every violation is collected;
/// (A1)/(A2) are skipped only when the dimensions are inconsistent.
ValidationReport validate_network(const JacksonNetwork& net);

struct TrafficSolution {
  Vector nu;
  Matrix fundamental;  // G = (Id - P)^{-1}
  Matrix hitting;      // Q_{ji} = G_{ji} / G_{ii}
  double routing_spectral_radius = 0.0;
  bool stable = false;
  double residual = 0.0;  // ||nu - lambda - nu P||_inf

  std::size_t dim() const { return nu.size(); }
  double load(std::size_t i, const JacksonNetwork& net) const { return nu[i] / net.mu[i]; }
};

/// Solves the traffic equations nu = lambda + nu P and builds G and Q.
/// Throws NetworkError if the network fails validation.
TrafficSolution solve_traffic(const JacksonNetwork& net);

/// Largest-modulus eigenvalue of a nonnegative matrix by power iteration on
/// P + 1e-6 Id (the shift makes nilpotent and periodic matrices converge).
double routing_spectral_radius(const Matrix& routing);

/// R(rho) = max_i (rho P)_i / rho_i. Requires rho_i > 0.
double rho_contraction(const Matrix& routing, std::span<const double> rho);

/// Stationary time reversal of a stable network. The reversed network has
/// lambda~_i = nu_i p_i0, mu~ = mu and p~_ij = nu_j p_ji / nu_i.
JacksonNetwork time_reverse(const JacksonNetwork& net, const TrafficSolution& ts);

/// Product-form stationary law pi(x) = prod_i (nu_i/mu_i)^{x_i} (1 - nu_i/mu_i).
double stationary_probability(const TrafficSolution& ts, const JacksonNetwork& net,
                              std::span<const long> x);

enum class BranchingKind { none, branching, transposed_branching, both };

const char* to_string(BranchingKind kind);

/// A matrix has a branching structure when every column has at most one
/// positive entry.
BranchingKind detect_branching(const Matrix& routing);

}  // namespace jackson

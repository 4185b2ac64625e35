#include "jackson/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace jackson {

namespace {

constexpr double kEntryTolerance = 1e-12;
constexpr double kPowerShift = 1e-6;
constexpr int kPowerIterations = 10000;
constexpr double kPowerTolerance = 1e-12;
// (A1) is declared violated once the spectral radius is this close to one.
constexpr double kUnitRadiusMargin = 1e-10;

std::string describe(const char* what, std::size_t i) {
  std::ostringstream os;
  os << what << " (queue " << i + 1 << ")";
  return os.str();
}

bool dimensions_consistent(const JacksonNetwork& net) {
  const std::size_t d = net.mu.size();
  return d > 0 && net.lambda.size() == d && net.routing.rows() == d && net.routing.cols() == d;
}

void require_stable(const TrafficSolution& ts, const char* op) {
  if (!ts.stable) throw NetworkError(std::string(op) + ": network is not stable (nu_i >= mu_i for some i)");
}

}  // namespace

double JacksonNetwork::exit_probability(std::size_t i) const {
  double s = 0.0;
  for (double p : routing.row(i)) s += p;
  return std::max(0.0, 1.0 - s);
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::dimension_mismatch: return "dimension_mismatch";
    case Violation::Kind::negative_arrival_rate: return "negative_arrival_rate";
    case Violation::Kind::nonpositive_service_rate: return "nonpositive_service_rate";
    case Violation::Kind::no_arrivals: return "no_arrivals";
    case Violation::Kind::routing_entry_out_of_range: return "routing_entry_out_of_range";
    case Violation::Kind::self_loop: return "self_loop";
    case Violation::Kind::row_sum_exceeds_one: return "row_sum_exceeds_one";
    case Violation::Kind::spectral_radius_not_below_one: return "A1_spectral_radius_not_below_one";
    case Violation::Kind::unreachable_queue: return "A2_unreachable_queue";
  }
  return "unknown";
}

bool ValidationReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate_network(const JacksonNetwork& net) {
  ValidationReport report;
  auto add = [&report](Violation::Kind kind, std::optional<std::size_t> index, std::string msg) {
    report.violations.push_back({kind, index, std::move(msg)});
  };

  if (!dimensions_consistent(net)) {
    std::ostringstream os;
    os << "inconsistent dimensions: lambda has " << net.lambda.size() << " entries, mu has "
       << net.mu.size() << ", routing is " << net.routing.rows() << "x" << net.routing.cols();
    add(Violation::Kind::dimension_mismatch, std::nullopt, os.str());
    return report;
  }

  const std::size_t d = net.dim();
  bool any_arrival = false;
  for (std::size_t i = 0; i < d; ++i) {
    if (!(net.lambda[i] >= 0.0) || !std::isfinite(net.lambda[i]))
      add(Violation::Kind::negative_arrival_rate, i, describe("arrival rate must be finite and >= 0", i));
    if (net.lambda[i] > 0.0) any_arrival = true;
    if (!(net.mu[i] > 0.0) || !std::isfinite(net.mu[i]))
      add(Violation::Kind::nonpositive_service_rate, i, describe("service rate must be finite and > 0", i));
  }
  if (!any_arrival) add(Violation::Kind::no_arrivals, std::nullopt, "no queue has a positive arrival rate");

  for (std::size_t i = 0; i < d; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double p = net.routing(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "routing probability p[" << i + 1 << "][" << j + 1 << "] = " << p << " is outside [0, 1]";
        add(Violation::Kind::routing_entry_out_of_range, i, os.str());
      }
      row_sum += p;
    }
    if (net.routing(i, i) != 0.0) add(Violation::Kind::self_loop, i, describe("self-routing p_ii must be zero", i));
    if (row_sum > 1.0 + kEntryTolerance) {
      std::ostringstream os;
      os << "routing row " << i + 1 << " sums to " << row_sum << " > 1";
      add(Violation::Kind::row_sum_exceeds_one, i, os.str());
    }
  }

  // (A1): every customer eventually leaves.
  if (!report.has(Violation::Kind::routing_entry_out_of_range)) {
    const double radius = routing_spectral_radius(net.routing);
    if (radius >= 1.0 - kUnitRadiusMargin) {
      std::ostringstream os;
      os << "spectral radius of the routing matrix is " << radius << ", not strictly below 1";
      add(Violation::Kind::spectral_radius_not_below_one, std::nullopt, os.str());
    }
  }

  // (A2): every queue is reachable from some queue with external arrivals.
  std::vector<bool> reached(d, false);
  std::deque<std::size_t> frontier;
  for (std::size_t j = 0; j < d; ++j)
    if (net.lambda[j] > 0.0) {
      reached[j] = true;
      frontier.push_back(j);
    }
  while (!frontier.empty()) {
    const std::size_t j = frontier.front();
    frontier.pop_front();
    for (std::size_t k = 0; k < d; ++k)
      if (!reached[k] && net.routing(j, k) > 0.0) {
        reached[k] = true;
        frontier.push_back(k);
      }
  }
  for (std::size_t i = 0; i < d; ++i)
    if (!reached[i])
      add(Violation::Kind::unreachable_queue, i, describe("queue receives no traffic from any arrival stream", i));

  return report;
}

double routing_spectral_radius(const Matrix& routing) {
  const std::size_t d = routing.rows();
  if (!routing.square()) throw std::invalid_argument("routing_spectral_radius: matrix is not square");
  if (d == 0) return 0.0;
  // Acyclic support (nilpotent P): the radius is exactly 0, which the shifted
  // iteration only approaches at rate shift / iterations.
  Matrix power = routing;
  for (std::size_t k = 1; k < d; ++k) power = power * routing;
  if (norm_inf(power) == 0.0) return 0.0;
  Matrix shifted = routing;
  for (std::size_t i = 0; i < d; ++i) shifted(i, i) += kPowerShift;

  Vector x(d, 1.0 / static_cast<double>(d));
  double estimate = 0.0;
  for (int it = 0; it < kPowerIterations; ++it) {
    Vector y = right_multiply(shifted, x);
    double norm = 0.0;
    for (double v : y) norm += std::abs(v);
    // ||x||_1 = 1, so the norm ratio is the Rayleigh-type estimate.
    const double next = norm;
    for (double& v : y) v /= norm;
    x = std::move(y);
    const bool converged = it > 0 && std::abs(next - estimate) < kPowerTolerance;
    estimate = next;
    if (converged) break;
  }
  return std::max(0.0, estimate - kPowerShift);
}

double rho_contraction(const Matrix& routing, std::span<const double> rho) {
  if (rho.size() != routing.rows()) throw std::invalid_argument("rho_contraction: length mismatch");
  for (double r : rho)
    if (!(r > 0.0)) throw std::invalid_argument("rho_contraction: rho must have positive components");
  const Vector flow = left_multiply(rho, routing);
  double best = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) best = std::max(best, flow[i] / rho[i]);
  return best;
}

TrafficSolution solve_traffic(const JacksonNetwork& net) {
  const ValidationReport report = validate_network(net);
  if (!report.ok()) throw NetworkError("solve_traffic: invalid network: " + report.violations.front().message);

  const std::size_t d = net.dim();
  const Matrix system = Matrix::identity(d) - net.routing;
  TrafficSolution ts;
  try {
    // nu (Id - P) = lambda  <=>  (Id - P)^T nu^T = lambda^T
    ts.nu = solve(system.transpose(), net.lambda);
    ts.fundamental = inverse(system);
  } catch (const SingularMatrixError&) {
    throw NetworkError("solve_traffic: Id - P is singular, (A1) is violated");
  }

  ts.hitting = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) ts.hitting(j, i) = ts.fundamental(j, i) / ts.fundamental(i, i);
  for (std::size_t i = 0; i < d; ++i) ts.hitting(i, i) = 1.0;

  ts.routing_spectral_radius = routing_spectral_radius(net.routing);
  ts.stable = true;
  for (std::size_t i = 0; i < d; ++i)
    if (!(ts.nu[i] < net.mu[i])) ts.stable = false;

  const Vector routed = left_multiply(ts.nu, net.routing);
  for (std::size_t i = 0; i < d; ++i)
    ts.residual = std::max(ts.residual, std::abs(ts.nu[i] - net.lambda[i] - routed[i]));
  return ts;
}

JacksonNetwork time_reverse(const JacksonNetwork& net, const TrafficSolution& ts) {
  require_stable(ts, "time_reverse");
  const std::size_t d = net.dim();
  JacksonNetwork rev;
  rev.lambda.resize(d);
  rev.mu = net.mu;
  rev.routing = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    rev.lambda[i] = ts.nu[i] * net.exit_probability(i);
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) rev.routing(i, j) = ts.nu[j] * net.routing(j, i) / ts.nu[i];
  }
  return rev;
}

double stationary_probability(const TrafficSolution& ts, const JacksonNetwork& net,
                              std::span<const long> x) {
  require_stable(ts, "stationary_probability");
  if (x.size() != net.dim()) throw std::invalid_argument("stationary_probability: state dimension mismatch");
  double log_p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) throw std::invalid_argument("stationary_probability: negative queue length");
    const double load = ts.nu[i] / net.mu[i];
    log_p += static_cast<double>(x[i]) * std::log(load) + std::log1p(-load);
  }
  return std::exp(log_p);
}

const char* to_string(BranchingKind kind) {
  switch (kind) {
    case BranchingKind::none: return "none";
    case BranchingKind::branching: return "branching";
    case BranchingKind::transposed_branching: return "transposed_branching";
    case BranchingKind::both: return "both";
  }
  return "unknown";
}

BranchingKind detect_branching(const Matrix& routing) {
  auto columns_branch = [](const Matrix& a) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      int positive = 0;
      for (std::size_t j = 0; j < a.rows(); ++j)
        if (a(j, i) > 0.0) ++positive;
      if (positive > 1) return false;
    }
    return true;
  };
  const bool direct = columns_branch(routing);
  const bool transposed = columns_branch(routing.transpose());
  if (direct && transposed) return BranchingKind::both;
  if (direct) return BranchingKind::branching;
  if (transposed) return BranchingKind::transposed_branching;
  return BranchingKind::none;
}

}  // namespace jackson

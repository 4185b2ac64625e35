#include "jackson/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jackson/generator.hpp"
#include "jackson/lp.hpp"

namespace jackson {

namespace {

constexpr double kBisectionTolerance = 1e-12;
constexpr std::size_t kMaxBoxStates = 50'000'000;

void check_gamma(std::span<const double> gamma, std::size_t d) {
  if (gamma.size() != d) throw std::invalid_argument("gamma has the wrong dimension");
  for (double g : gamma)
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("gamma components must be finite and >= 0");
}

void check_rho(const JacksonNetwork& net, std::span<const double> rho) {
  const std::size_t d = net.dim();
  if (rho.size() != d) throw std::invalid_argument("rho has the wrong dimension");
  for (double r : rho)
    if (!(r > 0.0)) throw std::invalid_argument("rho must have positive components");
  const Vector flow = left_multiply(rho, net.routing);
  for (std::size_t i = 0; i < d; ++i)
    if (!(flow[i] < rho[i])) {
      std::ostringstream os;
      os << "rho violates (rho P)_i < rho_i at queue " << i + 1;
      throw std::invalid_argument(os.str());
    }
}

}  // namespace

const char* to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::boundary: return "boundary";
    case Membership::non_member: return "non_member";
  }
  return "unknown";
}

Matrix gamma_arrows(const TrafficSolution& ts, std::span<const double> gamma) {
  const std::size_t d = ts.dim();
  check_gamma(gamma, d);
  Matrix arrows(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) arrows(i, j) = std::log1p(ts.hitting(j, i) * gamma[i]);
  return arrows;
}

GammaCertificate gamma_membership(const TrafficSolution& ts, std::span<const double> gamma) {
  const std::size_t d = ts.dim();
  GammaCertificate cert;
  cert.gamma.assign(gamma.begin(), gamma.end());
  cert.arrows = gamma_arrows(ts, gamma);

  if (d == 1) {
    cert.thetas = {Vector{1.0}};
    cert.slacks = {gamma[0]};
    cert.slack = gamma[0];
    cert.verdict = gamma[0] > kStrictnessTolerance ? Membership::member : Membership::boundary;
    return cert;
  }

  cert.thetas.resize(d);
  cert.slacks.resize(d);
  double worst_lower = std::numeric_limits<double>::infinity();
  double worst_upper = std::numeric_limits<double>::infinity();
  std::optional<ViolatingDirection> worst_direction;

  for (std::size_t i = 0; i < d; ++i) {
    // Rows: candidate dominating queues j != i; columns: coordinates k != i.
    Matrix payoff(d - 1, d - 1);
    for (std::size_t r = 0, j = 0; j < d; ++j) {
      if (j == i) continue;
      for (std::size_t c = 0, k = 0; k < d; ++k) {
        if (k == i) continue;
        payoff(r, c++) = cert.arrows(j, k) - cert.arrows(i, k);
      }
      ++r;
    }
    const GameSolution game = solve_matrix_game(payoff);

    // Certified bracket of the LP optimum from the two strategies.
    double lower = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < d - 1; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < d - 1; ++r) s += game.row_strategy[r] * payoff(r, c);
      lower = std::min(lower, s);
    }
    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < d - 1; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d - 1; ++c) s += payoff(r, c) * game.column_strategy[c];
      upper = std::max(upper, s);
    }

    Vector theta(d, 0.0);
    Vector direction(d, 0.0);
    for (std::size_t r = 0, j = 0; j < d; ++j) {
      if (j == i) continue;
      theta[j] = game.row_strategy[r];
      direction[j] = game.column_strategy[r];
      ++r;
    }
    cert.thetas[i] = std::move(theta);
    cert.slacks[i] = lower;
    worst_lower = std::min(worst_lower, lower);
    if (upper < worst_upper) {
      worst_upper = upper;
      worst_direction = ViolatingDirection{i, std::move(direction)};
    }
  }

  cert.slack = worst_lower;
  if (worst_lower > kStrictnessTolerance) {
    cert.verdict = Membership::member;
  } else {
    cert.verdict = worst_upper < -kStrictnessTolerance ? Membership::non_member : Membership::boundary;
    cert.violation = std::move(worst_direction);
  }
  return cert;
}

double x_rho(double contraction) {
  if (!(contraction >= 0.0 && contraction < 1.0)) throw std::domain_error("x_rho: R(rho) must lie in [0, 1)");
  if (contraction == 0.0) return std::numeric_limits<double>::infinity();
  auto f = [contraction](double x) { return std::log1p(x) - contraction * x; };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  // f > 0 on (0, root) by concavity, so lo = 0 is a valid left end.
  while (hi - lo > kBisectionTolerance * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double theorem2_epsilon_bound(const JacksonNetwork& net, const TrafficSolution& ts,
                              std::span<const double> rho) {
  check_rho(net, rho);
  const double x = x_rho(rho_contraction(net.routing, rho));
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.dim(); ++i) bound = std::min(bound, rho[i] / ts.fundamental(i, i) * x);
  return bound;
}

double lyapunov_epsilon_bound(const JacksonNetwork& net, const TrafficSolution& ts,
                              std::span<const double> rho) {
  double bound = theorem2_epsilon_bound(net, ts, rho);
  for (std::size_t i = 0; i < net.dim(); ++i)
    bound = std::min(bound, rho[i] / ts.fundamental(i, i) * (net.mu[i] / ts.nu[i] - 1.0));
  return bound;
}

Vector theorem2_gamma_vector(const JacksonNetwork& net, const TrafficSolution& ts,
                             std::span<const double> rho, double eps) {
  check_rho(net, rho);
  if (!(eps > 0.0)) throw std::invalid_argument("theorem2_gamma: eps must be positive");
  Vector gamma(net.dim());
  for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = eps * ts.fundamental(i, i) / rho[i];
  return gamma;
}

GammaCertificate theorem2_gamma(const JacksonNetwork& net, const TrafficSolution& ts,
                                std::span<const double> rho, double eps) {
  return gamma_membership(ts, theorem2_gamma_vector(net, ts, rho, eps));
}

LyapunovFunction::LyapunovFunction(Vector gamma, Matrix arrows, double theta_h,
                                   std::optional<RhoEpsProvenance> provenance)
    : gamma_(std::move(gamma)), arrows_(std::move(arrows)), theta_h_(theta_h), provenance_(std::move(provenance)) {}

double LyapunovFunction::operator()(std::span<const long> x) const {
  double h = 0.0;
  for (std::size_t i = 0; i < arrows_.rows(); ++i) h += exp_dot(arrows_.row(i), x);
  return h;
}

double LyapunovFunction::generator(const JacksonNetwork& net, const TrafficSolution& ts,
                                   std::span<const long> x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < arrows_.rows(); ++i)
    acc += exp_generator_rate(ts, net, i, gamma_[i], x) * exp_dot(arrows_.row(i), x);
  return acc;
}

double LyapunovFunction::product_form(const TrafficSolution& ts, std::span<const long> x) const {
  if (!provenance_) throw std::logic_error("product_form: function was not built from (rho, eps)");
  const auto& [rho, eps] = *provenance_;
  double h = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double term = 1.0;
    for (std::size_t j = 0; j < rho.size(); ++j)
      term *= std::pow(1.0 + eps * ts.fundamental(j, i) / rho[i], static_cast<double>(x[j]));
    h += term;
  }
  return h;
}

double drift_rate(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const double> gamma) {
  check_gamma(gamma, net.dim());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gamma.size(); ++i)
    best = std::min(best, gamma[i] / ts.fundamental(i, i) * (net.mu[i] / (1.0 + gamma[i]) - ts.nu[i]));
  return best;
}

LyapunovFunction build_h(const JacksonNetwork& net, const TrafficSolution& ts, const GammaCertificate& cert) {
  if (!cert.in_closure()) throw std::invalid_argument("build_h: gamma is not in the closure of Gamma");
  return LyapunovFunction(cert.gamma, cert.arrows, drift_rate(net, ts, cert.gamma));
}

LyapunovFunction build_h_rho_eps(const JacksonNetwork& net, const TrafficSolution& ts,
                                 std::span<const double> rho, double eps) {
  const GammaCertificate cert = theorem2_gamma(net, ts, rho, eps);
  if (!cert.in_closure()) throw std::invalid_argument("build_h_rho_eps: gamma is not in the closure of Gamma");
  return LyapunovFunction(cert.gamma, cert.arrows, drift_rate(net, ts, cert.gamma),
                          RhoEpsProvenance{Vector(rho.begin(), rho.end()), eps});
}

DriftRegion::DriftRegion(std::size_t dim, long box_cap, double theta)
    : dim_(dim), box_cap_(box_cap), theta_(theta) {}

std::size_t DriftRegion::index_of(std::span<const long> x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) idx = idx * static_cast<std::size_t>(box_cap_ + 1) + static_cast<std::size_t>(x[i]);
  return idx;
}

bool DriftRegion::contains(std::span<const long> x) const {
  if (x.size() != dim_) throw std::invalid_argument("DriftRegion::contains: dimension mismatch");
  for (long v : x)
    if (v < 0 || v > box_cap_) return false;
  return in_region_[index_of(x)];
}

double DriftRegion::tail_bound(const LyapunovFunction& h, std::span<const long> x, double t) const {
  return h(x) * std::exp(-theta_ * t) / c_e_;
}

DriftRegion drift_region(const JacksonNetwork& net, const TrafficSolution& ts, const LyapunovFunction& h,
                         double theta, long box_cap) {
  if (!(theta > 0.0 && theta < h.theta_h())) {
    std::ostringstream os;
    os << "drift_region: theta = " << theta << " must lie in (0, theta_h = " << h.theta_h() << ")";
    throw std::invalid_argument(os.str());
  }
  if (box_cap < 1) throw std::invalid_argument("drift_region: box_cap must be at least 1");

  const std::size_t d = net.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    total *= static_cast<std::size_t>(box_cap + 1);
    if (total > kMaxBoxStates) throw std::invalid_argument("drift_region: box is too large to scan");
  }

  DriftRegion region(d, box_cap, theta);
  region.in_region_.assign(total, false);
  region.c_e_ = std::numeric_limits<double>::infinity();

  const Matrix& arrows = h.arrows();
  State x(d, 0);
  Vector exponents(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    // Scale by the largest exponent so the drift test never overflows.
    for (std::size_t i = 0; i < d; ++i) exponents[i] = dot(arrows.row(i), Vector(x.begin(), x.end()));
    const double top = *std::max_element(exponents.begin(), exponents.end());
    double scaled_h = 0.0;
    double scaled_lh = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double w = std::exp(exponents[i] - top);
      scaled_h += w;
      scaled_lh += exp_generator_rate(ts, net, i, h.gamma()[i], x) * w;
    }
    if (scaled_lh > -theta * scaled_h) {
      region.in_region_[idx] = true;
      region.states_.push_back(x);
      if (std::any_of(x.begin(), x.end(), [box_cap](long v) { return v == box_cap; }))
        region.boundary_clean_ = false;
    } else {
      region.c_e_ = std::min(region.c_e_, std::exp(top) * scaled_h);
    }
    for (std::size_t i = d; i-- > 0;) {
      if (++x[i] <= box_cap) break;
      x[i] = 0;
    }
  }
  return region;
}

}  // namespace jackson

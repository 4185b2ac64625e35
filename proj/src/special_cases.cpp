#include "jackson/special_cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jackson {

namespace {

constexpr double kPatternTolerance = 1e-12;
constexpr double kConditionTolerance = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw NetworkError(what);
}

double margin(double mu, double nu) {
  const double g = std::sqrt(mu) - std::sqrt(nu);
  return g * g;
}

double min_margin_plain(const JacksonNetwork& net, const TrafficSolution& ts) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.dim(); ++i) m = std::min(m, margin(net.mu[i], ts.nu[i]));
  return m;
}

bool close(double a, double b) { return std::abs(a - b) <= kConditionTolerance * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

double exact_d1(const JacksonNetwork& net) {
  require(net.dim() == 1, "exact_d1: network must have exactly one queue");
  require(net.lambda[0] < net.mu[0], "exact_d1: network is not stable");
  return -margin(net.mu[0], net.lambda[0]);
}

double exact_d2(const JacksonNetwork& net, const TrafficSolution& ts) {
  require(net.dim() == 2, "exact_d2: network must have exactly two queues");
  require(ts.stable, "exact_d2: network is not stable");
  const double coupling = 1.0 - net.routing(0, 1) * net.routing(1, 0);
  return -coupling * std::min(margin(net.mu[0], ts.nu[0]), margin(net.mu[1], ts.nu[1]));
}

std::optional<double> branching_bound(const JacksonNetwork& net, const TrafficSolution& ts) {
  require(ts.stable, "branching_bound: network is not stable");
  if (detect_branching(net.routing) == BranchingKind::none) return std::nullopt;
  return lower_bound(net, ts);
}

RayConditions ray_conditions(const JacksonNetwork& net, const TrafficSolution& ts) {
  const std::size_t d = net.dim();
  RayConditions rc;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) min_gap = std::min(min_gap, std::sqrt(net.mu[i]) - std::sqrt(ts.nu[i]));

  for (std::size_t i0 = 0; i0 < d && !rc.holds; ++i0) {
    const double gap = std::sqrt(net.mu[i0]) - std::sqrt(ts.nu[i0]);
    if (!close(gap, min_gap)) continue;
    double cross = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i)
      cross = std::min(cross, net.mu[i] / std::sqrt(net.mu[i0]) - ts.nu[i] / std::sqrt(ts.nu[i0]));
    if (close(cross, gap) || cross > gap) {
      rc.holds = true;
      rc.i0 = i0;
    }
  }

  rc.equal_load_ratios = true;
  const double ratio0 = net.mu[0] / ts.nu[0];
  for (std::size_t i = 1; i < d; ++i)
    if (!close(net.mu[i] / ts.nu[i], ratio0)) rc.equal_load_ratios = false;

  for (std::size_t i0 = 0; i0 < d && !rc.dominant_queue; ++i0) {
    bool dominant = true;
    for (std::size_t i = 0; i < d; ++i)
      if (!(net.mu[i] >= net.mu[i0] || close(net.mu[i], net.mu[i0])) ||
          !(ts.nu[i] <= ts.nu[i0] || close(ts.nu[i], ts.nu[i0])))
        dominant = false;
    rc.dominant_queue = dominant;
  }
  return rc;
}

bool is_symmetric_routing(const Matrix& routing) {
  const std::size_t d = routing.rows();
  if (d < 2 || !routing.square()) return false;
  const double p = routing(0, 1);
  if (!(p > 0.0)) return false;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j && std::abs(routing(i, j) - p) > kPatternTolerance) return false;
  return true;
}

SymmetricProfile symmetric_profile(const JacksonNetwork& net, const TrafficSolution& ts) {
  require(is_symmetric_routing(net.routing), "symmetric_profile: routing is not completely symmetric");
  require(ts.stable, "symmetric_profile: network is not stable");
  SymmetricProfile prof;
  prof.d = net.dim();
  prof.p = net.routing(0, 1);
  const double dd = static_cast<double>(prof.d);
  require(prof.p < 1.0 / (dd - 1.0), "symmetric_profile: p must be below 1/(d-1)");
  prof.q = prof.p / (1.0 - (dd - 2.0) * prof.p);
  prof.g_diag = 1.0 / (1.0 - (dd - 1.0) * prof.p * prof.p / (1.0 - (dd - 2.0) * prof.p));
  prof.m = min_margin_plain(net, ts);

  prof.a.resize(prof.d);
  prof.b.resize(prof.d);
  for (std::size_t i = 0; i < prof.d; ++i) {
    const double mu = net.mu[i];
    const double nu = ts.nu[i];
    const double disc = (mu + nu - prof.m) * (mu + nu - prof.m) - 4.0 * nu * mu;
    if (disc <= 1e-10 * std::max(1.0, 4.0 * nu * mu)) {
      prof.a[i] = prof.b[i] = std::sqrt(mu / nu) - 1.0;
    } else {
      prof.a[i] = (mu - nu - prof.m - std::sqrt(disc)) / (2.0 * nu);
      prof.b[i] = (mu - nu - prof.m + std::sqrt(disc)) / (2.0 * nu);
    }
  }
  prof.a_hat = *std::max_element(prof.a.begin(), prof.a.end());
  prof.gamma_hat.resize(prof.d);
  for (std::size_t i = 0; i < prof.d; ++i) prof.gamma_hat[i] = std::min(prof.b[i], prof.a_hat);
  return prof;
}

double sigma(double q, std::span<const double> gamma) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("sigma: q must lie in (0, 1)");
  double top = -std::numeric_limits<double>::infinity();
  for (double g : gamma) {
    if (!(g > 0.0)) throw std::invalid_argument("sigma: gamma components must be positive");
    top = std::max(top, std::log1p(q * g));
  }
  double s = 0.0;
  for (double g : gamma) s += (top - std::log1p(q * g)) / (std::log1p(g) - std::log1p(q * g));
  return s;
}

bool symmetric_membership(const SymmetricProfile& profile, std::span<const double> gamma) {
  if (gamma.size() != profile.d) throw std::invalid_argument("symmetric_membership: dimension mismatch");
  for (double g : gamma)
    if (!(g > 0.0)) return false;
  return sigma(profile.q, gamma) < 1.0;
}

SymmetricEquality symmetric_equality(const SymmetricProfile& profile, const JacksonNetwork& net,
                                     const TrafficSolution& ts) {
  SymmetricEquality eq;
  eq.gamma_hat = profile.gamma_hat;
  eq.sigma_hat = sigma(profile.q, profile.gamma_hat);
  eq.holds = eq.sigma_hat <= 1.0 + kConditionTolerance;
  eq.shortcut = ray_conditions(net, ts);
  if (eq.holds) eq.exact = -profile.m / profile.g_diag;
  return eq;
}

JacksonNetwork symmetric_network_with_margin(std::size_t d, double p, const Vector& lambda, double t) {
  if (lambda.size() != d) throw std::invalid_argument("symmetric_network_with_margin: lambda has the wrong length");
  JacksonNetwork net;
  net.lambda = lambda;
  net.routing = Matrix(d, d, p);
  for (std::size_t i = 0; i < d; ++i) net.routing(i, i) = 0.0;
  const Vector nu = solve((Matrix::identity(d) - net.routing).transpose(), lambda);
  net.mu.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double root = std::sqrt(nu[i]) + t;
    net.mu[i] = root * root;
  }
  return net;
}

std::optional<CirclePattern> detect_circle(const Matrix& routing) {
  if (routing.rows() != 3 || !routing.square()) return std::nullopt;
  const double p = routing(0, 1);
  const double q = routing(0, 2);
  auto eq = [](double a, double b) { return std::abs(a - b) <= kPatternTolerance; };
  if (!eq(routing(1, 2), p) || !eq(routing(2, 0), p)) return std::nullopt;
  if (!eq(routing(1, 0), q) || !eq(routing(2, 1), q)) return std::nullopt;
  if (!(p > 0.0 && q > 0.0 && p + q < 1.0)) return std::nullopt;
  return CirclePattern{p, q};
}

Matrix circle_fundamental(double p, double q) {
  const double det = 1.0 - p * p * p - q * q * q - 3.0 * p * q;
  const double diag = 1.0 - p * q;
  const double fwd = q * q + p;
  const double back = p * p + q;
  Matrix g = Matrix::from_rows({{diag, fwd, back}, {back, diag, fwd}, {fwd, back, diag}});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) g(i, j) /= det;
  return g;
}

std::pair<double, double> equal_ray_supremum(const JacksonNetwork& net, const TrafficSolution& ts) {
  const std::size_t d = net.dim();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) hi = std::min(hi, net.mu[i] / ts.nu[i] - 1.0);
  require(hi > 0.0, "equal_ray_supremum: network is not stable");
  auto f = [&](double t) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) v = std::min(v, t * (net.mu[i] / (1.0 + t) - ts.nu[i]));
    return v;
  };
  auto golden = [&](double lo, double up) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = up - r * (up - lo);
    double x2 = lo + r * (up - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && up - lo > 1e-14 * std::max(1.0, up); ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + r * (up - lo);
        f2 = f(x2);
      } else {
        up = x2;
        x2 = x1;
        f2 = f1;
        x1 = up - r * (up - lo);
        f1 = f(x1);
      }
    }
    const double t = 0.5 * (lo + up);
    return std::pair{f(t), t};
  };

  auto best = golden(0.0, hi);
  // Each term is concave so the minimum is unimodal; a coarse grid guards the
  // golden-section result anyway.
  double grid_best = -std::numeric_limits<double>::infinity();
  double grid_t = 0.0;
  constexpr int kCoarse = 200;
  for (int k = 1; k < kCoarse; ++k) {
    const double t = hi * k / kCoarse;
    if (const double v = f(t); v > grid_best) {
      grid_best = v;
      grid_t = t;
    }
  }
  if (grid_best > best.first + 1e-12) {
    constexpr int kFine = 100000;
    for (int k = 1; k < kFine; ++k) {
      const double t = hi * k / kFine;
      if (const double v = f(t); v > grid_best) {
        grid_best = v;
        grid_t = t;
      }
    }
    best = {grid_best, grid_t};
  }
  return best;
}

CircleBounds circle_bounds(const JacksonNetwork& net, const TrafficSolution& ts, bool allow_unordered) {
  const auto pattern = detect_circle(net.routing);
  require(pattern.has_value(), "circle_bounds: routing is not a three-node circle");
  if (!allow_unordered && !(pattern->p < pattern->q)) {
    std::ostringstream os;
    os << "circle_bounds: requires p < q (got p = " << pattern->p << ", q = " << pattern->q << ")";
    throw NetworkError(os.str());
  }
  require(ts.stable, "circle_bounds: network is not stable");

  const double p = pattern->p;
  const double q = pattern->q;
  CircleBounds cb;
  cb.pattern = *pattern;
  cb.factor = (1.0 - p * p * p - q * q * q - 3.0 * p * q) / (1.0 - p * q);
  cb.lower = -cb.factor * min_margin_plain(net, ts);
  const auto [sup, t] = equal_ray_supremum(net, ts);
  cb.upper = -cb.factor * sup;
  cb.best_t = t;
  cb.fundamental_error = max_abs_difference(ts.fundamental, circle_fundamental(p, q));
  if (ray_conditions(net, ts).holds) cb.exact = cb.lower;
  return cb;
}

SpecialCase classify_special_case(const JacksonNetwork& net, const TrafficSolution& ts) {
  const std::size_t d = net.dim();
  if (d == 1) return {"d1", exact_d1(net)};
  if (auto b = branching_bound(net, ts)) return {"branching", b};
  if (d == 2) return {"d2", exact_d2(net, ts)};
  if (is_symmetric_routing(net.routing) && net.routing(0, 1) < 1.0 / (static_cast<double>(d) - 1.0)) {
    const SymmetricProfile prof = symmetric_profile(net, ts);
    return {"symmetric", symmetric_equality(prof, net, ts).exact};
  }
  if (auto circle = detect_circle(net.routing); circle && circle->p < circle->q)
    return {"circle", circle_bounds(net, ts).exact};
  return {"none", std::nullopt};
}

SpectralBoundsReport analyze_spectrum(const JacksonNetwork& net, const TrafficSolution& ts,
                                      const OptimizerOptions& options) {
  SpectralBoundsReport report = compute_bounds(net, ts, options);
  const SpecialCase sc = classify_special_case(net, ts);
  report.exact = sc.exact;
  report.exact_provenance = sc.tag;
  return report;
}

}  // namespace jackson

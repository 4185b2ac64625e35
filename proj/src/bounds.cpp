#include "jackson/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "nelder_mead.hpp"

namespace jackson {

namespace {

constexpr double kDiscriminantTolerance = 1e-10;
constexpr int kProjectionSteps = 30;

void require_stable(const TrafficSolution& ts, const char* op) {
  if (!ts.stable) throw NetworkError(std::string(op) + ": network is not stable");
}

double min_margin(const JacksonNetwork& net, const TrafficSolution& ts) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.dim(); ++i) {
    const double gap = std::sqrt(net.mu[i]) - std::sqrt(ts.nu[i]);
    m = std::min(m, gap * gap / ts.fundamental(i, i));
  }
  return m;
}

/// Independent stream per restart so results do not depend on restart order.
std::mt19937_64 restart_stream(std::uint64_t seed, std::uint64_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), static_cast<std::uint32_t>(restart >> 32)};
  return std::mt19937_64(seq);
}

Vector uniform_beta_rho(const TrafficSolution& ts, const Vector& beta) { return left_multiply(beta, ts.fundamental); }

Vector softmax_with_pinned_last(std::span<const double> logits, std::size_t d) {
  Vector beta(d, 0.0);
  double top = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) top = std::max(top, logits[i]);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    beta[i] = std::exp((i + 1 < d ? logits[i] : 0.0) - top);
    total += beta[i];
  }
  for (double& b : beta) b /= total;
  return beta;
}

double logistic(double w) { return 1.0 / (1.0 + std::exp(-w)); }

}  // namespace

double objective(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const double> gamma) {
  return drift_rate(net, ts, gamma);
}

Vector gamma_star(const JacksonNetwork& net, const TrafficSolution& ts) {
  Vector g(net.dim());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sqrt(net.mu[i] / ts.nu[i]) - 1.0;
  return g;
}

double lower_bound(const JacksonNetwork& net, const TrafficSolution& ts) {
  require_stable(ts, "lower_bound");
  return -min_margin(net, ts);
}

double rho_eps_objective(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const double> rho,
                         double eps) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.dim(); ++i)
    best = std::min(best, net.mu[i] / (rho[i] + eps * ts.fundamental(i, i)) - ts.nu[i] / rho[i]);
  return eps * best;
}

GammaBound upper_bound_gamma(const JacksonNetwork& net, const TrafficSolution& ts, const OptimizerOptions& options,
                             const std::vector<Vector>& extra_starts) {
  require_stable(ts, "upper_bound_gamma");
  const std::size_t d = net.dim();
  std::size_t evaluations = 0;

  // Anchor: a rho/eps point, in Gamma by construction.
  const Vector uniform(d, 1.0 / static_cast<double>(d));
  const Vector anchor_rho = uniform_beta_rho(ts, uniform);
  const Vector anchor = theorem2_gamma_vector(net, ts, anchor_rho, 0.5 * lyapunov_epsilon_bound(net, ts, anchor_rho));
  if (!gamma_membership(ts, anchor).in_closure())
    throw std::runtime_error("upper_bound_gamma: no feasible starting point (membership LP rejects the rho/eps anchor)");

  GammaBound best;
  best.gamma = anchor;
  best.value = -objective(net, ts, anchor);
  best.verdict = Membership::member;

  auto clamp_nonneg = [](Vector g) {
    for (double& x : g) x = std::max(0.0, x);
    return g;
  };

  // Returns the feasible point used and its objective.
  auto feasible_eval = [&](const Vector& raw, const Vector& fallback) -> std::pair<Vector, Membership> {
    Vector g = clamp_nonneg(raw);
    ++evaluations;
    const GammaCertificate cert = gamma_membership(ts, g);
    if (cert.in_closure()) return {g, cert.verdict};
    // Pull back along the segment towards the fallback until feasible.
    double lo = 0.0;
    double hi = 1.0;
    Membership lo_verdict = Membership::member;
    for (int step = 0; step < kProjectionSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      Vector trial(d);
      for (std::size_t i = 0; i < d; ++i) trial[i] = fallback[i] + mid * (g[i] - fallback[i]);
      ++evaluations;
      const GammaCertificate c = gamma_membership(ts, trial);
      if (c.in_closure()) {
        lo = mid;
        lo_verdict = c.verdict;
      } else {
        hi = mid;
      }
    }
    Vector out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = fallback[i] + lo * (g[i] - fallback[i]);
    if (lo == 0.0) lo_verdict = gamma_membership(ts, fallback).verdict;
    return {out, lo_verdict};
  };

  std::vector<Vector> starts;
  starts.push_back(clamp_nonneg(gamma_star(net, ts)));
  {
    const Vector gs = gamma_star(net, ts);
    double mean = 0.0;
    for (double g : gs) mean += g / static_cast<double>(d);
    starts.push_back(Vector(d, std::max(mean, 1e-6)));
    starts.push_back(Vector(d, std::max(*std::min_element(gs.begin(), gs.end()), 1e-6)));
  }
  starts.push_back(anchor);
  for (const Vector& s : extra_starts) starts.push_back(s);
  for (std::size_t r = 0; starts.size() < std::max<std::size_t>(options.starts, 1); ++r) {
    auto rng = restart_stream(options.seed, r);
    std::exponential_distribution<double> expo(1.0);
    Vector beta(d);
    double total = 0.0;
    for (double& b : beta) total += (b = expo(rng));
    for (double& b : beta) b /= total;
    const Vector rho = uniform_beta_rho(ts, beta);
    std::uniform_real_distribution<double> frac(0.2, 0.9);
    starts.push_back(theorem2_gamma_vector(net, ts, rho, frac(rng) * lyapunov_epsilon_bound(net, ts, rho)));
  }

  const std::size_t per_start = std::max<std::size_t>(options.budget / starts.size(), d + 2);
  for (const Vector& start : starts) {
    auto [first_point, first_verdict] = feasible_eval(start, best.gamma);
    Vector incumbent = first_point;
    double incumbent_value = -objective(net, ts, incumbent);
    Membership incumbent_verdict = first_verdict;

    detail::Evaluator eval = [&](const Vector& x) {
      auto [point, verdict] = feasible_eval(x, incumbent);
      const double value = -objective(net, ts, point);
      if (value < incumbent_value) {
        incumbent = point;
        incumbent_value = value;
        incumbent_verdict = verdict;
      }
      return detail::Evaluated{point, value};
    };
    Vector steps(d);
    for (std::size_t i = 0; i < d; ++i) steps[i] = 0.1 * std::max(first_point[i], 0.1);
    detail::nelder_mead(eval, first_point, steps, per_start);

    if (incumbent_value < best.value) {
      best.value = incumbent_value;
      best.gamma = incumbent;
      best.verdict = incumbent_verdict;
    }
  }
  best.evaluations = evaluations;
  return best;
}

RhoEpsBound upper_bound_rho_eps(const JacksonNetwork& net, const TrafficSolution& ts,
                                const OptimizerOptions& options) {
  require_stable(ts, "upper_bound_rho_eps");
  const std::size_t d = net.dim();
  std::size_t evaluations = 0;

  // Parameters: d-1 softmax logits for beta, one logit for eps / eps_max.
  struct Decoded {
    Vector rho;
    double eps;
  };
  auto decode = [&](const Vector& params) {
    const Vector beta = softmax_with_pinned_last(std::span<const double>(params.data(), d - 1), d);
    Vector rho = uniform_beta_rho(ts, beta);
    const double eps = logistic(params[d - 1]) * lyapunov_epsilon_bound(net, ts, rho);
    return Decoded{std::move(rho), eps};
  };

  RhoEpsBound best;
  best.value = 0.0;
  const std::size_t starts = std::max<std::size_t>(options.starts, 1);
  const std::size_t per_start = std::max<std::size_t>(options.budget / starts, d + 2);
  for (std::size_t r = 0; r < starts; ++r) {
    Vector start(d, 0.0);
    if (r > 0) {
      auto rng = restart_stream(options.seed ^ 0x9e3779b97f4a7c15ULL, r);
      std::normal_distribution<double> logit(0.0, 1.0);
      for (double& p : start) p = logit(rng);
    }
    detail::Evaluator eval = [&](const Vector& params) {
      ++evaluations;
      const Decoded dec = decode(params);
      const double value = -rho_eps_objective(net, ts, dec.rho, dec.eps);
      if (value < best.value || best.rho.empty()) {
        best.value = value;
        best.rho = dec.rho;
        best.eps = dec.eps;
      }
      return detail::Evaluated{params, value};
    };
    detail::nelder_mead(eval, start, Vector(d, 0.5), per_start);
  }
  best.evaluations = evaluations;
  return best;
}

std::vector<DeltaInterval> delta_intervals(const JacksonNetwork& net, const TrafficSolution& ts) {
  require_stable(ts, "delta_intervals");
  const double m_g = min_margin(net, ts);
  std::vector<DeltaInterval> out;
  for (std::size_t i = 0; i < net.dim(); ++i) {
    const double mu = net.mu[i];
    const double nu = ts.nu[i];
    const double m = m_g * ts.fundamental(i, i);
    const double star = std::sqrt(mu / nu) - 1.0;
    double disc = (mu + nu - m) * (mu + nu - m) - 4.0 * nu * mu;
    DeltaInterval iv;
    iv.index = i;
    if (disc <= kDiscriminantTolerance * std::max(1.0, 4.0 * nu * mu)) {
      iv.degenerate = true;
      iv.lower = iv.upper = star;
    } else {
      const double root = std::sqrt(disc);
      iv.lower = (mu - nu - m - root) / (2.0 * nu);
      iv.upper = (mu - nu - m + root) / (2.0 * nu);
    }
    iv.contains_gamma_star = iv.lower <= star + 1e-12 && star <= iv.upper + 1e-12;
    out.push_back(iv);
  }
  return out;
}

EqualityDiagnosis equality_diagnostic(const JacksonNetwork& net, const TrafficSolution& ts,
                                      const OptimizerOptions& options) {
  EqualityDiagnosis diag;
  diag.intervals = delta_intervals(net, ts);
  const std::size_t d = net.dim();
  std::size_t used = 0;
  const std::size_t budget = std::max<std::size_t>(options.budget, 16);

  auto try_point = [&](const Vector& g) -> std::optional<double> {
    ++used;
    const GammaCertificate cert = gamma_membership(ts, g);
    if (cert.in_closure()) {
      diag.equality = true;
      diag.witness = g;
      return std::nullopt;
    }
    return cert.slack;
  };

  // gamma-hat: largest lower end, clipped to each interval.
  double a_hat = 0.0;
  for (const auto& iv : diag.intervals) a_hat = std::max(a_hat, iv.lower);
  Vector g_hat(d), g_star(d);
  for (std::size_t i = 0; i < d; ++i) {
    g_hat[i] = std::min(diag.intervals[i].upper, a_hat);
    g_star[i] = std::clamp(std::sqrt(net.mu[i] / ts.nu[i]) - 1.0, diag.intervals[i].lower, diag.intervals[i].upper);
  }
  if (!try_point(g_hat) || !try_point(g_star)) return diag;

  // Grid over the box.
  std::size_t free_dims = 0;
  for (const auto& iv : diag.intervals)
    if (iv.upper > iv.lower) ++free_dims;
  if (free_dims == 0) return diag;
  std::size_t per_dim = 2;
  while (std::pow(static_cast<double>(per_dim + 1), static_cast<double>(free_dims)) <= static_cast<double>(budget) / 2.0)
    ++per_dim;

  Vector best_point = g_hat;
  double best_slack = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> counter(d, 0);
  auto grid_value = [&](std::size_t i, std::size_t k) {
    const auto& iv = diag.intervals[i];
    if (iv.upper <= iv.lower) return iv.lower;
    return iv.lower + (iv.upper - iv.lower) * static_cast<double>(k) / static_cast<double>(per_dim - 1);
  };
  while (true) {
    Vector g(d);
    for (std::size_t i = 0; i < d; ++i) g[i] = grid_value(i, counter[i]);
    const auto slack = try_point(g);
    if (!slack) return diag;
    if (*slack > best_slack) {
      best_slack = *slack;
      best_point = g;
    }
    std::size_t i = d;
    while (i-- > 0) {
      const auto& iv = diag.intervals[i];
      const std::size_t limit = iv.upper > iv.lower ? per_dim : 1;
      if (++counter[i] < limit) break;
      counter[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }

  // Compass search on the slack inside the box.
  Vector step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = (diag.intervals[i].upper - diag.intervals[i].lower) / 4.0;
  while (used < budget) {
    bool improved = false;
    for (std::size_t i = 0; i < d && used < budget; ++i) {
      if (step[i] <= 0.0) continue;
      for (double sign : {1.0, -1.0}) {
        Vector g = best_point;
        g[i] = std::clamp(g[i] + sign * step[i], diag.intervals[i].lower, diag.intervals[i].upper);
        const auto slack = try_point(g);
        if (!slack) return diag;
        if (*slack > best_slack) {
          best_slack = *slack;
          best_point = g;
          improved = true;
        }
      }
    }
    if (!improved) {
      double largest = 0.0;
      for (double& s : step) largest = std::max(largest, s *= 0.5);
      if (largest < 1e-12) break;
    }
  }
  return diag;
}

SpectralBoundsReport compute_bounds(const JacksonNetwork& net, const TrafficSolution& ts,
                                    const OptimizerOptions& options) {
  SpectralBoundsReport report;
  report.lower = lower_bound(net, ts);
  report.upper_rho_eps = upper_bound_rho_eps(net, ts, options);
  std::vector<Vector> extra;
  if (!report.upper_rho_eps.rho.empty())
    extra.push_back(theorem2_gamma_vector(net, ts, report.upper_rho_eps.rho, report.upper_rho_eps.eps));
  report.upper_gamma = upper_bound_gamma(net, ts, options, extra);
  report.equality = equality_diagnostic(net, ts, options);
  return report;
}

}  // namespace jackson

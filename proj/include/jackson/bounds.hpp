#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jackson/lyapunov.hpp"
#include "jackson/network.hpp"

namespace jackson {

/// min_i (gamma_i / G_ii) (mu_i / (1 + gamma_i) - nu_i).
double objective(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const double> gamma);

/// Per-queue maximizer sqrt(mu_i / nu_i) - 1 of the objective term.
Vector gamma_star(const JacksonNetwork& net, const TrafficSolution& ts);

/// Lower bound -min_i (sqrt(mu_i) - sqrt(nu_i))^2 / G_ii on log r_e*.
double lower_bound(const JacksonNetwork& net, const TrafficSolution& ts);

struct OptimizerOptions {
  std::size_t budget = 5000;  // objective evaluations per optimizer
  std::size_t starts = 8;
  std::uint64_t seed = 0;
};

struct GammaBound {
  double value = 0.0;  // upper bound on log r_e*
  Vector gamma;
  Membership verdict = Membership::member;
  std::size_t evaluations = 0;
};

/// Upper bound -sup objective(gamma) over the closure of Gamma, by multi-start
/// Nelder-Mead with the membership LP as feasibility oracle. Infeasible
/// trial points are pulled back towards the best feasible point. Extra
/// feasible starting points may be supplied (e.g. the rho/eps optimum).
GammaBound upper_bound_gamma(const JacksonNetwork& net, const TrafficSolution& ts,
                             const OptimizerOptions& options = {},
                             const std::vector<Vector>& extra_starts = {});

struct RhoEpsBound {
  double value = 0.0;  // upper bound on log r_e*
  Vector rho;
  double eps = 0.0;
  std::size_t evaluations = 0;
};

/// eps min_i (mu_i / (rho_i + eps G_ii) - nu_i / rho_i).
double rho_eps_objective(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const double> rho,
                         double eps);

/// Upper bound over (rho, eps) with rho = beta G for beta in the open simplex
/// and eps inside the Lyapunov epsilon range, by multi-start Nelder-Mead.
RhoEpsBound upper_bound_rho_eps(const JacksonNetwork& net, const TrafficSolution& ts,
                                const OptimizerOptions& options = {});

struct DeltaInterval {
  std::size_t index = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool contains_gamma_star = true;
  bool degenerate = false;
};

/// Delta_i = {g >= 0 : (g / G_ii)(mu_i / (1 + g) - nu_i) >= m_G}, with
/// m_G = min_j (sqrt(mu_j) - sqrt(nu_j))^2 / G_jj, as closed intervals from
/// the roots of nu g^2 - (mu - nu - m) g + m = 0 where m = m_G G_ii.
std::vector<DeltaInterval> delta_intervals(const JacksonNetwork& net, const TrafficSolution& ts);

struct EqualityDiagnosis {
  bool equality = false;  // false is inconclusive, not a proof of strict inequality
  std::vector<DeltaInterval> intervals;
  std::optional<Vector> witness;
};

/// Searches the box prod_i Delta_i for a point in the closure of Gamma. Such a
/// point makes the lower and upper bounds coincide.
EqualityDiagnosis equality_diagnostic(const JacksonNetwork& net, const TrafficSolution& ts,
                                      const OptimizerOptions& options = {});

struct SpectralBoundsReport {
  double lower = 0.0;
  GammaBound upper_gamma;
  RhoEpsBound upper_rho_eps;
  std::optional<double> exact;
  std::string exact_provenance;  // special-case tag when `exact` is set
  EqualityDiagnosis equality;
};

/// Lower bound, both upper bounds and the equality diagnostic. The gamma
/// optimizer is seeded with the rho/eps optimum so that its value is never
/// worse. Special-case closed forms are attached by analyze_spectrum.
SpectralBoundsReport compute_bounds(const JacksonNetwork& net, const TrafficSolution& ts,
                                    const OptimizerOptions& options = {});

}  // namespace jackson

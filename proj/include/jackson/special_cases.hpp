#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "jackson/bounds.hpp"
#include "jackson/matrix.hpp"
#include "jackson/network.hpp"

namespace jackson {

/// log r_e* = -(sqrt(mu) - sqrt(lambda))^2 for a single queue.
double exact_d1(const JacksonNetwork& net);

/// log r_e* = -(1 - p12 p21) min_i (sqrt(mu_i) - sqrt(nu_i))^2 for two queues.
double exact_d2(const JacksonNetwork& net, const TrafficSolution& ts);

/// When P or its transpose is branching, log r_e* equals the lower bound
/// -min_i (sqrt(mu_i) - sqrt(nu_i))^2 / G_ii (G of the original network).
std::optional<double> branching_bound(const JacksonNetwork& net, const TrafficSolution& ts);

/// Sufficient conditions for the lower bound to be attained along the
/// equal-component ray.
struct RayConditions {
  bool holds = false;  // some i0 satisfies both the margin and the cross condition
  std::optional<std::size_t> i0;
  bool equal_load_ratios = false;  // (i): mu_i / nu_i constant
  bool dominant_queue = false;     // (ii): some i0 has mu_i >= mu_i0 and nu_i <= nu_i0
};

RayConditions ray_conditions(const JacksonNetwork& net, const TrafficSolution& ts);

/// Completely symmetric routing p_ij = p for i != j.
struct SymmetricProfile {
  std::size_t d = 0;
  double p = 0.0;
  double q = 0.0;       // p / (1 - (d-2) p), the off-diagonal hitting probability
  double g_diag = 0.0;  // (1 - (d-1) p^2 / (1 - (d-2) p))^{-1}
  double m = 0.0;       // min_i (sqrt(mu_i) - sqrt(nu_i))^2
  Vector a;
  Vector b;
  double a_hat = 0.0;
  Vector gamma_hat;
};

bool is_symmetric_routing(const Matrix& routing);

/// Throws NetworkError for non-symmetric routing or an unstable network.
SymmetricProfile symmetric_profile(const JacksonNetwork& net, const TrafficSolution& ts);

/// sum_j (max_i log(1 + q g_i) - log(1 + q g_j)) / (log(1 + g_j) - log(1 + q g_j)).
double sigma(double q, std::span<const double> gamma);
inline double sigma(const SymmetricProfile& profile, std::span<const double> gamma) {
  return sigma(profile.q, gamma);
}

/// gamma in Gamma iff gamma > 0 componentwise and sigma(gamma) < 1.
bool symmetric_membership(const SymmetricProfile& profile, std::span<const double> gamma);

struct SymmetricEquality {
  bool holds = false;  // sigma(gamma-hat) <= 1
  Vector gamma_hat;
  double sigma_hat = 0.0;
  std::optional<double> exact;
  RayConditions shortcut;
};

SymmetricEquality symmetric_equality(const SymmetricProfile& profile, const JacksonNetwork& net,
                                     const TrafficSolution& ts);

/// Symmetric network with margin sqrt(mu_i) - sqrt(nu_i) = t at every queue:
/// nu is solved from (lambda, p) first and mu_i = (sqrt(nu_i) + t)^2.
JacksonNetwork symmetric_network_with_margin(std::size_t d, double p, const Vector& lambda, double t);

struct CirclePattern {
  double p = 0.0;
  double q = 0.0;
};

/// Matches P = [[0,p,q],[q,0,p],[p,q,0]] with p + q < 1 (entries compared to
/// 1e-12). Only the stated labelling is tried; relabelings are not searched.
std::optional<CirclePattern> detect_circle(const Matrix& routing);

/// (1 / (1 - p^3 - q^3 - 3pq)) [[1-pq, q^2+p, p^2+q], [p^2+q, 1-pq, q^2+p], [q^2+p, p^2+q, 1-pq]].
Matrix circle_fundamental(double p, double q);

struct CircleBounds {
  CirclePattern pattern;
  double factor = 0.0;  // (1 - p^3 - q^3 - 3pq) / (1 - pq)
  double lower = 0.0;
  double upper = 0.0;
  double best_t = 0.0;
  std::optional<double> exact;
  double fundamental_error = 0.0;  // max |G - closed form|
};

/// Requires 0 < p < q unless `allow_unordered` is set (the ordering is a
/// hypothesis of the closed form; p >= q proceeds at the caller's risk).
CircleBounds circle_bounds(const JacksonNetwork& net, const TrafficSolution& ts, bool allow_unordered = false);

/// sup_{t > 0} min_i t (mu_i / (1 + t) - nu_i) and its argmax, by golden
/// section on (0, min_i mu_i/nu_i - 1) checked against a coarse grid.
std::pair<double, double> equal_ray_supremum(const JacksonNetwork& net, const TrafficSolution& ts);

/// Closed-form result attached to a bounds report.
struct SpecialCase {
  std::string tag;  // "d1", "d2", "branching", "symmetric", "circle" or "none"
  std::optional<double> exact;
};

/// Picks the first closed form that applies, in the order d1, branching, d2,
/// symmetric, circle.
SpecialCase classify_special_case(const JacksonNetwork& net, const TrafficSolution& ts);

/// compute_bounds plus the special-case dispatch.
SpectralBoundsReport analyze_spectrum(const JacksonNetwork& net, const TrafficSolution& ts,
                                      const OptimizerOptions& options = {});

}  // namespace jackson

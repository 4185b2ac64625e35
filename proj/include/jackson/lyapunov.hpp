#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jackson/matrix.hpp"
#include "jackson/network.hpp"

namespace jackson {

/// Slack below which a strict inequality of the Gamma definition is not
/// considered to hold.
inline constexpr double kStrictnessTolerance = 1e-9;

enum class Membership { member, boundary, non_member };

const char* to_string(Membership m);

/// Direction v >= 0 with v_i = 0 and |v|_1 = 1 along which row i of the arrow
/// matrix is not strictly dominated: arrows_i . v >= max_{j != i} arrows_j . v - slack.
struct ViolatingDirection {
  std::size_t index = 0;
  Vector direction;
};

struct GammaCertificate {
  Vector gamma;
  /// Row i is the vector gamma_i-arrow: arrows(i, j) = log(1 + Q_ji gamma_i).
  Matrix arrows;
  Membership verdict = Membership::non_member;
  /// Per-queue mixing weights theta_i from the LP, with theta_i^i = 0.
  std::vector<Vector> thetas;
  /// Per-queue certified slack min_{k != i} (sum_j theta_i^j arrows_j - arrows_i)_k.
  Vector slacks;
  double slack = 0.0;
  std::optional<ViolatingDirection> violation;

  bool in_closure() const { return verdict != Membership::non_member; }
};

/// arrows(i, j) = log(1 + Q_ji gamma_i). Throws on negative gamma.
Matrix gamma_arrows(const TrafficSolution& ts, std::span<const double> gamma);

/// Decides gamma in Gamma with one small LP per queue.
///
/// For queue i the LP maximizes s over theta in the simplex of the other
/// queues subject to sum_j theta^j arrows_j - arrows_i >= s on every
/// coordinate k != i. By the minimax theorem the optimum is positive exactly
/// when arrows_i . v < max_j arrows_j . v for every nonzero v >= 0 with
/// v_i = 0. Restricting theta to j != i keeps the optimum signed, which is
/// what separates the closure (s = 0) from the exterior (s < 0).
///
/// For d = 1 there is no constraint; gamma > 0 is a member and gamma = 0 is
/// on the boundary.
GammaCertificate gamma_membership(const TrafficSolution& ts, std::span<const double> gamma);

/// x_rho = sup{x > 0 : log(1 + x) >= R x}, the positive root for R in (0, 1)
/// and +infinity for R = 0.
double x_rho(double contraction);

/// Upper end of the epsilon range min_i rho_i x_rho / G_ii for which
/// gamma_i = eps G_ii / rho_i is guaranteed to lie in Gamma.
double theorem2_epsilon_bound(const JacksonNetwork& net, const TrafficSolution& ts,
                              std::span<const double> rho);

/// Sufficient epsilon range for h_{eps,rho} to be a multiplicative Lyapunov
/// function: the previous bound capped by min_i rho_i (mu_i/nu_i - 1) / G_ii.
double lyapunov_epsilon_bound(const JacksonNetwork& net, const TrafficSolution& ts,
                              std::span<const double> rho);

/// gamma_i = eps G_ii / rho_i. Requires (rho P)_i < rho_i for every i.
Vector theorem2_gamma_vector(const JacksonNetwork& net, const TrafficSolution& ts,
                             std::span<const double> rho, double eps);

GammaCertificate theorem2_gamma(const JacksonNetwork& net, const TrafficSolution& ts,
                                std::span<const double> rho, double eps);

struct RhoEpsProvenance {
  Vector rho;
  double eps = 0.0;
};

/// h(x) = sum_i exp(arrows_i . x) together with its asymptotic drift rate.
class LyapunovFunction {
 public:
  LyapunovFunction(Vector gamma, Matrix arrows, double theta_h,
                   std::optional<RhoEpsProvenance> provenance = std::nullopt);

  double operator()(std::span<const long> x) const;
  /// Exact generator applied to h, as the sum of the closed-form exponential
  /// rates of each term.
  double generator(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const long> x) const;
  /// sum_i prod_j (1 + eps G_ji / rho_i)^{x_j}; only for rho/eps provenance.
  double product_form(const TrafficSolution& ts, std::span<const long> x) const;

  const Vector& gamma() const { return gamma_; }
  const Matrix& arrows() const { return arrows_; }
  double theta_h() const { return theta_h_; }
  bool is_multiplicative() const { return theta_h_ > 0.0; }
  const std::optional<RhoEpsProvenance>& provenance() const { return provenance_; }

 private:
  Vector gamma_;
  Matrix arrows_;
  double theta_h_;
  std::optional<RhoEpsProvenance> provenance_;
};

/// theta_h = min_i (gamma_i / G_ii) (mu_i / (1 + gamma_i) - nu_i).
double drift_rate(const JacksonNetwork& net, const TrafficSolution& ts, std::span<const double> gamma);

/// Builds h_gamma from a certificate in the closure of Gamma (boundary
/// certificates are accepted as limits of members).
LyapunovFunction build_h(const JacksonNetwork& net, const TrafficSolution& ts, const GammaCertificate& cert);

/// h_{eps,rho} built from the gamma of theorem2_gamma.
LyapunovFunction build_h_rho_eps(const JacksonNetwork& net, const TrafficSolution& ts,
                                 std::span<const double> rho, double eps);

/// States of the box [0, box_cap]^d where L h > -theta h, and the constants
/// of the hitting-time tail bound P_x(tau_E > t) <= h(x) e^{-theta t} / c_E.
class DriftRegion {
 public:
  DriftRegion(std::size_t dim, long box_cap, double theta);

  std::size_t dim() const { return dim_; }
  long box_cap() const { return box_cap_; }
  double theta() const { return theta_; }
  double c_e() const { return c_e_; }
  bool boundary_clean() const { return boundary_clean_; }
  const std::vector<State>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }

  /// Membership in E. States outside the box are never in E.
  bool contains(std::span<const long> x) const;
  double tail_bound(const LyapunovFunction& h, std::span<const long> x, double t) const;

 private:
  friend DriftRegion drift_region(const JacksonNetwork&, const TrafficSolution&, const LyapunovFunction&,
                                  double, long);
  std::size_t index_of(std::span<const long> x) const;

  std::size_t dim_;
  long box_cap_;
  double theta_;
  double c_e_ = 0.0;
  bool boundary_clean_ = true;
  std::vector<State> states_;
  std::vector<bool> in_region_;
};

/// Scans the box. c_E is the minimum of h over the box outside E; since h is
/// coordinatewise nondecreasing this bounds h from below on the whole
/// complement of E as long as the outer shell of the box is free of E
/// (boundary_clean). Requires 0 < theta < theta_h and box_cap >= 1.
DriftRegion drift_region(const JacksonNetwork& net, const TrafficSolution& ts, const LyapunovFunction& h,
                         double theta, long box_cap);

}  // namespace jackson

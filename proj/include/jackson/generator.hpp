#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jackson/network.hpp"

namespace jackson {

/// Black-box function on Z_+^d. The generator evaluates it on a state and on
/// its one-jump neighbours only.
using StateFunction = std::function<double(std::span<const long>)>;

/// Indices of strictly positive coordinates of a state.
class FaceSet {
 public:
  explicit FaceSet(std::size_t d) : members_(d, false) {}
  static FaceSet of_state(std::span<const long> x);
  static FaceSet full(std::size_t d);

  std::size_t dim() const { return members_.size(); }
  bool contains(std::size_t i) const { return members_[i]; }
  void insert(std::size_t i) { members_[i] = true; }
  void erase(std::size_t i) { members_[i] = false; }

 private:
  std::vector<bool> members_;
};

/// Raised when alpha . x would exceed the exponent guard.
class ExponentOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// exp(alpha . x), refusing exponents above 700.
double exp_dot(std::span<const double> alpha, std::span<const long> x);

/// Lf(x) = sum_z q(x, z) (f(z) - f(x)), summed over the feasible jumps:
/// arrivals x + e_j, service moves x - e_i + e_j and departures x - e_i
/// (the latter two only when x_i > 0).
double apply_generator(const JacksonNetwork& net, const StateFunction& f, std::span<const long> x);

/// Laplace transform of the jump distribution on face `face`.
double face_laplace(const JacksonNetwork& net, const FaceSet& face, std::span<const double> alpha);

/// Solution of e^{alpha_i} = 1 + s, e^{alpha_j} = sum_k p_jk e^{alpha_k} + p_j0
/// (j != i): alpha_j = log(1 + Q_ji s). Requires s > -1.
Vector solve_face_system(const TrafficSolution& ts, std::size_t i, double s);

/// Closed-form rate c with L f_i = c f_i for f_i(x) = exp(gamma_i-arrow . x):
/// (gamma_i / G_ii) (nu_i - 1{x_i > 0} mu_i / (1 + gamma_i)).
double exp_generator_rate(const TrafficSolution& ts, const JacksonNetwork& net, std::size_t i,
                          double gamma_i, std::span<const long> x);

}  // namespace jackson

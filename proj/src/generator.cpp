#include "jackson/generator.hpp"

#include <cmath>
#include <sstream>

namespace jackson {

namespace {

constexpr double kExponentGuard = 700.0;

void check_state(std::span<const long> x, std::size_t d) {
  if (x.size() != d) throw std::invalid_argument("state dimension does not match the network");
  for (long v : x)
    if (v < 0) throw std::invalid_argument("state has a negative coordinate");
}

}  // namespace

FaceSet FaceSet::of_state(std::span<const long> x) {
  FaceSet face(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0) face.insert(i);
  return face;
}

FaceSet FaceSet::full(std::size_t d) {
  FaceSet face(d);
  for (std::size_t i = 0; i < d; ++i) face.insert(i);
  return face;
}

double exp_dot(std::span<const double> alpha, std::span<const long> x) {
  if (alpha.size() != x.size()) throw std::invalid_argument("exp_dot: length mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) e += alpha[i] * static_cast<double>(x[i]);
  if (e > kExponentGuard) {
    std::ostringstream os;
    os << "exponent " << e << " exceeds the overflow guard " << kExponentGuard;
    throw ExponentOverflow(os.str());
  }
  return std::exp(e);
}

double apply_generator(const JacksonNetwork& net, const StateFunction& f, std::span<const long> x) {
  const std::size_t d = net.dim();
  check_state(x, d);
  State y(x.begin(), x.end());
  const double fx = f(y);
  double acc = 0.0;

  for (std::size_t j = 0; j < d; ++j) {
    if (net.lambda[j] == 0.0) continue;
    ++y[j];
    acc += net.lambda[j] * (f(y) - fx);
    --y[j];
  }

  for (std::size_t i = 0; i < d; ++i) {
    if (x[i] == 0) continue;
    --y[i];
    for (std::size_t j = 0; j < d; ++j) {
      const double p = net.routing(i, j);
      if (p == 0.0 || j == i) continue;
      ++y[j];
      acc += net.mu[i] * p * (f(y) - fx);
      --y[j];
    }
    const double exit = net.exit_probability(i);
    if (exit > 0.0) acc += net.mu[i] * exit * (f(y) - fx);
    ++y[i];
  }
  return acc;
}

double face_laplace(const JacksonNetwork& net, const FaceSet& face, std::span<const double> alpha) {
  const std::size_t d = net.dim();
  if (alpha.size() != d || face.dim() != d) throw std::invalid_argument("face_laplace: dimension mismatch");
  double r = 0.0;
  for (std::size_t j = 0; j < d; ++j) r += net.lambda[j] * std::expm1(alpha[j]);
  for (std::size_t j = 0; j < d; ++j) {
    if (!face.contains(j)) continue;
    double moved = net.exit_probability(j) * std::exp(-alpha[j]);
    for (std::size_t k = 0; k < d; ++k) moved += net.routing(j, k) * std::exp(alpha[k] - alpha[j]);
    r += net.mu[j] * (moved - 1.0);
  }
  return r;
}

Vector solve_face_system(const TrafficSolution& ts, std::size_t i, double s) {
  if (!(s > -1.0)) throw std::domain_error("solve_face_system: s must exceed -1");
  const std::size_t d = ts.dim();
  if (i >= d) throw std::out_of_range("solve_face_system: queue index out of range");
  Vector alpha(d);
  for (std::size_t j = 0; j < d; ++j) alpha[j] = std::log1p(ts.hitting(j, i) * s);
  return alpha;
}

double exp_generator_rate(const TrafficSolution& ts, const JacksonNetwork& net, std::size_t i,
                          double gamma_i, std::span<const long> x) {
  check_state(x, net.dim());
  const double busy = x[i] > 0 ? net.mu[i] / (1.0 + gamma_i) : 0.0;
  return gamma_i / ts.fundamental(i, i) * (ts.nu[i] - busy);
}

}  // namespace jackson

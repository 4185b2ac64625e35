#include "jackson/commands.hpp"

#include <cmath>

#include "jackson/special_cases.hpp"

namespace jackson {

namespace {

struct Prepared {
  CommandResult result;
  std::optional<TrafficSolution> ts;
};

/// Validation and traffic equations shared by every command.
Prepared prepare(const JacksonNetwork& net, const std::string& command, bool require_stable) {
  Prepared p;
  p.result.report.command = command;
  p.result.report.network = net;
  const ValidationReport validation = validate_network(net);
  p.result.report.violations = violation_records(validation);
  if (!validation.ok()) {
    p.result.exit_code = kExitRejected;
    p.result.message = "network failed validation";
    return p;
  }
  p.ts = solve_traffic(net);
  p.result.report.traffic = summarize_traffic(net, *p.ts);
  if (require_stable && !p.ts->stable) {
    p.result.exit_code = kExitRejected;
    p.result.message = "network is not stable (nu_i >= mu_i for some queue)";
  }
  return p;
}

struct BuiltLyapunov {
  std::optional<GammaCertificate> cert;
  std::optional<LyapunovFunction> h;
  std::optional<DriftRegion> region;
  std::string error;
};

BuiltLyapunov build_lyapunov(const JacksonNetwork& net, const TrafficSolution& ts, const LyapunovOptions& opts,
                             std::optional<LyapunovSummary>& summary) {
  BuiltLyapunov out;
  const bool by_gamma = opts.gamma.has_value();
  const bool by_rho = opts.rho.has_value() || opts.eps.has_value();
  if (by_gamma == by_rho) {
    out.error = "give exactly one of --gamma or --rho/--eps";
    return out;
  }
  if (by_rho && !(opts.rho && opts.eps)) {
    out.error = "--rho and --eps must be given together";
    return out;
  }
  const Vector& v = by_gamma ? *opts.gamma : *opts.rho;
  if (v.size() != net.dim()) {
    out.error = std::string(by_gamma ? "--gamma" : "--rho") + " needs " + std::to_string(net.dim()) + " components";
    return out;
  }
  try {
    out.cert = by_gamma ? gamma_membership(ts, *opts.gamma) : theorem2_gamma(net, ts, *opts.rho, *opts.eps);
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  const double theta_h = drift_rate(net, ts, out.cert->gamma);
  summary = summarize_certificate(*out.cert, theta_h);
  if (by_rho) {
    summary->gamma.provenance = provenance::lyapunov;
    summary->rho = TaggedVector{*opts.rho, provenance::input};
    summary->eps = Tagged{*opts.eps, provenance::input};
  }
  if (!out.cert->in_closure()) {
    out.error = "gamma is not in Gamma";
    return out;
  }
  out.h = by_rho ? build_h_rho_eps(net, ts, *opts.rho, *opts.eps) : build_h(net, ts, *out.cert);
  if (!opts.theta) return out;
  if (!(*opts.theta > 0.0 && *opts.theta < theta_h)) {
    out.error = "theta must lie in (0, theta_h) with theta_h = " + std::to_string(theta_h);
    return out;
  }
  try {
    out.region = drift_region(net, ts, *out.h, *opts.theta, opts.box);
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  attach_region(*summary, *out.region);
  return out;
}

}  // namespace

CommandResult cmd_analyze(const JacksonNetwork& net, const OptimizerOptions& options) {
  Prepared p = prepare(net, "analyze", true);
  if (p.result.exit_code != kExitOk) return p.result;
  const SpectralBoundsReport bounds = compute_bounds(net, *p.ts, options);
  p.result.report.bounds = summarize_bounds(bounds, classify_special_case(net, *p.ts));
  return p.result;
}

CommandResult cmd_lyapunov(const JacksonNetwork& net, const LyapunovOptions& options) {
  Prepared p = prepare(net, "lyapunov", false);
  if (p.result.exit_code != kExitOk) return p.result;
  const BuiltLyapunov built = build_lyapunov(net, *p.ts, options, p.result.report.lyapunov);
  if (!built.error.empty()) {
    p.result.exit_code = kExitRejected;
    p.result.message = built.error;
  }
  return p.result;
}

CommandResult cmd_simulate(const JacksonNetwork& net, const SimulateOptions& options) {
  if (options.mode != "stationary" && options.mode != "tail") {
    CommandResult r;
    r.report.command = "simulate";
    r.report.network = net;
    r.exit_code = kExitRejected;
    r.message = "unknown mode \"" + options.mode + "\" (expected stationary or tail)";
    return r;
  }
  Prepared p = prepare(net, "simulate", options.mode == "stationary");
  if (p.result.exit_code != kExitOk) return p.result;
  CommandResult& result = p.result;

  try {
    if (options.mode == "stationary") {
      const StationaryEstimate est = estimate_stationary(net, *p.ts, options.config, options.box);
      result.report.simulations.push_back(summarize_stationary(est));
      return result;
    }

    LyapunovOptions lyap = options.lyapunov;
    if (!lyap.theta) {
      result.exit_code = kExitRejected;
      result.message = "tail mode needs --theta and a Lyapunov function (--gamma or --rho/--eps)";
      return result;
    }
    const BuiltLyapunov built = build_lyapunov(net, *p.ts, lyap, result.report.lyapunov);
    if (!built.error.empty()) {
      result.exit_code = kExitRejected;
      result.message = built.error;
      return result;
    }
    const DriftRegion& region = *built.region;
    const State x0 = options.x0.empty() ? State(net.dim(), 8) : options.x0;
    if (x0.size() != net.dim()) {
      result.exit_code = kExitRejected;
      result.message = "--x0 needs " + std::to_string(net.dim()) + " components";
      return result;
    }
    if (region.contains(x0)) {
      result.exit_code = kExitRejected;
      result.message = "x0 lies in E";
      return result;
    }
    const StateSet target = [&region](std::span<const long> x) { return region.contains(x); };
    SimConfig config = options.config;
    const TailEstimate est = estimate_tail(net, config, target, x0, options.times);
    const LyapunovFunction& h = *built.h;
    auto bound = [&](double t) { return region.tail_bound(h, x0, t); };
    std::vector<double> curve;
    for (double t : options.times) curve.push_back(bound(t));
    result.report.simulations.push_back(
        summarize_tail(est, curve, verify_against_bound(est, bound), region.boundary_clean()));
  } catch (const std::exception& e) {
    result.exit_code = kExitRejected;
    result.message = e.what();
  }
  return result;
}

CommandResult cmd_reverse(const JacksonNetwork& net, JacksonNetwork& reversed) {
  Prepared p = prepare(net, "reverse", true);
  if (p.result.exit_code != kExitOk) return p.result;
  reversed = time_reverse(net, *p.ts);
  return p.result;
}

}  // namespace jackson

// jackson: analyze open Jackson networks from the command line.

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jackson/commands.hpp"
#include "jackson/network_io.hpp"

namespace {

using namespace jackson;

/// Counts may be written as 1e5.
std::size_t as_count(double x, const char* flag) {
  if (!(x >= 1.0) || x != std::floor(x) || x > 1e15)
    throw CLI::ValidationError(flag, "expected a positive integer");
  return static_cast<std::size_t>(x);
}

int finish(const CommandResult& result, const std::string& out_path) {
  std::cout << render_text(result.report);
  if (!result.message.empty()) std::cerr << "error: " << result.message << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << to_json(result.report).dump(2) << "\n";
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitInput;
    }
  }
  return result.exit_code;
}

std::optional<Vector> opt_vec(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral bounds, Lyapunov certificates and simulation for open Jackson networks"};
  app.require_subcommand(1);

  std::string file, out;
  double budget = 5000, starts = 8;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("network", file, "network JSON file")->required();
    sub->add_option("--out", out, "write the JSON report here");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "validation, traffic equations and bounds on log r_e*");
  add_common(analyze);
  analyze->add_option("--budget", budget, "objective evaluations per optimizer")->capture_default_str();
  analyze->add_option("--starts", starts, "optimizer restarts")->capture_default_str();
  analyze->add_option("--seed", seed, "optimizer seed")->capture_default_str();

  std::vector<double> gamma, rho;
  double eps = NAN, theta = NAN, box = 40;
  auto add_lyapunov = [&](CLI::App* sub) {
    sub->add_option("--gamma", gamma, "comma-separated gamma vector")->delimiter(',');
    sub->add_option("--rho", rho, "comma-separated rho vector")->delimiter(',');
    sub->add_option("--eps", eps, "epsilon for the rho/eps construction");
    sub->add_option("--theta", theta, "drift rate used for the region E");
  };

  CLI::App* lyapunov = app.add_subcommand("lyapunov", "membership certificate, drift region and tail bound");
  add_common(lyapunov);
  add_lyapunov(lyapunov);
  lyapunov->add_option("--box", box, "scan box [0, box]^d for E")->capture_default_str();

  std::string mode = "stationary";
  double horizon = 1e5, reps = 1, warmup = -1, sim_box = 5, region_box = 40, threads = 0;
  std::vector<double> times{1, 2, 5, 10};
  std::vector<long> x0;
  CLI::App* simulate = app.add_subcommand("simulate", "stationary occupancy or hitting-time tail by simulation");
  add_common(simulate);
  add_lyapunov(simulate);
  simulate->add_option("--mode", mode, "stationary or tail")->check(CLI::IsMember({"stationary", "tail"}))
      ->capture_default_str();
  simulate->add_option("--horizon", horizon, "simulated time per replication (stationary)")->capture_default_str();
  simulate->add_option("--seed", seed, "random seed")->capture_default_str();
  simulate->add_option("--reps", reps, "replications")->capture_default_str();
  simulate->add_option("--warmup", warmup, "discarded initial time (default horizon/100)");
  simulate->add_option("--box", sim_box, "stationary comparison box [0, box]^d")->capture_default_str();
  simulate->add_option("--region-box", region_box, "scan box for E in tail mode")->capture_default_str();
  simulate->add_option("--t", times, "comma-separated time grid (tail)")->delimiter(',');
  simulate->add_option("--x0", x0, "comma-separated start state (tail, default 8 in every queue)")->delimiter(',');
  simulate->add_option("--threads", threads, "worker threads, 0 for all cores")->capture_default_str();

  CLI::App* reverse = app.add_subcommand("reverse", "print the time-reversed network");
  add_common(reverse);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  JacksonNetwork net;
  try {
    net = load_network(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*analyze) {
      OptimizerOptions opts;
      opts.budget = as_count(budget, "--budget");
      opts.starts = as_count(starts, "--starts");
      opts.seed = seed;
      return finish(cmd_analyze(net, opts), out);
    }

    LyapunovOptions lopts;
    lopts.gamma = opt_vec(gamma);
    lopts.rho = opt_vec(rho);
    if (!std::isnan(eps)) lopts.eps = eps;
    if (!std::isnan(theta)) lopts.theta = theta;

    if (*lyapunov) {
      lopts.box = static_cast<long>(as_count(box, "--box"));
      return finish(cmd_lyapunov(net, lopts), out);
    }

    if (*simulate) {
      SimulateOptions sopts;
      sopts.mode = mode;
      sopts.config.seed = seed;
      sopts.config.horizon = horizon;
      sopts.config.replications = as_count(reps, "--reps");
      sopts.config.warmup = warmup;
      sopts.config.threads = static_cast<unsigned>(threads);
      sopts.box = static_cast<long>(sim_box);
      lopts.box = static_cast<long>(as_count(region_box, "--region-box"));
      sopts.lyapunov = lopts;
      sopts.x0 = x0;
      sopts.times = times;
      return finish(cmd_simulate(net, sopts), out);
    }

    JacksonNetwork reversed;
    const CommandResult result = cmd_reverse(net, reversed);
    if (result.exit_code != kExitOk) return finish(result, out);
    const std::string text = format_network(reversed);
    std::cout << text;
    if (!out.empty()) {
      std::ofstream f(out);
      f << text;
      if (!f) {
        std::cerr << "error: cannot write " << out << "\n";
        return kExitInput;
      }
    }
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRejected;
  }
}

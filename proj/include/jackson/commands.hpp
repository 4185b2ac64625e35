#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jackson/bounds.hpp"
#include "jackson/report.hpp"
#include "jackson/simulator.hpp"

namespace jackson {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;     // I/O or parse error
inline constexpr int kExitRejected = 2;  // invalid or unstable network, rejected arguments

struct CommandResult {
  AnalysisReport report;
  int exit_code = kExitOk;
  /// Reason for a nonzero exit code, empty otherwise.
  std::string message;
};

CommandResult cmd_analyze(const JacksonNetwork& net, const OptimizerOptions& options = {});

struct LyapunovOptions {
  std::optional<Vector> gamma;
  std::optional<Vector> rho;
  std::optional<double> eps;
  std::optional<double> theta;
  long box = 40;
};

/// Exactly one of gamma or (rho, eps) must be set. Without theta only the
/// certificate and theta_h are reported.
CommandResult cmd_lyapunov(const JacksonNetwork& net, const LyapunovOptions& options);

struct SimulateOptions {
  std::string mode = "stationary";  // or "tail"
  SimConfig config;
  long box = 5;  // stationary comparison box [0, box]^d
  LyapunovOptions lyapunov;  // tail mode: builds E and the bound curve
  State x0;                  // tail mode start; empty means 8 in every queue
  std::vector<double> times{1.0, 2.0, 5.0, 10.0};
};

CommandResult cmd_simulate(const JacksonNetwork& net, const SimulateOptions& options);

/// Time-reversed network, or a rejection for invalid or unstable input.
CommandResult cmd_reverse(const JacksonNetwork& net, JacksonNetwork& reversed);

}  // namespace jackson

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jackson/lyapunov.hpp"
#include "jackson/network.hpp"
#include "jackson/simulator.hpp"
#include "jackson/special_cases.hpp"

namespace jackson {

/// Significant digits kept for every number written to a JSON report.
inline constexpr int kReportDigits = 12;

/// Rounds to kReportDigits significant digits. Idempotent, which is what makes
/// report JSON round-trip byte for byte.
double report_round(double x);

/// Provenance tags attached to numeric report fields.
namespace provenance {
inline constexpr const char* input = "input";
inline constexpr const char* traffic = "traffic_equations";
inline constexpr const char* lower = "lower_bound";
inline constexpr const char* upper_gamma = "upper_bound_gamma";
inline constexpr const char* upper_rho_eps = "upper_bound_rho_eps";
inline constexpr const char* lyapunov = "lyapunov_drift";
inline constexpr const char* drift_region = "drift_region_scan";
inline constexpr const char* tail_bound = "hitting_time_tail_bound";
inline constexpr const char* product_form = "product_form";
inline constexpr const char* simulation = "simulation";
std::string special_case(const std::string& tag);
}  // namespace provenance

struct Tagged {
  double value = 0.0;
  std::string provenance;
  bool operator==(const Tagged&) const = default;
};

struct TaggedVector {
  Vector values;
  std::string provenance;
  bool operator==(const TaggedVector&) const = default;
};

struct ViolationRecord {
  std::string kind;
  std::optional<std::size_t> index;
  std::string message;
  bool operator==(const ViolationRecord&) const = default;
};

struct TrafficSummary {
  TaggedVector nu;
  TaggedVector load;
  TaggedVector g_diag;
  Tagged spectral_radius;
  bool stable = false;
  std::string branching;
  bool operator==(const TrafficSummary&) const = default;
};

struct BoundsSummary {
  Tagged lower;
  Tagged upper_gamma;
  TaggedVector gamma_opt;
  Tagged upper_rho_eps;
  TaggedVector rho_opt;
  Tagged eps_opt;
  std::optional<Tagged> exact;
  std::string special_case;  // "none" when no closed form applies
  bool equality = false;
  bool operator==(const BoundsSummary&) const = default;
};

struct LyapunovSummary {
  TaggedVector gamma;
  std::string verdict;
  Tagged slack;
  std::optional<std::size_t> violating_index;
  std::optional<TaggedVector> violating_direction;
  std::optional<TaggedVector> rho;
  std::optional<Tagged> eps;
  Tagged theta_h;
  std::optional<Tagged> theta;
  std::optional<long> box;
  std::optional<std::size_t> region_size;
  std::optional<Tagged> c_e;
  std::optional<bool> boundary_clean;
  bool operator==(const LyapunovSummary&) const = default;
};

struct SimulationSummary {
  std::string kind;  // "stationary_marginals" or "tail_curve"
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  double total_time = 0.0;
  /// Stationary: grid is k = 0..box for each queue in turn, with `queue`
  /// naming the queue. Tail: grid is the time grid.
  std::vector<double> grid;
  std::vector<std::size_t> queue;
  TaggedVector values;
  TaggedVector half_widths;
  std::optional<TaggedVector> reference;  // exact marginals or the bound curve
  std::optional<TaggedVector> margins;    // tail mode only
  std::optional<Tagged> max_abs_deviation;
  std::optional<bool> passed;
  std::optional<bool> boundary_clean;
  bool operator==(const SimulationSummary&) const = default;
};

struct AnalysisReport {
  std::string command;
  JacksonNetwork network;
  std::vector<ViolationRecord> violations;
  std::optional<TrafficSummary> traffic;
  std::optional<BoundsSummary> bounds;
  std::optional<LyapunovSummary> lyapunov;
  std::vector<SimulationSummary> simulations;

  bool valid() const { return violations.empty(); }
  bool operator==(const AnalysisReport& other) const;
};

std::vector<ViolationRecord> violation_records(const ValidationReport& report);
TrafficSummary summarize_traffic(const JacksonNetwork& net, const TrafficSolution& ts);
BoundsSummary summarize_bounds(const SpectralBoundsReport& bounds, const SpecialCase& special);
LyapunovSummary summarize_certificate(const GammaCertificate& cert, double theta_h);
void attach_region(LyapunovSummary& summary, const DriftRegion& region);
SimulationSummary summarize_stationary(const StationaryEstimate& est);
SimulationSummary summarize_tail(const TailEstimate& est, const std::vector<double>& bound,
                                 const std::vector<double>& margins, bool boundary_clean);

nlohmann::json to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& doc);

/// Human-readable rendering; deterministic for a fixed report.
std::string render_text(const AnalysisReport& report);

}  // namespace jackson

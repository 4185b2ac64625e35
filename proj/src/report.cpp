#include "jackson/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "jackson/network_io.hpp"

namespace jackson {

namespace {

using nlohmann::json;

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return report_round(x);
}

double read_number(const json& node) {
  if (node.is_string()) {
    const std::string s = node.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw ParseError("invalid number string \"" + s + "\"");
  }
  return node.get<double>();
}

json numbers(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Vector read_numbers(const json& node) {
  Vector out;
  for (const json& x : node) out.push_back(read_number(x));
  return out;
}

json tagged(const Tagged& t) { return {{"value", number(t.value)}, {"provenance", t.provenance}}; }
json tagged(const TaggedVector& t) { return {{"values", numbers(t.values)}, {"provenance", t.provenance}}; }

Tagged read_tagged(const json& node) { return {read_number(node.at("value")), node.at("provenance").get<std::string>()}; }
TaggedVector read_tagged_vector(const json& node) {
  return {read_numbers(node.at("values")), node.at("provenance").get<std::string>()};
}

template <class T, class F>
void put_optional(json& obj, const char* key, const std::optional<T>& value, F&& convert) {
  if (value) obj[key] = convert(*value);
}

template <class T, class F>
std::optional<T> get_optional(const json& obj, const char* key, F&& convert) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  return convert(obj[key]);
}

auto identity = [](const auto& x) { return json(x); };

json network_json(const JacksonNetwork& net) {
  return {{"lambda", numbers(net.lambda)}, {"mu", numbers(net.mu)}, {"P", [&] {
             json rows = json::array();
             for (const Vector& r : net.routing.to_rows()) rows.push_back(numbers(r));
             return rows;
           }()}};
}

JacksonNetwork read_network(const json& node) {
  JacksonNetwork net;
  net.lambda = read_numbers(node.at("lambda"));
  net.mu = read_numbers(node.at("mu"));
  std::vector<Vector> rows;
  for (const json& r : node.at("P")) rows.push_back(read_numbers(r));
  net.routing = rows.empty() ? Matrix(0, 0) : Matrix::from_rows(rows);
  return net;
}

// Text helpers.

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string vec(const Vector& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
  return s + ")";
}

std::string line(const std::string& label, const Tagged& t) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "  %-22s %-16s [%s]\n", label.c_str(), num(t.value).c_str(), t.provenance.c_str());
  return buf;
}

std::string line(const std::string& label, const TaggedVector& t) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "  %-22s %-16s [%s]\n", label.c_str(), vec(t.values).c_str(), t.provenance.c_str());
  return buf;
}

std::string plain(const std::string& label, const std::string& value) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "  %-22s %s\n", label.c_str(), value.c_str());
  return buf;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

double report_round(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kReportDigits, x);
  return std::strtod(buf, nullptr);
}

std::string provenance::special_case(const std::string& tag) { return "special_case:" + tag; }

bool AnalysisReport::operator==(const AnalysisReport& other) const {
  return command == other.command && network.lambda == other.network.lambda && network.mu == other.network.mu &&
         network.routing == other.network.routing && violations == other.violations && traffic == other.traffic &&
         bounds == other.bounds && lyapunov == other.lyapunov && simulations == other.simulations;
}

std::vector<ViolationRecord> violation_records(const ValidationReport& report) {
  std::vector<ViolationRecord> out;
  for (const Violation& v : report.violations) out.push_back({to_string(v.kind), v.index, v.message});
  return out;
}

TrafficSummary summarize_traffic(const JacksonNetwork& net, const TrafficSolution& ts) {
  TrafficSummary s;
  s.nu = {ts.nu, provenance::traffic};
  for (std::size_t i = 0; i < ts.dim(); ++i) {
    s.load.values.push_back(ts.load(i, net));
    s.g_diag.values.push_back(ts.fundamental(i, i));
  }
  s.load.provenance = provenance::traffic;
  s.g_diag.provenance = provenance::traffic;
  s.spectral_radius = {ts.routing_spectral_radius, provenance::traffic};
  s.stable = ts.stable;
  s.branching = to_string(detect_branching(net.routing));
  return s;
}

BoundsSummary summarize_bounds(const SpectralBoundsReport& bounds, const SpecialCase& special) {
  BoundsSummary s;
  s.lower = {bounds.lower, provenance::lower};
  s.upper_gamma = {bounds.upper_gamma.value, provenance::upper_gamma};
  s.gamma_opt = {bounds.upper_gamma.gamma, provenance::upper_gamma};
  s.upper_rho_eps = {bounds.upper_rho_eps.value, provenance::upper_rho_eps};
  s.rho_opt = {bounds.upper_rho_eps.rho, provenance::upper_rho_eps};
  s.eps_opt = {bounds.upper_rho_eps.eps, provenance::upper_rho_eps};
  if (special.exact) s.exact = Tagged{*special.exact, provenance::special_case(special.tag)};
  s.special_case = special.tag;
  s.equality = bounds.equality.equality;
  return s;
}

LyapunovSummary summarize_certificate(const GammaCertificate& cert, double theta_h) {
  LyapunovSummary s;
  s.gamma = {cert.gamma, provenance::input};
  s.verdict = to_string(cert.verdict);
  s.slack = {cert.slack, provenance::lyapunov};
  if (cert.violation) {
    s.violating_index = cert.violation->index;
    s.violating_direction = TaggedVector{cert.violation->direction, provenance::lyapunov};
  }
  s.theta_h = {theta_h, provenance::lyapunov};
  return s;
}

void attach_region(LyapunovSummary& summary, const DriftRegion& region) {
  summary.theta = Tagged{region.theta(), provenance::input};
  summary.box = region.box_cap();
  summary.region_size = region.size();
  summary.c_e = Tagged{region.c_e(), provenance::drift_region};
  summary.boundary_clean = region.boundary_clean();
}

SimulationSummary summarize_stationary(const StationaryEstimate& est) {
  SimulationSummary s;
  s.kind = "stationary_marginals";
  s.seed = est.seed;
  s.replications = est.replications;
  s.total_time = est.total_time;
  TaggedVector exact{{}, provenance::product_form};
  for (std::size_t i = 0; i < est.marginals.size(); ++i)
    for (const BoxPoint& pt : est.marginals[i]) {
      s.grid.push_back(static_cast<double>(pt.state.front()));
      s.queue.push_back(i);
      s.values.values.push_back(pt.estimate);
      s.half_widths.values.push_back(pt.half_width);
      exact.values.push_back(pt.exact);
    }
  s.values.provenance = provenance::simulation;
  s.half_widths.provenance = provenance::simulation;
  s.reference = exact;
  s.max_abs_deviation = Tagged{est.max_abs_deviation, provenance::simulation};
  return s;
}

SimulationSummary summarize_tail(const TailEstimate& est, const std::vector<double>& bound,
                                 const std::vector<double>& margins, bool boundary_clean) {
  SimulationSummary s;
  s.kind = "tail_curve";
  s.seed = est.seed;
  s.replications = est.replications;
  s.total_time = est.total_time;
  for (const TailPoint& pt : est.curve) {
    s.grid.push_back(pt.t);
    s.values.values.push_back(pt.estimate);
    s.half_widths.values.push_back(pt.half_width);
  }
  s.values.provenance = provenance::simulation;
  s.half_widths.provenance = provenance::simulation;
  s.reference = TaggedVector{bound, provenance::tail_bound};
  s.margins = TaggedVector{margins, provenance::simulation};
  bool ok = true;
  for (double m : margins) ok = ok && m >= 0.0;
  s.passed = ok;
  s.boundary_clean = boundary_clean;
  return s;
}

json to_json(const AnalysisReport& r) {
  json doc;
  doc["command"] = r.command;
  doc["network"] = network_json(r.network);

  json violations = json::array();
  for (const ViolationRecord& v : r.violations) {
    json item = {{"kind", v.kind}, {"message", v.message}};
    put_optional(item, "index", v.index, identity);
    violations.push_back(item);
  }
  doc["validation"] = {{"ok", r.valid()}, {"violations", violations}};

  if (r.traffic) {
    const TrafficSummary& t = *r.traffic;
    doc["traffic"] = {{"nu", tagged(t.nu)},
                      {"load", tagged(t.load)},
                      {"g_diag", tagged(t.g_diag)},
                      {"spectral_radius", tagged(t.spectral_radius)},
                      {"stable", t.stable},
                      {"branching", t.branching}};
  }
  if (r.bounds) {
    const BoundsSummary& b = *r.bounds;
    json obj = {{"lower", tagged(b.lower)},
                {"upper_gamma", tagged(b.upper_gamma)},
                {"gamma_opt", tagged(b.gamma_opt)},
                {"upper_rho_eps", tagged(b.upper_rho_eps)},
                {"rho_opt", tagged(b.rho_opt)},
                {"eps_opt", tagged(b.eps_opt)},
                {"special_case", b.special_case},
                {"equality", b.equality}};
    put_optional(obj, "exact", b.exact, [](const Tagged& t) { return tagged(t); });
    doc["bounds"] = obj;
  }
  if (r.lyapunov) {
    const LyapunovSummary& l = *r.lyapunov;
    json obj = {{"gamma", tagged(l.gamma)},
                {"verdict", l.verdict},
                {"slack", tagged(l.slack)},
                {"theta_h", tagged(l.theta_h)}};
    auto tv = [](const TaggedVector& t) { return tagged(t); };
    auto ts = [](const Tagged& t) { return tagged(t); };
    put_optional(obj, "violating_index", l.violating_index, identity);
    put_optional(obj, "violating_direction", l.violating_direction, tv);
    put_optional(obj, "rho", l.rho, tv);
    put_optional(obj, "eps", l.eps, ts);
    put_optional(obj, "theta", l.theta, ts);
    put_optional(obj, "box", l.box, identity);
    put_optional(obj, "region_size", l.region_size, identity);
    put_optional(obj, "c_e", l.c_e, ts);
    put_optional(obj, "boundary_clean", l.boundary_clean, identity);
    doc["lyapunov"] = obj;
  }
  json sims = json::array();
  for (const SimulationSummary& s : r.simulations) {
    json obj = {{"kind", s.kind},
                {"seed", s.seed},
                {"replications", s.replications},
                {"total_time", number(s.total_time)},
                {"grid", numbers(s.grid)},
                {"values", tagged(s.values)},
                {"half_widths", tagged(s.half_widths)}};
    if (!s.queue.empty()) obj["queue"] = s.queue;
    auto tv = [](const TaggedVector& t) { return tagged(t); };
    put_optional(obj, "reference", s.reference, tv);
    put_optional(obj, "margins", s.margins, tv);
    put_optional(obj, "max_abs_deviation", s.max_abs_deviation, [](const Tagged& t) { return tagged(t); });
    put_optional(obj, "passed", s.passed, identity);
    put_optional(obj, "boundary_clean", s.boundary_clean, identity);
    sims.push_back(obj);
  }
  doc["simulations"] = sims;
  return doc;
}

AnalysisReport report_from_json(const json& doc) {
  AnalysisReport r;
  r.command = doc.at("command").get<std::string>();
  r.network = read_network(doc.at("network"));
  for (const json& v : doc.at("validation").at("violations"))
    r.violations.push_back({v.at("kind").get<std::string>(),
                            get_optional<std::size_t>(v, "index", [](const json& j) { return j.get<std::size_t>(); }),
                            v.at("message").get<std::string>()});
  if (doc.contains("traffic")) {
    const json& t = doc["traffic"];
    r.traffic = TrafficSummary{read_tagged_vector(t.at("nu")),
                               read_tagged_vector(t.at("load")),
                               read_tagged_vector(t.at("g_diag")),
                               read_tagged(t.at("spectral_radius")),
                               t.at("stable").get<bool>(),
                               t.at("branching").get<std::string>()};
  }
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    BoundsSummary s;
    s.lower = read_tagged(b.at("lower"));
    s.upper_gamma = read_tagged(b.at("upper_gamma"));
    s.gamma_opt = read_tagged_vector(b.at("gamma_opt"));
    s.upper_rho_eps = read_tagged(b.at("upper_rho_eps"));
    s.rho_opt = read_tagged_vector(b.at("rho_opt"));
    s.eps_opt = read_tagged(b.at("eps_opt"));
    s.exact = get_optional<Tagged>(b, "exact", read_tagged);
    s.special_case = b.at("special_case").get<std::string>();
    s.equality = b.at("equality").get<bool>();
    r.bounds = s;
  }
  if (doc.contains("lyapunov")) {
    const json& l = doc["lyapunov"];
    LyapunovSummary s;
    s.gamma = read_tagged_vector(l.at("gamma"));
    s.verdict = l.at("verdict").get<std::string>();
    s.slack = read_tagged(l.at("slack"));
    s.theta_h = read_tagged(l.at("theta_h"));
    s.violating_index = get_optional<std::size_t>(l, "violating_index", [](const json& j) { return j.get<std::size_t>(); });
    s.violating_direction = get_optional<TaggedVector>(l, "violating_direction", read_tagged_vector);
    s.rho = get_optional<TaggedVector>(l, "rho", read_tagged_vector);
    s.eps = get_optional<Tagged>(l, "eps", read_tagged);
    s.theta = get_optional<Tagged>(l, "theta", read_tagged);
    s.box = get_optional<long>(l, "box", [](const json& j) { return j.get<long>(); });
    s.region_size = get_optional<std::size_t>(l, "region_size", [](const json& j) { return j.get<std::size_t>(); });
    s.c_e = get_optional<Tagged>(l, "c_e", read_tagged);
    s.boundary_clean = get_optional<bool>(l, "boundary_clean", [](const json& j) { return j.get<bool>(); });
    r.lyapunov = s;
  }
  for (const json& o : doc.at("simulations")) {
    SimulationSummary s;
    s.kind = o.at("kind").get<std::string>();
    s.seed = o.at("seed").get<std::uint64_t>();
    s.replications = o.at("replications").get<std::size_t>();
    s.total_time = read_number(o.at("total_time"));
    s.grid = read_numbers(o.at("grid"));
    if (o.contains("queue")) s.queue = o["queue"].get<std::vector<std::size_t>>();
    s.values = read_tagged_vector(o.at("values"));
    s.half_widths = read_tagged_vector(o.at("half_widths"));
    s.reference = get_optional<TaggedVector>(o, "reference", read_tagged_vector);
    s.margins = get_optional<TaggedVector>(o, "margins", read_tagged_vector);
    s.max_abs_deviation = get_optional<Tagged>(o, "max_abs_deviation", read_tagged);
    s.passed = get_optional<bool>(o, "passed", [](const json& j) { return j.get<bool>(); });
    s.boundary_clean = get_optional<bool>(o, "boundary_clean", [](const json& j) { return j.get<bool>(); });
    r.simulations.push_back(std::move(s));
  }
  return r;
}

std::string render_text(const AnalysisReport& r) {
  std::ostringstream out;
  const JacksonNetwork& net = r.network;
  out << "command: " << r.command << "\n";
  out << "network (d = " << net.dim() << ")\n";
  out << plain("lambda", vec(net.lambda));
  out << plain("mu", vec(net.mu));
  for (std::size_t i = 0; i < net.routing.rows(); ++i)
    out << plain(i == 0 ? "P" : "", vec(net.routing.to_rows()[i]));

  if (r.valid()) {
    out << "validation: ok\n";
  } else {
    out << "validation: FAILED\n";
    for (const ViolationRecord& v : r.violations) out << "  - " << v.kind << ": " << v.message << "\n";
  }

  if (r.traffic) {
    const TrafficSummary& t = *r.traffic;
    out << "traffic\n";
    out << line("nu", t.nu);
    out << line("load nu/mu", t.load);
    out << line("G_ii", t.g_diag);
    out << line("spectral radius of P", t.spectral_radius);
    out << plain("stable", yes_no(t.stable));
    if (!t.stable)
      for (std::size_t i = 0; i < t.nu.values.size(); ++i)
        if (t.nu.values[i] >= net.mu[i])
          out << "  ! queue " << i + 1 << ": nu = " << num(t.nu.values[i]) << " >= mu = " << num(net.mu[i]) << "\n";
    out << plain("branching structure", t.branching);
  }

  if (r.bounds) {
    const BoundsSummary& b = *r.bounds;
    out << "bounds on log r_e*\n";
    out << line("lower", b.lower);
    out << line("upper (gamma)", b.upper_gamma);
    out << line("  at gamma", b.gamma_opt);
    out << line("upper (rho, eps)", b.upper_rho_eps);
    out << line("  at rho", b.rho_opt);
    out << line("  at eps", b.eps_opt);
    if (b.exact) out << line("exact", *b.exact);
    out << plain("special case", b.special_case);
    out << plain("equality diagnosed", yes_no(b.equality));
  }

  if (r.lyapunov) {
    const LyapunovSummary& l = *r.lyapunov;
    out << "lyapunov function\n";
    if (l.rho) out << line("rho", *l.rho);
    if (l.eps) out << line("eps", *l.eps);
    out << line("gamma", l.gamma);
    out << plain("membership", l.verdict);
    out << line("certified slack", l.slack);
    if (l.violating_direction)
      out << plain("violating direction", "queue " + std::to_string(*l.violating_index + 1) + ", v = " +
                                              vec(l.violating_direction->values));
    out << line("theta_h", l.theta_h);
    if (!(l.theta_h.value > 0.0)) out << "  ! theta_h <= 0: h is not a multiplicative Lyapunov function\n";
    if (l.theta) out << line("theta", *l.theta);
    if (l.box) out << plain("box", "[0, " + std::to_string(*l.box) + "]^" + std::to_string(net.dim()));
    if (l.region_size) out << plain("|E|", std::to_string(*l.region_size));
    if (l.c_e) out << line("c_E", *l.c_e);
    if (l.boundary_clean) out << plain("boundary clean", yes_no(*l.boundary_clean));
    if (l.c_e && l.theta)
      out << plain("tail bound", "P_x(tau_E > t) <= h(x) exp(-" + num(l.theta->value) + " t) / " + num(l.c_e->value));
  }

  for (const SimulationSummary& s : r.simulations) {
    out << "simulation: " << s.kind << " (seed " << s.seed << ", " << s.replications << " replications, total time "
        << num(s.total_time) << ")\n";
    char buf[256];
    if (s.kind == "stationary_marginals") {
      out << "  queue  k   estimate    +/-         exact       deviation\n";
      for (std::size_t k = 0; k < s.grid.size(); ++k) {
        const double ex = s.reference ? s.reference->values[k] : 0.0;
        std::snprintf(buf, sizeof buf, "  %-5zu  %-3g %-11.6f %-11.6f %-11.6f %+.6f\n", s.queue[k] + 1, s.grid[k],
                      s.values.values[k], s.half_widths.values[k], ex, s.values.values[k] - ex);
        out << buf;
      }
      if (s.max_abs_deviation) out << line("max |joint - exact|", *s.max_abs_deviation);
    } else {
      out << "  t          estimate    +/-         bound       margin\n";
      for (std::size_t k = 0; k < s.grid.size(); ++k) {
        std::snprintf(buf, sizeof buf, "  %-10g %-11.6f %-11.6f %-11.6g %+.6g\n", s.grid[k], s.values.values[k],
                      s.half_widths.values[k], s.reference ? s.reference->values[k] : 0.0,
                      s.margins ? s.margins->values[k] : 0.0);
        out << buf;
      }
      if (s.boundary_clean && !*s.boundary_clean)
        out << "  note: E touches the box boundary; c_E is only certified on the box\n";
      if (s.passed) out << plain("bound check", *s.passed ? "PASS" : "FAIL");
    }
  }
  return out.str();
}

}  // namespace jackson

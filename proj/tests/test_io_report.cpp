#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jackson/commands.hpp"
#include "jackson/network_io.hpp"
#include "support.hpp"

using namespace jackson;
using namespace testing_support;

namespace {

const std::filesystem::path kSource = JACKSON_SOURCE_DIR;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_network(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

void check_round_trip(const AnalysisReport& report) {
  const std::string once = to_json(report).dump(2);
  const AnalysisReport back = report_from_json(nlohmann::json::parse(once));
  CHECK(back == report_from_json(to_json(back)));
  CHECK(to_json(back).dump(2) == once);
}

}  // namespace

TEST_CASE("network files") {
  const JacksonNetwork a = load_network(kSource / "networks" / "net_a.json");
  CHECK(a.lambda == net_a().lambda);
  CHECK(a.mu == net_a().mu);
  CHECK(max_abs_difference(a.routing, net_a().routing) == 0.0);
  for (const JacksonNetwork& net : {net_a(), net_b(), net_c(), net_d(), net_e()}) {
    const JacksonNetwork back = parse_network(format_network(net));
    CHECK(back.lambda == net.lambda);
    CHECK(back.mu == net.mu);
    CHECK(max_abs_difference(back.routing, net.routing) == 0.0);
  }
  CHECK_THROWS_AS(load_network(kSource / "networks" / "missing.json"), IoError);
}

TEST_CASE("parse errors name the problem") {
  CHECK(error_of(R"({"lambda": [1], "P": [[0]]})").find("missing key \"mu\"") != std::string::npos);
  CHECK(error_of(R"({"lambda": [1], "mu": [2], "P": [[0]], "extra": 1})").find("unknown key \"extra\"") !=
        std::string::npos);
  CHECK(error_of(R"({"lambda": ["a"], "mu": [2], "P": [[0]]})").find("lambda") != std::string::npos);
  CHECK(error_of(R"({"lambda": [1, 1], "mu": [2, 2], "P": [[0, 1], [0]]})").find("P") != std::string::npos);
  const std::string syntax = error_of("{\n  \"lambda\": [1],\n  \"mu\": [2,,]\n}");
  CHECK(syntax.find("line 3") != std::string::npos);
  CHECK(syntax.find("column") != std::string::npos);
  CHECK(error_of("[1, 2]") != "");
}

TEST_CASE("numbers are rounded to twelve significant digits") {
  CHECK(report_round(1.0 / 3) == 0.333333333333);
  CHECK(report_round(report_round(2.0 / 3)) == report_round(2.0 / 3));
  CHECK(report_round(-1.0) == -1.0);
  CHECK(std::isinf(report_round(INFINITY)));
}

TEST_CASE("reports round-trip through JSON") {
  for (const JacksonNetwork& net : {net_a(), net_b(), net_c(), net_d(), net_e()}) check_round_trip(cmd_analyze(net).report);

  LyapunovOptions lo;
  lo.gamma = Vector{2, 1};
  lo.theta = 0.1;
  check_round_trip(cmd_lyapunov(net_a(), lo).report);
  lo.gamma = Vector{1, 2};
  lo.theta.reset();
  check_round_trip(cmd_lyapunov(net_a(), lo).report);
  LyapunovOptions re;
  re.rho = Vector{1, 2};
  re.eps = 1.0;
  check_round_trip(cmd_lyapunov(net_a(), re).report);

  SimulateOptions so;
  so.config.horizon = 500;
  so.config.seed = 3;
  so.box = 2;
  check_round_trip(cmd_simulate(net_a(), so).report);
  so.mode = "tail";
  so.config.replications = 200;
  so.lyapunov.gamma = Vector{2, 1};
  so.lyapunov.theta = 0.1;
  check_round_trip(cmd_simulate(net_a(), so).report);

  // Every serialized number already carries at most twelve digits.
  const nlohmann::json doc = to_json(cmd_analyze(net_c()).report);
  const double v = doc["bounds"]["lower"]["value"].get<double>();
  CHECK(report_round(v) == v);
}

TEST_CASE("text reports match the golden files") {
  const bool update = std::getenv("JACKSON_UPDATE_GOLDEN") != nullptr;
  for (const char* name : {"net_a", "net_b", "net_c"}) {
    CAPTURE(name);
    const JacksonNetwork net = load_network(kSource / "networks" / (std::string(name) + ".json"));
    const std::string text = render_text(cmd_analyze(net).report);
    CHECK(text == render_text(cmd_analyze(net).report));
    const std::filesystem::path golden = kSource / "tests" / "golden" / (std::string(name) + ".txt");
    if (update) std::ofstream(golden, std::ios::binary) << text;
    CHECK(text == slurp(golden));
  }
}

TEST_CASE("command exit codes") {
  const CommandResult a = cmd_analyze(net_a());
  CHECK(a.exit_code == kExitOk);
  CHECK(a.message.empty());
  REQUIRE(a.report.bounds);
  CHECK(a.report.bounds->special_case == "branching");
  CHECK(a.report.bounds->lower.value == doctest::Approx(-1));
  CHECK(a.report.bounds->upper_gamma.value == doctest::Approx(-1).epsilon(1e-4));
  REQUIRE(a.report.bounds->exact);
  CHECK(a.report.bounds->exact->value == doctest::Approx(-1));

  const CommandResult e = cmd_analyze(net_e());
  CHECK(e.exit_code == kExitRejected);
  REQUIRE(e.report.traffic);
  CHECK_FALSE(e.report.traffic->stable);
  CHECK(render_text(e.report).find("queue 1: nu = 3 >= mu = 2") != std::string::npos);

  JacksonNetwork bad = net_a();
  bad.mu[0] = -1;
  const CommandResult v = cmd_analyze(bad);
  CHECK(v.exit_code == kExitRejected);
  CHECK_FALSE(v.report.valid());

  LyapunovOptions lo;
  lo.gamma = Vector{2, 1};
  lo.theta = 0.1;
  const CommandResult l = cmd_lyapunov(net_a(), lo);
  CHECK(l.exit_code == kExitOk);
  REQUIRE(l.report.lyapunov);
  CHECK(l.report.lyapunov->verdict == "member");
  CHECK(l.report.lyapunov->theta_h.value == doctest::Approx(2.0 / 3));
  CHECK(*l.report.lyapunov->boundary_clean);

  lo.theta = 0.7;
  CHECK(cmd_lyapunov(net_a(), lo).exit_code == kExitRejected);
  lo.gamma = Vector{1, 2};
  lo.theta.reset();
  const CommandResult n = cmd_lyapunov(net_a(), lo);
  CHECK(n.exit_code == kExitRejected);
  REQUIRE(n.report.lyapunov);
  CHECK(n.report.lyapunov->verdict == "non_member");
  REQUIRE(n.report.lyapunov->violating_direction);
  CHECK(n.report.lyapunov->violating_direction->values == Vector{1, 0});

  LyapunovOptions both;
  both.gamma = Vector{2, 1};
  both.rho = Vector{1, 2};
  both.eps = 1.0;
  CHECK(cmd_lyapunov(net_a(), both).exit_code == kExitRejected);
  CHECK(cmd_lyapunov(net_a(), LyapunovOptions{}).exit_code == kExitRejected);

  SimulateOptions so;
  so.config.horizon = 100;
  CHECK(cmd_simulate(net_e(), so).exit_code == kExitRejected);
  so.mode = "bogus";
  CHECK(cmd_simulate(net_a(), so).exit_code == kExitRejected);

  JacksonNetwork reversed;
  CHECK(cmd_reverse(net_a(), reversed).exit_code == kExitOk);
  CHECK(reversed.routing(1, 0) == doctest::Approx(1));
  CHECK(cmd_reverse(net_e(), reversed).exit_code == kExitRejected);
}

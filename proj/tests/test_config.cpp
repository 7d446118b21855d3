#include <cmath>
#include <string>

#include "crosswidth/config.hpp"
#include "crosswidth/errors.hpp"
#include "crosswidth/format.hpp"
#include "crosswidth/runner.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace cw;

namespace {

const char* kBase = R"([problem]
v1 = 1-1/cosh(x)^2
v2 = 0.1-0.6*tanh(x)   # comment
r0 = 1
r1 = 0
e0 = 0.75
)";

int config_line(const std::string& text) {
  try {
    config::parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string config_message(const std::string& text) {
  try {
    config::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = config::parse_config(kBase);
  CHECK(cfg.problem.e0 == 0.75);
  CHECK(cfg.calib == 1.0);
  CHECK(cfg.stphase_calib == 2.0);
  CHECK(cfg.h_list.empty());
  CHECK(cfg.problem.r1.is_zero_constant());

  const auto sweep = config::parse_config(std::string(kBase) + "[sweep]\nh_list = 0.08, 0.05,0.02\n");
  CHECK(sweep.h_list == std::vector<double>{0.08, 0.05, 0.02});
  const auto quoted = config::parse_config(std::string(kBase) + "[oracle]\ntheta = \"0.25\"\n");
  CHECK(quoted.oracle.theta == 0.25);

  SUBCASE("missing required key names it") {
    std::string t = kBase;
    t.erase(t.find("e0 = 0.75\n"));
    CHECK(config_message(t).find("problem.e0") != std::string::npos);
  }
  SUBCASE("unknown keys and sections carry the line") {
    CHECK(config_line(std::string(kBase) + "bogus = 1\n") == 7);
    CHECK(config_line(std::string(kBase) + "[extra]\n") == 7);
    CHECK(config_message(std::string(kBase) + "bogus = 1\n").find("bogus") != std::string::npos);
  }
  SUBCASE("duplicate keys are rejected") { CHECK(config_line(std::string(kBase) + "e0 = 0.7\n") == 7); }
  SUBCASE("h_list must be strictly decreasing and positive") {
    CHECK(config_line(std::string(kBase) + "[sweep]\nh_list = 0.05, 0.05\n") == 8);
    CHECK(config_line(std::string(kBase) + "[sweep]\nh_list = 0.02, 0.05\n") == 8);
    CHECK(config_line(std::string(kBase) + "[sweep]\nh_list = 0.05, -0.01\n") == 8);
    CHECK(config_line(std::string(kBase) + "[sweep]\nh_list = 0.05,,0.01\n") == 8);
  }
  SUBCASE("expression syntax errors are config errors at the line") {
    std::string t = kBase;
    t.replace(t.find("r0 = 1"), 6, "r0 = (1+");
    CHECK(config_line(t) == 4);
  }
  SUBCASE("numeric values") {
    CHECK(config_line(std::string(kBase) + "[numerics]\ncalib = abc\n") == 8);
    CHECK(config_line(std::string(kBase) + "[oracle]\ntheta = 2\n") == 8);
    CHECK(config_line("key = 1\n") == 1);
  }
  CHECK(config::parse_list("1, 2.5,3e-2") == std::vector<double>{1, 2.5, 0.03});
  CHECK_THROWS_AS(config::parse_list("1, x", 4), ConfigError);
  CHECK_THROWS_AS(config::load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format::number(0.1) == "0.10000000000000001");
  CHECK(format::number(2.0) == "2");
  CHECK(std::stod(format::number(1.0 / 3.0)) == 1.0 / 3.0);
  format::Json j = format::Json::object();
  j.set("b", 1.5);
  j.set("a", std::nan(""));
  j.set("s", "q\"x");
  const auto parsed = nlohmann::json::parse(j.dump());
  CHECK(parsed["b"] == 1.5);
  CHECK(parsed["a"].is_null());
  CHECK(parsed["s"] == "q\"x");
  CHECK(j.dump().find("\"b\"") < j.dump().find("\"a\""));
}

TEST_CASE("subcommand dispatch") {
  const auto f0 = cwtest::fixture("f0");
  const auto harmonic = cwtest::fixture("harmonic");
  runner::Flags flags;

  auto analyze = runner::run_subcommand("analyze", &f0, flags);
  CHECK(analyze.exit_code == 0);
  const auto a = nlohmann::json::parse(analyze.body);
  CHECK(a["m0"] == 1);
  CHECK(a["crossings"].size() == 2);

  auto bad = runner::run_subcommand("analyze", &harmonic, flags);
  CHECK(bad.exit_code == runner::kValidation);
  CHECK(nlohmann::json::parse(bad.body)["status"] == "invalid");

  flags.h = 0.1;
  auto bs = runner::run_subcommand("bs", &harmonic, flags);
  REQUIRE(bs.exit_code == 0);
  CHECK(bs.csv);
  CHECK(bs.body.rfind("index,energy\n", 0) == 0);
  std::size_t pos = bs.body.find('\n') + 1;
  int rows = 0;
  while (pos < bs.body.size()) {
    const auto end = bs.body.find('\n', pos);
    const std::string line = bs.body.substr(pos, end - pos);
    const double e = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(e / 0.1 - (2 * std::round((e / 0.1 - 1) / 2) + 1)) < 1e-10);
    ++rows;
    pos = end + 1;
  }
  CHECK(rows == 2);

  auto again = runner::run_subcommand("analyze", &f0, runner::Flags{});
  CHECK(again.body == analyze.body);

  auto unknown = runner::run_subcommand("frobnicate", &f0, flags);
  CHECK(unknown.exit_code == runner::kUsage);
  CHECK(nlohmann::json::parse(unknown.body)["diagnostics"].size() == 1);

  auto no_cfg = runner::run_subcommand("bs", nullptr, flags);
  CHECK(no_cfg.exit_code == runner::kUsage);

  runner::Flags sp;
  sp.phi = "x^2";
  sp.h_list = {1e-3, 1e-4};
  auto st = runner::run_subcommand("stphase", nullptr, sp);
  REQUIRE(st.exit_code == 0);
  CHECK(st.body.rfind("h,numeric_re,numeric_im,asym_re,asym_im,ratio\n", 0) == 0);
  const auto rows_sp = runner::stphase(sp, 2.0, sp.h_list);
  REQUIRE(rows_sp.size() == 2);
  CHECK(std::abs(rows_sp[1].numeric / rows_sp[1].asym - 1.0) < 0.01);

  runner::Flags no_phi;
  CHECK(runner::run_subcommand("stphase", nullptr, no_phi).exit_code == runner::kUsage);

  runner::Flags wv;
  wv.h = 0.05;
  wv.variant = "bogus";
  CHECK(runner::run_subcommand("widths", &f0, wv).exit_code == runner::kUsage);
}

TEST_CASE("exit codes follow the error kind") {
  CHECK(runner::exit_code_for(ConfigError(3, "x")) == 1);
  CHECK(runner::exit_code_for(Error(ErrorKind::Validation, "ValidationFailed", "x")) == 2);
  CHECK(runner::exit_code_for(Error(ErrorKind::Topology, "TopologyChanged", "x")) == 2);
  CHECK(runner::exit_code_for(Error(ErrorKind::Numerical, "NewtonDiverged", "x")) == 3);
}

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "crosswidth/crosswidth.h"
#include "doctest.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const std::string kF0 = std::string(CW_FIXTURE_DIR) + "/f0.cfg";

}  // namespace

TEST_CASE("sessions") {
  CHECK(std::strlen(cw_version()) > 0);
  cw_session* s = nullptr;
  REQUIRE(cw_session_from_file(kF0.c_str(), &s) == CW_OK);
  REQUIRE(s != nullptr);
  cw_session_free(s);

  s = nullptr;
  REQUIRE(cw_session_from_string(read_file(kF0).c_str(), &s) == CW_OK);
  cw_session_free(s);

  cw_session* bad = nullptr;
  CHECK(cw_session_from_string("[problem]\nv1 = x^2\n", &bad) == CW_ERR_USAGE);
  CHECK(bad == nullptr);
  CHECK(std::string(cw_last_error()).find("missing required key") != std::string::npos);
  CHECK(cw_session_from_file("/nonexistent.cfg", &bad) == CW_ERR_USAGE);
  CHECK(cw_session_from_string(nullptr, &bad) == CW_ERR_USAGE);
  CHECK(cw_session_from_string("", nullptr) == CW_ERR_USAGE);
  cw_session_free(nullptr);
}

TEST_CASE("running subcommands") {
  cw_session* s = nullptr;
  REQUIRE(cw_session_from_file(kF0.c_str(), &s) == CW_OK);
  cw_run_flags flags;
  cw_flags_init(&flags);
  CHECK(flags.has_h == 0);
  CHECK(flags.m == 1);

  char* out = nullptr;
  int csv = -1;
  REQUIRE(cw_run(s, "analyze", &flags, &out, &csv) == CW_OK);
  CHECK(csv == 0);
  CHECK(std::string(out).find("\"m0\": 1") != std::string::npos);
  cw_string_free(out);

  flags.has_h = 1;
  flags.h = 0.05;
  REQUIRE(cw_run(s, "bs", &flags, &out, &csv) == CW_OK);
  CHECK(csv == 1);
  CHECK(std::string(out).rfind("index,energy", 0) == 0);
  cw_string_free(out);

  CHECK(cw_run(s, "nope", &flags, &out, &csv) == CW_ERR_USAGE);
  CHECK(std::string(out).find("diagnostics") != std::string::npos);
  cw_string_free(out);
  CHECK(cw_run(s, "analyze", &flags, nullptr, &csv) == CW_ERR_USAGE);
  CHECK(cw_run(nullptr, "analyze", &flags, &out, &csv) == CW_ERR_USAGE);
  cw_string_free(out);

  double a = 0.0;
  REQUIRE(cw_action_loop(s, 0.75, &a) == CW_OK);
  CHECK(a > 0.0);
  double d = -1.0;
  REQUIRE(cw_width_coefficient(s, 0.75, 0.05, 0, &d) == CW_OK);
  CHECK(d >= 0.0);
  CHECK(cw_width_coefficient(s, 0.75, -1.0, 0, &d) != CW_OK);
  CHECK(std::strlen(cw_last_error()) > 0);
  cw_session_free(s);

  cw_flags_init(&flags);
  flags.phi = "x^2";
  const double hl[] = {1e-3};
  flags.h_list = hl;
  flags.h_list_len = 1;
  REQUIRE(cw_run(nullptr, "stphase", &flags, &out, &csv) == CW_OK);
  CHECK(csv == 1);
  cw_string_free(out);
  cw_string_free(nullptr);
}

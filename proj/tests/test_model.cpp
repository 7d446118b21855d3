#include <algorithm>
#include <cmath>

#include "crosswidth/errors.hpp"
#include "crosswidth/model.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cw;
using model::Side;

namespace {

model::Problem problem(const char* v1, const char* v2, double e0, const char* r0 = "0.1", const char* r1 = "0") {
  model::Problem p;
  p.v1 = exprs::Expr::parse(v1);
  p.v2 = exprs::Expr::parse(v2);
  p.r0 = exprs::Expr::parse(r0);
  p.r1 = exprs::Expr::parse(r1);
  p.e0 = e0;
  return p;
}

bool check_passed(const model::StructureReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c.passed;
  FAIL("no check named " << name);
  return false;
}

}  // namespace

TEST_CASE("turning points of the harmonic well") {
  model::ToleranceSet tol;
  auto tps = model::turning_points(exprs::Expr::parse("x^2"), 1.0, {-10, 10}, tol, 1);
  REQUIRE(tps.size() == 2);
  CHECK(tps[0].x == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(tps[0].side == Side::Left);
  CHECK(tps[1].x == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(tps[1].side == Side::Right);
  CHECK(model::track_turning_point(exprs::Expr::parse("x^2"), 1.21, 1.0, Side::Right, tol) ==
        doctest::Approx(1.1).epsilon(1e-13));
}

TEST_CASE("F0 validates with two transversal crossings") {
  auto cfg = cwtest::fixture("f0");
  auto r = model::validate_structure(cfg.problem);
  REQUIRE(r.ok());
  CHECK(r.m0 == 1);
  REQUIRE(r.crossings.size() == 2);
  CHECK(r.crossings[0].x == doctest::Approx(-0.941454692629414626).epsilon(1e-10));
  CHECK(r.crossings[1].x == doctest::Approx(0.136735736412364439).epsilon(1e-10));
  for (const auto& c : r.crossings) {
    CHECK(c.m == 1);
    CHECK(c.xi == doctest::Approx(std::sqrt(0.75 - cfg.problem.v1.eval(c.x))).epsilon(1e-12));
  }
  // the coupling vanishes at the left crossing
  CHECK(std::abs(r.crossings[0].u_plus) < 1e-12);
  CHECK(std::abs(r.crossings[1].u_plus) > 0.1);
  // V2 < E0 on the whole line: one outgoing tail at each end
  CHECK(std::count_if(r.tails.begin(), r.tails.end(), [](const auto& t) { return t.outgoing; }) == 2);
}

TEST_CASE("F1 has a single double crossing at x = 0.3") {
  auto r = model::validate_structure(cwtest::fixture("f1").problem);
  REQUIRE(r.ok());
  CHECK(r.m0 == 2);
  REQUIRE(r.crossings.size() == 1);
  CHECK(r.crossings[0].x == doctest::Approx(0.3).epsilon(1e-12));
  // V2 - V1 = -(tanh x - t)^2, so V2'' - V1'' = -2 sech^4(0.3)
  CHECK(r.crossings[0].dv == doctest::Approx(-2.0 * std::pow(1.0 / std::cosh(0.3), 4)).epsilon(1e-6));
}

TEST_CASE("simple-model fixture is tangential at x = -1") {
  auto r = model::validate_structure(cwtest::fixture("simple_tangential").problem);
  REQUIRE(r.ok());
  CHECK(r.m0 == 2);
  REQUIRE(r.crossings.size() == 1);
  CHECK(r.crossings[0].x == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(r.v2_turning.size() == 1);
}

TEST_CASE("contact order equals the root multiplicity of a polynomial difference") {
  auto p = problem("x^2", "x^2-(x-0.3)^3", 1.0);
  auto r = model::validate_structure(p);
  REQUIRE(r.ok());
  REQUIRE(r.crossings.size() == 1);
  CHECK(r.crossings[0].m == 3);
  CHECK(r.crossings[0].x == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(r.crossings[0].dv == doctest::Approx(-6.0).epsilon(1e-4));
  CHECK_FALSE(check_passed(r, "asymptotic_window"));  // advisory only
}

TEST_CASE("structural failures are reported, not thrown") {
  SUBCASE("no well") {
    auto r = model::validate_structure(problem("x", "0", 0.5));
    CHECK_FALSE(r.ok());
    CHECK_FALSE(check_passed(r, "simple_well"));
    CHECK_THROWS_AS(model::require_valid(r), Error);
  }
  SUBCASE("bounded V2 component") {
    auto r = model::validate_structure(problem("1-1/cosh(x)^2", "(x^2-4)^2/10", 0.75));
    CHECK_FALSE(r.ok());
    CHECK_FALSE(check_passed(r, "v2_unbounded_components"));
  }
  SUBCASE("E0 at a threshold") {
    auto r = model::validate_structure(problem("1-1/cosh(x)^2", "0.75-0.0*tanh(x)", 0.75));
    CHECK_FALSE(r.ok());
  }
  SUBCASE("crossings above E0 only") {
    auto r = model::validate_structure(problem("x^2", "5-x", 1.0));
    CHECK_FALSE(r.ok());
    CHECK_FALSE(check_passed(r, "crossings"));
  }
}

TEST_CASE("coupling symbol") {
  auto p = problem("x^2", "1", 1.0, "x", "2*x");
  CHECK(p.coupling_symbol(0.5, 3.0) == exprs::cplx(0.5, 3.0));
  CHECK_FALSE(p.decoupled());
  CHECK(problem("x^2", "1", 1.0, "0", "0").decoupled());
}

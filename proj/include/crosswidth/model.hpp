#pragma once

#include <complex>
#include <string>
#include <vector>

#include "crosswidth/exprs.hpp"

namespace cw::model {

using exprs::cplx;
using exprs::Expr;

struct ToleranceSet {
  double root_tol = 1e-12;
  double contact_tol = 1e-9;
  double newton_tol = 1e-12;
  double quad_tol = 1e-11;
  double ode_tol = 1e-12;
  int scan_points = 4096;
  int k_max = exprs::kDefaultKMax;
};

struct Window {
  double lo = -10.0;
  double hi = 10.0;
};

struct Problem {
  Expr v1, v2, r0, r1;
  double e0 = 0.0;
  Window window;
  double box_l = 2.0;
  ToleranceSet tol;

  const Expr& potential(int channel) const { return channel == 1 ? v1 : v2; }
  // Symbol of the coupling, U(x, xi) = r0(x) + i r1(x) xi.
  cplx coupling_symbol(double x, double xi) const;
  bool decoupled() const { return r0.is_zero_constant() && r1.is_zero_constant(); }
};

enum class Side { Left, Right };  // which wall of its allowed interval

struct TurningPoint {
  double x = 0.0;
  int channel = 1;
  Side side = Side::Left;
};

struct CrossingPoint {
  double x = 0.0;
  double xi = 0.0;
  int m = 1;
  double dv = 0.0;  // V2^(m)(x) - V1^(m)(x)
  cplx u_plus, u_minus;
};

struct TailInfo {
  int direction = 1;  // +1 for x -> +inf, -1 for x -> -inf
  int xi_sign = 1;
  bool outgoing = false;
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  bool fatal = true;
  std::string detail;
};

struct StructureReport {
  TurningPoint a0, b0;
  std::vector<TurningPoint> v2_turning;
  std::vector<CrossingPoint> crossings;
  int m0 = 0;
  std::vector<TailInfo> tails;
  std::vector<AssumptionCheck> checks;

  bool ok() const;
  std::string failure_summary() const;
};

std::vector<TurningPoint> turning_points(const Expr& v, double energy, const Window& window,
                                         const ToleranceSet& tol, int channel = 1);

// Refines the turning point that sits near `guess` at a new energy.
double track_turning_point(const Expr& v, double energy, double guess, Side side, const ToleranceSet& tol);

std::vector<CrossingPoint> crossing_points(const Problem& p);
// Variant that takes the well walls explicitly, used by validate_structure.
std::vector<CrossingPoint> crossing_points(const Problem& p, double a0, double b0);

StructureReport validate_structure(const Problem& p);
// Throws a Validation error carrying the failed checks when !report.ok().
void require_valid(const StructureReport& report);

}  // namespace cw::model

#pragma once

#include <complex>
#include <functional>

#include "crosswidth/exprs.hpp"
#include "crosswidth/model.hpp"

namespace cw::quad {

using exprs::cplx;
using exprs::Expr;

// Action and its E-derivative over one monotone piece [lo, hi] of a channel,
// where either end may be a turning point (V(end) = E).
struct PieceAction {
  double s = 0.0;   // integral of sqrt(E - V)
  double ds = 0.0;  // integral of 1 / (2 sqrt(E - V))
  double error = 0.0;
};

PieceAction piece_action(const Expr& v, double energy, double lo, double hi, bool lo_turning, bool hi_turning,
                         double tol);

// Adaptive Gauss-Kronrod on a smooth integrand.
double integrate(const std::function<double(double)>& f, double a, double b, double tol, double* error = nullptr);

struct Well {
  double a = 0.0, b = 0.0;
};
Well well_at(const model::Problem& p, double energy);

double action_loop(const model::Problem& p, double energy);
double action_derivative(const model::Problem& p, double energy);

struct OscillatoryOptions {
  double tol = 1e-11;
  long node_budget = 2'000'000;
};

// Panel-resolved quadrature of sigma(x) exp(i phi(x) / h) over [a, b].
cplx oscillatory_integral(const std::function<cplx(double)>& sigma, const std::function<double(double)>& phi,
                          const std::function<double(double)>& dphi, double a, double b, double h,
                          const OscillatoryOptions& opts = {}, long* nodes_used = nullptr);

// Leading term of an interior stationary point of order m.
cplx stationary_phase(cplx sigma0, const exprs::TaylorJet& phi_jet, int m, double h, double calib = 2.0);

// mu_m of the stationary-phase constant: a phase for odd m, cos(pi/(2(m+1))) for even m.
cplx stationary_phase_mu(int m, double sign);

}  // namespace cw::quad

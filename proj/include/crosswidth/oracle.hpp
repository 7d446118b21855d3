#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "crosswidth/model.hpp"

namespace cw::oracle {

using exprs::cplx;
using model::Problem;

using State = Eigen::Matrix<cplx, 4, 1>;
using Basis = Eigen::Matrix<cplx, 4, 2>;

// Piecewise-ray exterior complex scaling contour: identity on [-R0, R0],
// rays R0 + (t - R0) e^{i theta} and -R0 + (t + R0) e^{i theta} outside.
struct Contour {
  double r0 = 0.0;
  double theta = 0.3;
  double x = 0.0;  // truncation: t in [-X, X]

  cplx zeta(double t) const;
  cplx dzeta(double t) const;
};

struct OracleOptions {
  double theta = 0.3;
  double x = 0.0;   // 0 selects the e^{-30} decay margin
  double r0 = 0.0;  // 0 selects max(|a0 - 1|, |b0 + 1|)
  double ode_tol = 1e-12;
  double theta_shift = 0.05;
  bool theta_check = true;
  bool green = true;
  int max_iter = 60;
};

// Contour for (p, h) with decay rates evaluated at Re E.
Contour make_contour(const Problem& p, const model::StructureReport& report, double h, double energy,
                     const OracleOptions& opts);

enum class End { Left, Right };

struct Propagation {
  Basis q;               // orthonormal basis of the end-decaying solutions at t = 0
  cplx log_det_r = 0.0;  // log det of the accumulated triangular factors
  // Recorded samples (when requested): abscissa t, per-sample basis in the
  // frame of its chunk, and the chunk index.
  std::vector<double> t;
  std::vector<Basis> phi;
  std::vector<int> chunk;
  std::vector<Eigen::Matrix2cd> r;  // r[j] maps chunk j's frame into chunk j+1's
};

// Shooting problem at fixed (p, h, contour). Boundary frames and the scale of
// W are fixed at a reference energy so that W is analytic in E.
class Shooter {
 public:
  Shooter(const Problem& p, double h, Contour c, double ode_tol, cplx reference);

  // dy/dt at contour parameter t for state y.
  Eigen::Matrix4cd generator(double t, cplx energy) const;
  // Basis of the solutions decaying towards the given end, normalized on the reference rows.
  Basis end_basis(cplx energy, End end) const;
  Propagation propagate(cplx energy, End end, bool record = false) const;
  cplx matching_determinant(cplx energy) const;

  const Contour& contour() const { return c_; }
  double h() const { return h_; }

 private:
  std::vector<double> nodes(End end) const;

  const Problem* p_;
  double h_;
  Contour c_;
  double ode_tol_;
  std::array<std::array<int, 2>, 2> rows_{};  // reference rows per end
  double scale_ = 0.0;                         // Re log of |W| scale at the reference
};

cplx matching_determinant(const Problem& p, cplx energy, double h, const Contour& c, double ode_tol = 1e-12);

struct MatchedState {
  std::vector<double> x;
  std::vector<State> y;  // (v1, h v1', v2, h v2')
  double spacing = 0.0;
};

// Globally outgoing solution at a (converged) resonance, sampled on the real segment [x1, x2].
MatchedState matched_state(const Shooter& s, cplx energy, double x1, double x2);

// Im z from the boundary flux over [x1, x2] and the L2 norm of w there.
double width_from_state(const Problem& p, double h, const MatchedState& w);

struct OracleResonance {
  cplx energy;
  double residual = 0.0;
  double h = 0.0;
  cplx seed;
  int iterations = 0;
  bool converged = false;
  std::optional<double> im_green;
  std::optional<double> im_theta_shifted;
  bool theta_consistent = true;
};

OracleResonance refine_resonance(const Problem& p, const model::StructureReport& report, cplx seed, double h,
                                 const OracleOptions& opts = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

ExponentFit exponent_fit(const std::vector<double>& h, const std::vector<double>& im);

}  // namespace cw::oracle

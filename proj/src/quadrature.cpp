#include "crosswidth/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "crosswidth/errors.hpp"

namespace cw::quad {

namespace {

constexpr double kPi = std::numbers::pi;

// (E - V(x)) / (x - t) for x near a turning point t with V(t) = E, from the
// Taylor jet of V at t: -sum_{k>=1} c_k (x - t)^(k-1).
double near_quotient(const exprs::TaylorJet& j, double d) {
  double acc = 0.0;
  for (int k = j.order(); k >= 1; --k) acc = acc * d + j.c[static_cast<std::size_t>(k)];
  return -acc;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol, double* error) {
  if (a == b) {
    if (error) *error = 0.0;
    return 0.0;
  }
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol, &err);
  if (error) *error = err;
  return v;
}

PieceAction piece_action(const Expr& v, double energy, double lo, double hi, bool lo_turning, bool hi_turning,
                         double tol) {
  PieceAction out;
  if (!(hi > lo)) return out;
  const double len = hi - lo;
  const double near = std::min(0.01 * len, 0.05);
  const double rel = 1e-13;
  double e1 = 0.0, e2 = 0.0;

  if (!lo_turning && !hi_turning) {
    auto fs = [&](double x) { return std::sqrt(std::max(energy - v.eval(x), 0.0)); };
    auto fd = [&](double x) { return 0.5 / std::sqrt(energy - v.eval(x)); };
    out.s = integrate(fs, lo, hi, rel, &e1);
    out.ds = integrate(fd, lo, hi, rel, &e2);
  } else if (lo_turning != hi_turning) {
    // x = t +- u^2 with t the turning end; g1 = (E - V) / |x - t| is smooth.
    const double t = lo_turning ? lo : hi;
    const double sgn = lo_turning ? 1.0 : -1.0;
    const auto jet = v.jet(t, 12);
    auto g1 = [&](double u) {
      double d = u * u;
      double x = t + sgn * d;
      double g = d < near ? sgn * near_quotient(jet, sgn * d) : (energy - v.eval(x)) / d;
      return std::max(g, 0.0);
    };
    const double umax = std::sqrt(len);
    auto fs = [&](double u) { return 2.0 * u * u * std::sqrt(g1(u)); };
    auto fd = [&](double u) { return 1.0 / std::sqrt(g1(u)); };
    // split where g1 switches to the Taylor quotient
    const double us = std::min(std::sqrt(near), umax);
    double e3 = 0.0, e4 = 0.0;
    out.s = integrate(fs, 0.0, us, rel, &e1) + integrate(fs, us, umax, rel, &e3);
    out.ds = integrate(fd, 0.0, us, rel, &e2) + integrate(fd, us, umax, rel, &e4);
    e1 += e3;
    e2 += e4;
  } else {
    // Both ends turn: x = mid + half sin(t), g = (E - V) / ((x - lo)(hi - x)).
    const double mid = 0.5 * (lo + hi), half = 0.5 * len;
    const auto jlo = v.jet(lo, 12), jhi = v.jet(hi, 12);
    auto g = [&](double t) {
      double s2 = std::sin(0.5 * t + 0.25 * kPi);
      double c2 = std::cos(0.5 * t + 0.25 * kPi);
      double dlo = 2.0 * half * s2 * s2;  // x - lo
      double dhi = 2.0 * half * c2 * c2;  // hi - x
      double r;
      if (dlo < near)
        r = near_quotient(jlo, dlo) / dhi;
      else if (dhi < near)
        r = -near_quotient(jhi, -dhi) / dlo;
      else
        r = (energy - v.eval(mid + half * std::sin(t))) / (dlo * dhi);
      return std::max(r, 0.0);
    };
    auto fs = [&](double t) {
      double c = std::cos(t);
      return half * half * c * c * std::sqrt(g(t));
    };
    auto fd = [&](double t) { return 0.5 / std::sqrt(g(t)); };
    const double ts = std::min(2.0 * std::asin(std::sqrt(std::min(near / len, 1.0))), 0.5 * kPi);
    const double cuts[4] = {-0.5 * kPi, ts - 0.5 * kPi, 0.5 * kPi - ts, 0.5 * kPi};
    for (int k = 0; k < 3; ++k) {
      if (!(cuts[k + 1] > cuts[k])) continue;
      double a = 0.0, b = 0.0;
      out.s += integrate(fs, cuts[k], cuts[k + 1], rel, &a);
      out.ds += integrate(fd, cuts[k], cuts[k + 1], rel, &b);
      e1 += a;
      e2 += b;
    }
  }
  out.error = std::max(e1, e2);
  (void)tol;
  return out;
}

Well well_at(const model::Problem& p, double energy) {
  auto tps = model::turning_points(p.v1, energy, p.window, p.tol, 1);
  if (tps.size() != 2 || tps[0].side != model::Side::Left)
    fail(ErrorKind::Numerical, "NoTurningPoints", "no simple well of V1 at E=" + std::to_string(energy));
  return {tps[0].x, tps[1].x};
}

namespace {

// Minimum of V1 over the window, refined from the scan grid.
double well_bottom(const model::Problem& p) {
  const int n = std::max(p.tol.scan_points, 16);
  const double dx = (p.window.hi - p.window.lo) / n;
  int best = 0;
  double vb = p.v1.eval(p.window.lo);
  for (int i = 1; i <= n; ++i) {
    double vi = p.v1.eval(p.window.lo + i * dx);
    if (vi < vb) {
      vb = vi;
      best = i;
    }
  }
  double x = p.window.lo + best * dx;
  for (int it = 0; it < 50; ++it) {
    auto j = p.v1.jet(x, 2);
    if (j.c[2] <= 0.0) break;
    double step = j.c[1] / (2.0 * j.c[2]);
    x -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return std::min(vb, p.v1.eval(x));
}

}  // namespace

double action_loop(const model::Problem& p, double energy) {
  if (energy <= well_bottom(p) + 1e-14) return 0.0;
  Well w = well_at(p, energy);
  return 2.0 * piece_action(p.v1, energy, w.a, w.b, true, true, p.tol.quad_tol).s;
}

double action_derivative(const model::Problem& p, double energy) {
  Well w = well_at(p, energy);
  return 2.0 * piece_action(p.v1, energy, w.a, w.b, true, true, p.tol.quad_tol).ds;
}

cplx oscillatory_integral(const std::function<cplx(double)>& sigma, const std::function<double(double)>& phi,
                          const std::function<double(double)>& dphi, double a, double b, double h,
                          const OscillatoryOptions& opts, long* nodes_used) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  if (!(b > a)) return 0.0;
  const double w_max = (b - a) / 32.0;
  const double w_min = 1e-3 * h;
  long nodes = 0;
  cplx total = 0.0;
  double x = a;
  while (x < b) {
    double w = std::min(w_max, b - x);
    for (int it = 0; it < 60; ++it) {
      double pm = std::max({std::abs(dphi(x)), std::abs(dphi(x + 0.5 * w)), std::abs(dphi(x + w))});
      double allowed = pm > 0.0 ? 2.0 * kPi * h / pm : w;
      if (w <= allowed) break;
      w = std::max(0.9 * allowed, w_min);
      if (w == w_min) break;
    }
    const double c = x + 0.5 * w, r = 0.5 * w;
    cplx panel = 0.0;
    auto term = [&](double t) { return sigma(t) * std::exp(cplx(0.0, phi(t) / h)); };
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (xs[k] == 0.0) {
        panel += ws[k] * term(c);
        ++nodes;
      } else {
        panel += ws[k] * (term(c - r * xs[k]) + term(c + r * xs[k]));
        nodes += 2;
      }
    }
    total += r * panel;
    if (nodes > opts.node_budget)
      fail(ErrorKind::Numerical, "BudgetExceeded",
           "oscillatory quadrature exceeded " + std::to_string(opts.node_budget) + " nodes");
    x += w;
  }
  if (nodes_used) *nodes_used = nodes;
  return total;
}

cplx stationary_phase_mu(int m, double sign) {
  const double q = kPi / (2.0 * (m + 1));
  if (m % 2 == 1) return std::exp(cplx(0.0, (sign > 0 ? 1.0 : -1.0) * q));
  return std::cos(q);
}

cplx stationary_phase(cplx sigma0, const exprs::TaylorJet& phi_jet, int m, double h, double calib) {
  if (m < 1 || phi_jet.order() < m + 1)
    fail(ErrorKind::Precondition, "PreconditionViolated", "phase jet must have order at least m+1");
  const double lead = phi_jet.c[static_cast<std::size_t>(m + 1)];
  if (lead == 0.0) fail(ErrorKind::Precondition, "PreconditionViolated", "phi^(m+1)(x0) vanishes");
  for (int k = 1; k <= m; ++k) {
    if (std::abs(phi_jet.c[static_cast<std::size_t>(k)]) > 1e-10 * std::max(1.0, std::abs(lead)))
      fail(ErrorKind::Precondition, "PreconditionViolated",
           "phi^(" + std::to_string(k) + ")(x0) does not vanish at the stationary point");
  }
  if (sigma0 == cplx(0.0)) return 0.0;
  const double p = 1.0 / (m + 1);
  // ((m+1)! / |phi^(m+1)|)^(1/(m+1)) = |c_{m+1}|^(-1/(m+1))
  cplx omega = stationary_phase_mu(m, lead) * sigma0 * std::pow(std::abs(lead), -p) * std::tgamma((m + 2.0) / (m + 1.0));
  return calib * omega * std::exp(cplx(0.0, phi_jet.c[0] / h)) * std::pow(h, p);
}

}  // namespace cw::quad

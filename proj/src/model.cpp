#include "crosswidth/model.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "crosswidth/errors.hpp"

namespace cw::model {

namespace {

template <class F>
double bracketed_root(F f, double lo, double hi, double flo, double fhi) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  boost::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double polish_root(const Expr& v, double energy, double x) {
  for (int it = 0; it < 3; ++it) {
    auto j = v.jet(x, 1);
    if (j.c[1] == 0.0) break;
    double dx = (j.c[0] - energy) / j.c[1];
    x -= dx;
    if (std::abs(dx) <= 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

cplx Problem::coupling_symbol(double x, double xi) const {
  return cplx(r0.eval(x), r1.eval(x) * xi);
}

std::vector<TurningPoint> turning_points(const Expr& v, double energy, const Window& window,
                                         const ToleranceSet& tol, int channel) {
  const int n = std::max(tol.scan_points, 16);
  const double dx = (window.hi - window.lo) / n;
  std::vector<double> xs(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = window.lo + i * dx;
    fs[i] = v.eval(xs[i]) - energy;
  }
  std::vector<TurningPoint> out;
  auto f = [&](double x) { return v.eval(x) - energy; };
  auto emit = [&](double root) {
    root = polish_root(v, energy, root);
    double slope = v.jet(root, 1).c[1];
    if (std::abs(slope) <= tol.contact_tol)
      fail(ErrorKind::Validation, "DegenerateTurningPoint",
           "V" + std::to_string(channel) + "' vanishes at the turning point x=" + fmt(root));
    if (!out.empty() && std::abs(out.back().x - root) < 1e-9) return;
    out.push_back({root, channel, slope < 0 ? Side::Left : Side::Right});
  };
  for (int i = 0; i < n; ++i) {
    if (fs[i] == 0.0 && i > 0) continue;  // handled by the preceding interval
    if (fs[i] == 0.0 || fs[i] * fs[i + 1] < 0.0) emit(bracketed_root(f, xs[i], xs[i + 1], fs[i], fs[i + 1]));
  }
  if (fs[n] == 0.0) emit(xs[n]);

  // Tangential contact with the energy level leaves no sign change; look for
  // interior minima of |V - E| that touch zero.
  const double scale = std::max(1.0, std::abs(energy));
  for (int i = 1; i < n; ++i) {
    if (!(fs[i - 1] * fs[i] > 0.0 && fs[i] * fs[i + 1] > 0.0)) continue;
    if (!(std::abs(fs[i]) <= std::abs(fs[i - 1]) && std::abs(fs[i]) <= std::abs(fs[i + 1]))) continue;
    double x = xs[i];
    for (int it = 0; it < 40; ++it) {
      auto j = v.jet(x, 2);
      if (j.c[2] == 0.0) break;
      double step = j.c[1] / (2.0 * j.c[2]);
      x = std::clamp(x - step, xs[i - 1], xs[i + 1]);
      if (std::abs(step) < 1e-15) break;
    }
    if (std::abs(v.eval(x) - energy) <= std::max(tol.root_tol, tol.contact_tol) * scale)
      fail(ErrorKind::Validation, "DegenerateTurningPoint",
           "V" + std::to_string(channel) + " touches the energy level tangentially at x=" + fmt(x));
  }
  std::sort(out.begin(), out.end(), [](const TurningPoint& a, const TurningPoint& b) { return a.x < b.x; });
  return out;
}

double track_turning_point(const Expr& v, double energy, double guess, Side side, const ToleranceSet& tol) {
  (void)tol;
  auto f = [&](double x) { return v.eval(x) - energy; };
  // Left walls have V decreasing through E, right walls increasing.
  const double dir = side == Side::Left ? -1.0 : 1.0;
  double f0 = f(guess);
  if (f0 == 0.0) return guess;
  // If V - E has the sign of the forbidden side, the root is towards the
  // allowed region, i.e. opposite to `dir`.
  const double towards = (f0 > 0.0) ? -dir : dir;
  double step = 1e-3;
  double a = guess, fa = f0;
  for (int it = 0; it < 60; ++it) {
    double b = guess + towards * step;
    double fb = f(b);
    if (fa * fb <= 0.0) {
      double lo = std::min(a, b), hi = std::max(a, b);
      double flo = lo == a ? fa : fb, fhi = hi == a ? fa : fb;
      return polish_root(v, energy, bracketed_root(f, lo, hi, flo, fhi));
    }
    a = b;
    fa = fb;
    step *= 2.0;
  }
  fail(ErrorKind::Numerical, "NoTurningPoints", "turning point near x=" + fmt(guess) + " lost at E=" + fmt(energy));
}

std::vector<CrossingPoint> crossing_points(const Problem& p) {
  auto tps = turning_points(p.v1, p.e0, p.window, p.tol, 1);
  if (tps.size() != 2)
    fail(ErrorKind::Validation, "NoWell", "V1 = E0 must have exactly two roots in the window");
  return crossing_points(p, tps[0].x, tps[1].x);
}

std::vector<CrossingPoint> crossing_points(const Problem& p, double a0, double b0) {
  const ToleranceSet& tol = p.tol;
  const int n = std::max(tol.scan_points, 16);
  const double dx = (b0 - a0) / n;
  auto delta = [&](double x) { return p.v1.eval(x) - p.v2.eval(x); };
  std::vector<double> xs(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = a0 + i * dx;
    fs[i] = delta(xs[i]);
  }

  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    if (fs[i] == 0.0 || fs[i] * fs[i + 1] < 0.0) roots.push_back(bracketed_root(delta, xs[i], xs[i + 1], fs[i], fs[i + 1]));
  }
  if (fs[n] == 0.0) roots.push_back(xs[n]);

  const double scale = std::max(1.0, std::abs(p.e0));
  for (int i = 1; i < n; ++i) {
    if (!(fs[i - 1] * fs[i] > 0.0 && fs[i] * fs[i + 1] > 0.0)) continue;
    if (!(std::abs(fs[i]) <= std::abs(fs[i - 1]) && std::abs(fs[i]) <= std::abs(fs[i + 1]))) continue;
    double x = xs[i];
    for (int it = 0; it < 60; ++it) {
      auto j1 = p.v1.jet(x, 2);
      auto j2 = p.v2.jet(x, 2);
      double d1 = j1.c[1] - j2.c[1], d2 = j1.c[2] - j2.c[2];
      if (d2 == 0.0) break;
      double step = d1 / (2.0 * d2);
      x = std::clamp(x - step, xs[i - 1], xs[i + 1]);
      if (std::abs(step) < 1e-16 * (1 + std::abs(x))) break;
    }
    if (std::abs(delta(x)) <= tol.root_tol * scale) roots.push_back(x);
  }

  std::sort(roots.begin(), roots.end());
  std::vector<CrossingPoint> out;
  for (double x : roots) {
    if (!out.empty() && std::abs(out.back().x - x) < 1e-7) continue;

    auto order_at = [&](double at) {
      auto j1 = p.v1.jet(at, tol.k_max, tol.k_max);
      auto j2 = p.v2.jet(at, tol.k_max, tol.k_max);
      for (int k = 1; k <= tol.k_max; ++k) {
        double d = j2.c[k] - j1.c[k];
        if (std::abs(d) > tol.contact_tol * std::max({1.0, std::abs(j1.c[k]), std::abs(j2.c[k])})) return k;
      }
      fail(ErrorKind::Validation, "ContactOrderOverflow",
           "V1 and V2 agree to order " + std::to_string(tol.k_max) + " at x=" + fmt(at));
    };

    int m = order_at(x);
    auto newton_on = [&](double start, int k) {
      // root of the k-th derivative of V1 - V2
      double y = start;
      for (int it = 0; it < 40; ++it) {
        auto j1 = p.v1.jet(y, k + 1, tol.k_max);
        auto j2 = p.v2.jet(y, k + 1, tol.k_max);
        double g = j1.derivative(k) - j2.derivative(k);
        double gp = j1.derivative(k + 1) - j2.derivative(k + 1);
        if (gp == 0.0) break;
        double step = g / gp;
        y -= step;
        if (std::abs(step) < 1e-16 * (1 + std::abs(y))) break;
      }
      return y;
    };
    x = newton_on(x, m - 1);
    m = order_at(x);
    // Cancellation limits the location of a multiple root; a nearby root of the
    // next derivative at which the lower ones also vanish reveals a higher order.
    while (m < tol.k_max) {
      const double y = newton_on(x, m);
      if (!(std::abs(y - x) <= 1e-6 * (1 + std::abs(x)))) break;
      const int next = order_at(y);
      if (next <= m) break;
      x = y;
      m = next;
    }

    double v1x = p.v1.eval(x);
    if (v1x >= p.e0 - tol.contact_tol)
      fail(ErrorKind::Validation, "CrossingAtTurningPoint", "crossing at x=" + fmt(x) + " is not below E0");
    CrossingPoint c;
    c.x = x;
    c.m = m;
    c.xi = std::sqrt(p.e0 - v1x);
    c.dv = p.v2.jet(x, m, tol.k_max).derivative(m) - p.v1.jet(x, m, tol.k_max).derivative(m);
    c.u_plus = p.coupling_symbol(x, c.xi);
    c.u_minus = p.coupling_symbol(x, -c.xi);
    out.push_back(c);
  }
  if (out.empty()) fail(ErrorKind::Validation, "NoCrossing", "V1 and V2 do not cross below E0 inside the well");
  return out;
}

bool StructureReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed || !c.fatal; });
}

std::string StructureReport::failure_summary() const {
  std::string s;
  for (const auto& c : checks) {
    if (c.passed || !c.fatal) continue;
    if (!s.empty()) s += "; ";
    s += c.name + ": " + c.detail;
  }
  return s;
}

StructureReport validate_structure(const Problem& p) {
  StructureReport rep;
  auto add = [&](std::string name, bool passed, std::string detail, bool fatal = true) {
    rep.checks.push_back({std::move(name), passed, fatal, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
      return true;
    } catch (const Error& e) {
      add(name, false, e.code() + ": " + e.what());
      return false;
    }
  };

  add("window", p.window.lo < p.window.hi && p.box_l > 0.0 && std::isfinite(p.e0),
      "requires x_min < x_max, L > 0 and finite E0");
  if (!rep.ok()) return rep;

  bool well_passed = false;
  guarded("simple_well", [&] {
    auto tps = turning_points(p.v1, p.e0, p.window, p.tol, 1);
    if (tps.size() != 2 || tps[0].side != Side::Left || tps[1].side != Side::Right) {
      add("simple_well", false, "V1 = E0 has " + std::to_string(tps.size()) + " roots in the window, expected a single well");
      return;
    }
    rep.a0 = tps[0];
    rep.b0 = tps[1];
    add("simple_well", true, "a0=" + fmt(rep.a0.x) + " b0=" + fmt(rep.b0.x));
    well_passed = true;
  });

  guarded("v2_turning_points", [&] {
    rep.v2_turning = turning_points(p.v2, p.e0, p.window, p.tol, 2);
    add("v2_turning_points", true, std::to_string(rep.v2_turning.size()) + " simple roots of V2 = E0");
  });

  const double lo = p.window.lo, hi = p.window.hi;
  const double v2lo = p.v2.eval(lo) - p.e0, v2hi = p.v2.eval(hi) - p.e0;
  const double v1lo = p.v1.eval(lo) - p.e0, v1hi = p.v1.eval(hi) - p.e0;
  {
    bool ok = std::min({std::abs(v2lo), std::abs(v2hi), std::abs(v1lo), std::abs(v1hi)}) > p.tol.contact_tol;
    add("energy_not_threshold", ok, "E0 must differ from the potentials at the window boundary");
  }
  {
    // Components of {V2 <= E0} between consecutive roots must reach the boundary.
    bool ok = true;
    std::string where;
    const auto& r = rep.v2_turning;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      if (r[i].side == Side::Left && r[i + 1].side == Side::Right) {
        ok = false;
        where = "[" + fmt(r[i].x) + ", " + fmt(r[i + 1].x) + "]";
      }
    }
    add("v2_unbounded_components", ok, ok ? "allowed region of V2 is a union of unbounded intervals"
                                          : "bounded classically allowed interval of V2 at " + where);
  }
  {
    double worst = 0.0;
    for (double x : {lo, hi})
      for (const Expr* v : {&p.v1, &p.v2}) worst = std::max(worst, std::abs(v->jet(x, 1).c[1]));
    add("asymptotic_window", worst <= 1e-5, "max |V_j'| at the window boundary = " + fmt(worst), false);
  }

  if (v2hi < 0.0) {
    rep.tails.push_back({+1, +1, true});
    rep.tails.push_back({+1, -1, false});
  }
  if (v2lo < 0.0) {
    rep.tails.push_back({-1, -1, true});
    rep.tails.push_back({-1, +1, false});
  }

  if (well_passed) {
    guarded("crossings", [&] {
      rep.crossings = crossing_points(p, rep.a0.x, rep.b0.x);
      for (const auto& c : rep.crossings) rep.m0 = std::max(rep.m0, c.m);
      add("crossings", true, std::to_string(rep.crossings.size()) + " crossing pair(s), m0=" + std::to_string(rep.m0));
    });
  }
  if (rep.crossings.empty() && std::none_of(rep.checks.begin(), rep.checks.end(),
                                            [](const AssumptionCheck& c) { return c.name == "crossings"; }))
    add("crossings", false, "not evaluated: the well check failed");
  return rep;
}

void require_valid(const StructureReport& report) {
  if (!report.ok()) fail(ErrorKind::Validation, "ValidationFailed", report.failure_summary());
}

}  // namespace cw::model

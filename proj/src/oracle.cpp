#include "crosswidth/oracle.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "crosswidth/errors.hpp"

namespace cw::oracle {

namespace {

using OdeState = std::array<cplx, 8>;

struct Coefficients {
  const Problem* p;
  bool has_r1;

  // Row-major generator (1/h)[[0,1,0,0],[V1-E,0,h r0,h r1],[0,0,0,1],[h r0 - h^2 r1', -h r1, V2-E, 0]].
  Eigen::Matrix4cd at(cplx z, cplx energy, double h) const {
    const cplx v1 = p->v1.eval(z), v2 = p->v2.eval(z), r0 = p->r0.eval(z);
    cplx r1 = 0.0, dr1 = 0.0;
    if (has_r1) {
      auto j = p->r1.jet(z, 1);
      r1 = j[0];
      dr1 = j[1];
    }
    Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
    a(0, 1) = 1.0;
    a(1, 0) = v1 - energy;
    a(1, 2) = h * r0;
    a(1, 3) = h * r1;
    a(2, 3) = 1.0;
    a(3, 0) = h * r0 - h * h * dr1;
    a(3, 1) = -h * r1;
    a(3, 2) = v2 - energy;
    return a / h;
  }
};

struct Rhs {
  const Coefficients* coef;
  const Contour* c;
  cplx energy;
  double h;
  double t_start;
  double dir;   // +1 when t increases with s
  cplx dzeta;   // fixed on the current interval

  void operator()(const OdeState& y, OdeState& dy, double s) const {
    const double t = t_start + dir * s;
    const Eigen::Matrix4cd a = coef->at(c->zeta(t), energy, h) * (dir * dzeta);
    for (int col = 0; col < 2; ++col)
      for (int i = 0; i < 4; ++i) {
        cplx acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += a(i, k) * y[static_cast<std::size_t>(4 * col + k)];
        dy[static_cast<std::size_t>(4 * col + i)] = acc;
      }
  }
};

void qr2(const Basis& y, Basis& q, Eigen::Matrix2cd& r) {
  Eigen::HouseholderQR<Basis> qr(y);
  q = qr.householderQ() * Basis::Identity();
  r = qr.matrixQR().topRows<2>().triangularView<Eigen::Upper>();
}

// Orthonormal basis of the generator's eigenvectors that decay towards the end.
Basis decaying_subspace(const Eigen::Matrix4cd& b, End end) {
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(b);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "EndCondition", "eigen-decomposition failed at the contour end");
  Basis s;
  int n = 0;
  for (int k = 0; k < 4; ++k) {
    const double re = es.eigenvalues()(k).real();
    const bool decays = end == End::Right ? re < 0.0 : re > 0.0;
    if (!decays) continue;
    if (n == 2) fail(ErrorKind::Numerical, "EndCondition", "more than two decaying modes at the contour end");
    s.col(n++) = es.eigenvectors().col(k);
  }
  if (n != 2) fail(ErrorKind::Numerical, "EndCondition", "fewer than two decaying modes at the contour end");
  Basis q;
  Eigen::Matrix2cd r;
  qr2(s, q, r);
  return q;
}

}  // namespace

cplx Contour::zeta(double t) const {
  const cplx e = std::polar(1.0, theta);
  if (t > r0) return r0 + (t - r0) * e;
  if (t < -r0) return -r0 + (t + r0) * e;
  return t;
}

cplx Contour::dzeta(double t) const {
  if (std::abs(t) > r0) return std::polar(1.0, theta);
  return 1.0;
}

Contour make_contour(const Problem& p, const model::StructureReport& report, double h, double energy,
                     const OracleOptions& opts) {
  Contour c;
  c.theta = opts.theta;
  c.r0 = opts.r0 > 0.0 ? opts.r0 : std::max(std::abs(report.a0.x - 1.0), std::abs(report.b0.x + 1.0));
  for (const auto& x : report.crossings) c.r0 = std::max(c.r0, std::abs(x.x) + 0.5);
  if (opts.x > 0.0) {
    c.x = opts.x;
  } else {
    double rate = std::numeric_limits<double>::infinity();
    for (double xe : {p.window.lo, p.window.hi})
      for (int ch = 1; ch <= 2; ++ch) {
        const double d = energy - p.potential(ch).eval(xe);
        const double r = d > 0 ? std::sqrt(d) * std::sin(c.theta) / h : std::sqrt(-d) * std::cos(c.theta) / h;
        rate = std::min(rate, r);
      }
    c.x = c.r0 + 30.0 / rate;
  }
  if (!(c.x > c.r0) || !(c.r0 > 0.0) || !(c.theta > 0.0))
    fail(ErrorKind::Precondition, "PreconditionViolated", "contour requires X > R0 > 0 and theta > 0");
  // Pole screen along both rays.
  const int n = 2000;
  for (int side = -1; side <= 1; side += 2)
    for (int k = 0; k <= n; ++k) {
      const double t = side * (c.r0 + (c.x - c.r0) * k / n);
      const cplx z = c.zeta(t);
      try {
        for (const exprs::Expr* e : {&p.v1, &p.v2, &p.r0, &p.r1}) {
          cplx v = e->eval(z);
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e8)
            fail(ErrorKind::Numerical, "PolesOnContour", "coefficient blows up near zeta=" + std::to_string(z.real()) +
                                                             "+" + std::to_string(z.imag()) + "i");
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain) throw;
        fail(ErrorKind::Numerical, "PolesOnContour", "coefficient undefined on the contour");
      }
    }
  return c;
}

Shooter::Shooter(const Problem& p, double h, Contour c, double ode_tol, cplx reference)
    : p_(&p), h_(h), c_(c), ode_tol_(ode_tol) {
  for (End end : {End::Left, End::Right}) {
    const double t = end == End::Right ? c_.x : -c_.x;
    Basis s = decaying_subspace(generator(t, reference), end);
    double best = -1.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double d = std::abs(s(i, 0) * s(j, 1) - s(j, 0) * s(i, 1));
        if (d > best) {
          best = d;
          rows_[end == End::Right][0] = i;
          rows_[end == End::Right][1] = j;
        }
      }
  }
  Propagation l = propagate(reference, End::Left), r = propagate(reference, End::Right);
  scale_ = (l.log_det_r + r.log_det_r).real();
}

Eigen::Matrix4cd Shooter::generator(double t, cplx energy) const {
  Coefficients coef{p_, !p_->r1.is_zero_constant()};
  return coef.at(c_.zeta(t), energy, h_) * c_.dzeta(t);
}

Basis Shooter::end_basis(cplx energy, End end) const {
  const double t = end == End::Right ? c_.x : -c_.x;
  Basis s = decaying_subspace(generator(t, energy), end);
  const auto& rw = rows_[end == End::Right];
  Eigen::Matrix2cd sub;
  sub << s(rw[0], 0), s(rw[0], 1), s(rw[1], 0), s(rw[1], 1);
  return s * sub.inverse();
}

std::vector<double> Shooter::nodes(End end) const {
  const double delta = h_ / 16.0;
  std::vector<double> t;
  const long inner = static_cast<long>(std::floor(c_.r0 / delta));
  for (long k = 0; k <= inner; ++k) t.push_back(k * delta);
  if (c_.r0 - t.back() > 1e-12 * delta) t.push_back(c_.r0);
  const long outer = static_cast<long>(std::ceil((c_.x - c_.r0) / delta));
  for (long k = 1; k <= outer; ++k) t.push_back(std::min(c_.r0 + k * delta, c_.x));
  // Propagation order: from the end towards 0.
  std::reverse(t.begin(), t.end());
  if (end == End::Left)
    for (auto& v : t) v = -v;
  return t;
}

Propagation Shooter::propagate(cplx energy, End end, bool record) const {
  using namespace boost::numeric::odeint;
  Coefficients coef{p_, !p_->r1.is_zero_constant()};
  const std::vector<double> t = nodes(end);
  Propagation out;
  Basis q;
  Eigen::Matrix2cd r;
  qr2(end_basis(energy, end), q, r);
  out.log_det_r = std::log(r(0, 0)) + std::log(r(1, 1));

  auto stepper = make_controlled(ode_tol_, ode_tol_, h_ / 6.0, runge_kutta_fehlberg78<OdeState>());
  OdeState y;
  auto load = [&](const Basis& b) {
    for (int col = 0; col < 2; ++col)
      for (int i = 0; i < 4; ++i) y[static_cast<std::size_t>(4 * col + i)] = b(i, col);
  };
  auto unload = [&]() {
    Basis b;
    for (int col = 0; col < 2; ++col)
      for (int i = 0; i < 4; ++i) b(i, col) = y[static_cast<std::size_t>(4 * col + i)];
    return b;
  };

  load(q);
  int chunk = 0, in_chunk = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (record) {
      out.t.push_back(t[k]);
      out.phi.push_back(unload());
      out.chunk.push_back(chunk);
    }
    const double ta = t[k], tb = t[k + 1];
    const double len = std::abs(tb - ta);
    Rhs rhs{&coef, &c_, energy, h_, ta, tb > ta ? 1.0 : -1.0, c_.dzeta(0.5 * (ta + tb))};
    try {
      integrate_adaptive(stepper, rhs, y, 0.0, len, std::min(len, h_ / 6.0));
    } catch (const std::exception& e) {
      fail(ErrorKind::Numerical, "StepUnderflow", std::string("ODE integration failed: ") + e.what());
    }
    const bool corner = std::abs(std::abs(tb) - c_.r0) < 1e-12;
    if (++in_chunk == 8 || corner || k + 2 == t.size()) {
      qr2(unload(), q, r);
      out.log_det_r += std::log(r(0, 0)) + std::log(r(1, 1));
      if (record) out.r.push_back(r);
      load(q);
      ++chunk;
      in_chunk = 0;
    }
  }
  if (record) {
    out.t.push_back(t.back());
    out.phi.push_back(q);
    out.chunk.push_back(chunk);
  }
  out.q = q;
  return out;
}

cplx Shooter::matching_determinant(cplx energy) const {
  Propagation l = propagate(energy, End::Left), r = propagate(energy, End::Right);
  Eigen::Matrix4cd m;
  m << l.q, r.q;
  return m.determinant() * std::exp(l.log_det_r + r.log_det_r - scale_);
}

cplx matching_determinant(const Problem& p, cplx energy, double h, const Contour& c, double ode_tol) {
  return Shooter(p, h, c, ode_tol, energy).matching_determinant(energy);
}

MatchedState matched_state(const Shooter& s, cplx energy, double x1, double x2) {
  Propagation pl = s.propagate(energy, End::Left, true), pr = s.propagate(energy, End::Right, true);
  Eigen::Matrix4cd m;
  m << pl.q, pr.q;
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(m, Eigen::ComputeFullV);
  const Eigen::Vector4cd n = svd.matrixV().col(3);

  auto coefficients = [](const Propagation& pg, Eigen::Vector2cd last) {
    const int chunks = static_cast<int>(pg.r.size());
    std::vector<Eigen::Vector2cd> c(static_cast<std::size_t>(chunks + 1));
    c[static_cast<std::size_t>(chunks)] = last;
    for (int j = chunks - 1; j >= 0; --j)
      c[static_cast<std::size_t>(j)] =
          pg.r[static_cast<std::size_t>(j)].triangularView<Eigen::Upper>().solve(c[static_cast<std::size_t>(j + 1)]);
    return c;
  };
  const auto cl = coefficients(pl, n.head<2>());
  const auto cr = coefficients(pr, -n.tail<2>());

  std::vector<std::pair<double, State>> samples;
  auto collect = [&](const Propagation& pg, const std::vector<Eigen::Vector2cd>& c, bool include_zero) {
    for (std::size_t k = 0; k < pg.t.size(); ++k) {
      const double t = pg.t[k];
      if (t < x1 - 1e-12 || t > x2 + 1e-12) continue;
      if (t == 0.0 && !include_zero) continue;
      samples.emplace_back(t, pg.phi[k] * c[static_cast<std::size_t>(pg.chunk[k])]);
    }
  };
  collect(pl, cl, true);
  collect(pr, cr, false);
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  MatchedState w;
  w.spacing = s.h() / 16.0;
  for (auto& [t, y] : samples) {
    w.x.push_back(t);
    w.y.push_back(y);
  }
  return w;
}

double width_from_state(const Problem& p, double h, const MatchedState& w) {
  std::size_t n = w.x.size();
  if (n < 3) fail(ErrorKind::Precondition, "PreconditionViolated", "matched state needs at least three samples");
  if ((n - 1) % 2 == 1) --n;  // Simpson needs an even number of intervals
  double norm = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double wk = (k == 0 || k + 1 == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    norm += wk * (std::norm(w.y[k](0)) + std::norm(w.y[k](2)));
  }
  norm *= w.spacing / 3.0;
  auto flux = [&](std::size_t k) {
    const State& y = w.y[k];
    const double r1 = p.r1.eval(w.x[k]);
    return std::imag(-h * y(1) * std::conj(y(0)) - h * y(3) * std::conj(y(2)) + h * h * r1 * y(2) * std::conj(y(0)));
  };
  return (flux(n - 1) - flux(0)) / norm;
}

namespace {

struct MullerResult {
  cplx root;
  cplx value;
  int iterations = 0;
  bool converged = false;
};

template <class F>
MullerResult muller(F f, cplx x0, cplx x1, cplx x2, double tol, double max_step, int max_iter) {
  cplx f0 = f(x0), f1 = f(x1), f2 = f(x2);
  MullerResult res;
  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    const cplx q = (x2 - x1) / (x1 - x0);
    const cplx a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
    const cplx b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
    const cplx c = (1.0 + q) * f2;
    const cplx disc = std::sqrt(b * b - 4.0 * a * c);
    const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    cplx x3 = den == cplx(0.0) ? x2 + (x2 - x1) : x2 - (x2 - x1) * 2.0 * c / den;
    if (std::abs(x3 - x2) > max_step) x3 = x2 + (x3 - x2) * (max_step / std::abs(x3 - x2));
    cplx f3;
    try {
      f3 = f(x3);
    } catch (const Error&) {
      break;
    }
    if (!std::isfinite(f3.real()) || !std::isfinite(f3.imag())) break;
    const double step = std::abs(x3 - x2);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    f2 = f3;
    if (step <= tol || f3 == cplx(0.0)) {
      res.converged = true;
      break;
    }
  }
  res.root = x2;
  res.value = f2;
  return res;
}

}  // namespace

OracleResonance refine_resonance(const Problem& p, const model::StructureReport& report, cplx seed, double h,
                                 const OracleOptions& opts) {
  const int m0 = std::max(report.m0, 1);
  const double hp = std::pow(h, (m0 + 3.0) / (m0 + 1.0));
  const double tol = std::max(1e-14, 1e-6 * hp);
  const Contour c = make_contour(p, report, h, seed.real(), opts);
  Shooter sh(p, h, c, opts.ode_tol, seed);
  auto w = [&](cplx e) { return sh.matching_determinant(e); };
  const double d = 0.05 * hp;
  MullerResult mr = muller(w, seed + d, seed - cplx(0.0, d), seed, tol, 0.25 * h, opts.max_iter);

  OracleResonance out;
  out.seed = seed;
  out.h = h;
  out.energy = mr.root;
  out.iterations = mr.iterations;
  out.converged = mr.converged;
  out.residual = std::abs(mr.value);
  if (!mr.converged) return out;

  if (opts.green) {
    const double x1 = std::max(report.a0.x - 0.75, -0.999 * c.r0);
    const double x2 = std::min(report.b0.x + 0.75, 0.999 * c.r0);
    out.im_green = width_from_state(p, h, matched_state(sh, out.energy, x1, x2));
  }
  if (opts.theta_check) {
    OracleOptions o2 = opts;
    o2.theta = opts.theta + opts.theta_shift;
    o2.theta_check = false;
    o2.green = false;
    OracleResonance r2 = refine_resonance(p, report, out.energy, h, o2);
    out.im_theta_shifted = r2.energy.imag();
    const double im = out.energy.imag();
    out.theta_consistent = r2.converged && std::abs(r2.energy.imag() - im) <= std::max(1e-3 * std::abs(im), 1e-12);
  }
  return out;
}

ExponentFit exponent_fit(const std::vector<double>& h, const std::vector<double>& im) {
  if (h.size() != im.size() || h.size() < 4)
    fail(ErrorKind::Precondition, "InsufficientData", "exponent_fit needs at least four (h, Im) pairs");
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(h[k] > 0.0) || im[k] == 0.0)
      fail(ErrorKind::Precondition, "InsufficientData", "exponent_fit needs positive h and nonzero Im");
    const double x = std::log(h[k]), y = std::log(std::abs(im[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  ExponentFit f;
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

}  // namespace cw::oracle

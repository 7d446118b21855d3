#include "crosswidth/semiclassics.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "crosswidth/errors.hpp"
#include "crosswidth/quadrature.hpp"

namespace cw::semi {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

template <class F>
double monotone_root(F f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

cplx omega(const model::CrossingPoint& c, int sign, double calib) {
  const int m = c.m;
  const double p = 1.0 / (m + 1);
  const double xi = sign * c.xi;
  cplx mu = quad::stationary_phase_mu(m, xi * c.dv);
  double mag = std::pow(2.0 * factorial(m + 1) / std::abs(c.dv), p) * std::pow(c.xi * c.xi, -0.5 * m * p) *
               std::tgamma((m + 2.0) / (m + 1.0));
  cplx u = sign > 0 ? c.u_plus : c.u_minus;
  return calib * mu * mag * std::conj(u);
}

model::CrossingPoint crossing_at(const Problem& p, const model::CrossingPoint& c, double energy) {
  model::CrossingPoint out = c;
  const double xi2 = energy - p.v1.eval(c.x);
  if (!(xi2 > 0.0)) fail(ErrorKind::Numerical, "CrossingAtTurningPoint", "crossing leaves the allowed region");
  out.xi = std::sqrt(xi2);
  out.u_plus = p.coupling_symbol(c.x, out.xi);
  out.u_minus = p.coupling_symbol(c.x, -out.xi);
  return out;
}

TransferMatrix transfer_matrix(const model::CrossingPoint& c, int sign, double h, double calib) {
  TransferMatrix tm;
  tm.h = h;
  const double scale = std::pow(h, 1.0 / (c.m + 1));
  cplx w = omega(c, sign, calib);
  tm.t[0][0] = 1.0;
  tm.t[1][1] = 1.0;
  tm.t[1][0] = -kI * w * scale;
  tm.t[0][1] = -kI * std::conj(w) * scale;
  return tm;
}

// ---------------------------------------------------------------- actions

GraphActions::GraphActions(const Graph& g, const Problem& p, double energy) : g_(&g), p_(&p), energy_(energy) {
  for (const auto& e : g.edges) {
    edges_.push_back(resolve(e.pieces));
    edge_pieces_.push_back(e.pieces);
  }
  for (const auto& t : g.tails) tails_.push_back(resolve(t.pieces));
}

std::vector<GraphActions::ResolvedPiece> GraphActions::resolve(const std::vector<geometry::Piece>& pieces) const {
  std::vector<ResolvedPiece> out;
  double total = 0.0;
  for (const auto& pc : pieces) total += pc.hi_x0 - pc.lo_x0;
  double acc = 0.0;
  for (const auto& pc : pieces) {
    const auto& v = p_->potential(pc.channel);
    ResolvedPiece r;
    r.lo = pc.lo_turning ? model::track_turning_point(v, energy_, pc.lo_x0, model::Side::Left, p_->tol) : pc.lo_x0;
    r.hi = pc.hi_turning ? model::track_turning_point(v, energy_, pc.hi_x0, model::Side::Right, p_->tol) : pc.hi_x0;
    for (double xe : {r.lo, r.hi})
      if ((xe == r.lo ? !pc.lo_turning : !pc.hi_turning) && !(v.eval(xe) < energy_))
        fail(ErrorKind::Numerical, "TopologyChanged",
             "energy " + std::to_string(energy_) + " leaves the allowed region of a trajectory piece fixed at E0");
    auto a = quad::piece_action(v, energy_, r.lo, r.hi, pc.lo_turning, pc.hi_turning, p_->tol.quad_tol);
    r.s = a.s;
    r.ds = a.ds;
    r.frac0 = total > 0 ? acc / total : 0.0;
    acc += pc.hi_x0 - pc.lo_x0;
    r.frac1 = total > 0 ? acc / total : 1.0;
    r.end_turning = pc.sign > 0 ? pc.hi_turning : pc.lo_turning;
    out.push_back(r);
  }
  if (!out.empty()) out.back().frac1 = 1.0;
  return out;
}

std::pair<double, double> GraphActions::edge_cumulative(int edge, double f) const {
  auto hit = cache_.find({edge, f});
  if (hit != cache_.end()) return hit->second;
  const auto& rp = edges_[static_cast<std::size_t>(edge)];
  const auto& pcs = edge_pieces_[static_cast<std::size_t>(edge)];
  double s = 0.0, ds = 0.0;
  for (std::size_t k = 0; k < rp.size(); ++k) {
    const auto& r = rp[k];
    if (f >= r.frac1) {
      s += r.s;
      ds += r.ds;
      continue;
    }
    if (f <= r.frac0) break;
    const auto& pc = pcs[k];
    const double q = (f - r.frac0) / (r.frac1 - r.frac0);
    const auto& v = p_->potential(pc.channel);
    quad::PieceAction part;
    if (pc.sign > 0) {
      double x = r.lo + q * (r.hi - r.lo);
      part = quad::piece_action(v, energy_, r.lo, x, pc.lo_turning, false, p_->tol.quad_tol);
    } else {
      double x = r.hi - q * (r.hi - r.lo);
      part = quad::piece_action(v, energy_, x, r.hi, false, pc.hi_turning, p_->tol.quad_tol);
    }
    s += part.s;
    ds += part.ds;
    break;
  }
  cache_[{edge, f}] = {s, ds};
  return {s, ds};
}

std::pair<double, double> GraphActions::edge_total(int edge) const {
  double s = 0.0, ds = 0.0;
  for (const auto& r : edges_[static_cast<std::size_t>(edge)]) {
    s += r.s;
    ds += r.ds;
  }
  return {s, ds};
}

std::pair<double, double> GraphActions::tail_total(int tail) const {
  double s = 0.0, ds = 0.0;
  for (const auto& r : tails_[static_cast<std::size_t>(tail)]) {
    s += r.s;
    ds += r.ds;
  }
  return {s, ds};
}

int GraphActions::turning_between(int edge, double f0, double f1) const {
  int n = 0;
  for (const auto& r : edges_[static_cast<std::size_t>(edge)])
    if (r.end_turning && r.frac1 > f0 && r.frac1 <= f1) ++n;
  return n;
}

// ------------------------------------------------------------- amplitudes

static void require_positive_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorKind::Precondition, "PreconditionViolated", "h must be positive");
}

AmplitudeModel::AmplitudeModel(const Graph& g, const Problem& p, cplx energy, double h, AmplitudeOptions opts)
    : g_(&g), p_(&p), energy_(energy), h_(h), opts_(std::move(opts)), actions_(g, p, energy.real()) {
  require_positive_h(h);
  for (const auto& v : g.vertices)
    transfer_.push_back(
        transfer_matrix(crossing_at(p, g.crossings[static_cast<std::size_t>(v.crossing)], energy.real()), v.sign, h,
                        opts_.calib));
}

double AmplitudeModel::base(int edge) const {
  if (!opts_.base_fraction.empty()) return opts_.base_fraction[static_cast<std::size_t>(edge)];
  return g_->edges[static_cast<std::size_t>(edge)].base_fraction;
}

cplx AmplitudeModel::phase(double s, double ds, int nu) const {
  // First-order continuation S(E) = S(Re E) + i Im E S'(Re E).
  return std::exp(cplx(-energy_.imag() * ds / h_, s / h_ - 0.5 * kPi * nu));
}

cplx AmplitudeModel::step(int edge, double f0, double f1) const {
  auto cum = [&](double f) -> std::pair<double, double> {
    if (f <= 0.0) return {0.0, 0.0};
    if (f >= 1.0) return actions_.edge_total(edge);
    return actions_.edge_cumulative(edge, f);
  };
  auto [s0, d0] = cum(f0);
  auto [s1, d1] = cum(f1);
  return phase(s1 - s0, d1 - d0, actions_.turning_between(edge, f0, f1));
}

cplx AmplitudeModel::tail_step(int tail) const {
  auto [s, ds] = actions_.tail_total(tail);
  return phase(s, ds, 0);
}

cplx AmplitudeModel::tau(int vertex, int ch_out, int ch_in) const {
  return transfer_[static_cast<std::size_t>(vertex)].t[static_cast<std::size_t>(ch_out - 1)][static_cast<std::size_t>(ch_in - 1)];
}

cplx AmplitudeModel::path_amplitude(const PathSeq& path) const {
  const auto& E = g_->edges;
  int first = path.edges.front();
  cplx amp = step(first, base(first), 1.0);
  for (std::size_t k = 1; k < path.edges.size(); ++k) {
    const auto& prev = E[static_cast<std::size_t>(path.edges[k - 1])];
    const auto& cur = E[static_cast<std::size_t>(path.edges[k])];
    amp *= tau(prev.target, cur.channel, prev.channel) * step(cur.id, 0.0, 1.0);
  }
  if (path.tail >= 0) {
    const auto& last = E[static_cast<std::size_t>(path.edges.back())];
    amp *= tau(last.target, 2, last.channel) * tail_step(path.tail);
  }
  return amp;
}

cplx AmplitudeModel::cycle_amplitude(const PathSeq& cycle) const {
  const auto& E = g_->edges;
  cplx amp = 1.0;
  const std::size_t n = cycle.edges.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& cur = E[static_cast<std::size_t>(cycle.edges[k])];
    const auto& next = E[static_cast<std::size_t>(cycle.edges[(k + 1) % n])];
    amp *= step(cur.id, 0.0, 1.0) * tau(cur.target, next.channel, cur.channel);
  }
  return amp;
}

cplx AmplitudeModel::monodromy_entry(int e_to, int e_from) const {
  const auto& to = g_->edges[static_cast<std::size_t>(e_to)];
  const auto& from = g_->edges[static_cast<std::size_t>(e_from)];
  if (to.source != from.target) return 0.0;
  return step(e_from, base(e_from), 1.0) * tau(from.target, to.channel, from.channel) * step(e_to, 0.0, base(e_to));
}

Eigen::MatrixXcd AmplitudeModel::monodromy() const {
  const int n = g_->num_edges();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cplx> head(static_cast<std::size_t>(n)), tailp(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    head[static_cast<std::size_t>(e)] = step(e, 0.0, base(e));
    tailp[static_cast<std::size_t>(e)] = step(e, base(e), 1.0);
  }
  for (int to = 0; to < n; ++to) {
    const auto& et = g_->edges[static_cast<std::size_t>(to)];
    for (int from = 0; from < n; ++from) {
      const auto& ef = g_->edges[static_cast<std::size_t>(from)];
      if (et.source != ef.target) continue;
      m(to, from) = tailp[static_cast<std::size_t>(from)] * tau(ef.target, et.channel, ef.channel) *
                    head[static_cast<std::size_t>(to)];
    }
  }
  return m;
}

Eigen::MatrixXcd monodromy(const Graph& g, const Problem& p, cplx energy, double h, const AmplitudeOptions& opts) {
  return AmplitudeModel(g, p, energy, h, opts).monodromy();
}

cplx det_i_minus_m(const Graph& g, const Problem& p, cplx energy, double h, const AmplitudeOptions& opts) {
  Eigen::MatrixXcd m = monodromy(g, p, energy, h, opts);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m.rows(), m.cols()) - m;
  return a.partialPivLu().determinant();
}

// ------------------------------------------------------ Bohr-Sommerfeld

std::vector<double> bohr_sommerfeld(const Problem& p, double h) {
  require_positive_h(h);
  const double lo = p.e0 - p.box_l * h, hi = p.e0 + p.box_l * h;
  const double alo = quad::action_loop(p, lo), ahi = quad::action_loop(p, hi);
  // A(E) = (2k+1) pi h
  const long kmin = static_cast<long>(std::ceil((alo / (kPi * h) - 1.0) / 2.0));
  const long kmax = static_cast<long>(std::floor((ahi / (kPi * h) - 1.0) / 2.0));
  std::vector<double> out;
  for (long k = kmin; k <= kmax; ++k) {
    const double target = (2.0 * k + 1.0) * kPi * h;
    auto f = [&](double e) { return quad::action_loop(p, e) - target; };
    double r = monotone_root(f, lo, hi);
    if (r >= lo && r <= hi) out.push_back(r);
  }
  return out;
}

int nearest_seed_index(const std::vector<double>& grid, double e0) {
  if (grid.empty()) fail(ErrorKind::Numerical, "EmptyGrid", "the Bohr-Sommerfeld grid is empty");
  int best = 0;
  for (int i = 1; i < static_cast<int>(grid.size()); ++i)
    if (std::abs(grid[static_cast<std::size_t>(i)] - e0) < std::abs(grid[static_cast<std::size_t>(best)] - e0)) best = i;
  return best;
}

// ------------------------------------------------------- pseudo-resonances

PseudoResonance newton_pseudo(const Graph& g, const Problem& p, double h, double seed, const AmplitudeOptions& opts) {
  const double box = p.box_l * h;
  auto f = [&](cplx e) { return det_i_minus_m(g, p, e, h, opts); };
  // Trial evaluations outside the usable energy range count as a residual increase.
  auto trial = [&](cplx e) -> cplx {
    if (std::abs(e.real() - p.e0) > 2.0 * box || std::abs(e.imag()) > 2.0 * box)
      return std::numeric_limits<double>::infinity();
    try {
      return f(e);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  PseudoResonance r;
  r.seed = seed;
  cplx e = seed;
  cplx fe = f(e);
  const double delta = 1e-3 * h;
  for (int it = 0; it < 50; ++it) {
    r.newton_iters = it;
    if (std::abs(fe) <= p.tol.newton_tol) {
      r.converged = true;
      break;
    }
    cplx df = (f(e + delta) - f(e - delta)) / (2.0 * delta);
    if (df == cplx(0.0)) break;
    cplx stepv = fe / df;
    if (std::abs(stepv) > box) stepv *= box / std::abs(stepv);
    double lambda = 1.0;
    cplx en = e - stepv, fn = trial(en);
    for (int k = 0; k < 30 && !(std::abs(fn) < std::abs(fe)); ++k) {
      lambda *= 0.5;
      en = e - lambda * stepv;
      fn = trial(en);
    }
    if (!(std::abs(fn) < std::abs(fe))) break;
    const double moved = std::abs(en - e);
    e = en;
    fe = fn;
    if (moved <= 4e-16 * std::max(1.0, std::abs(e))) {
      r.newton_iters = it + 1;
      break;
    }
  }
  r.converged = std::abs(fe) <= p.tol.newton_tol;
  r.energy = e;
  r.residual = std::abs(fe);
  return r;
}

int argument_principle_count(const Graph& g, const Problem& p, double h, int nodes, const AmplitudeOptions& opts) {
  const double d = p.box_l * h;
  const cplx corners[4] = {cplx(p.e0 - d, -d), cplx(p.e0 + d, -d), cplx(p.e0 + d, d), cplx(p.e0 - d, d)};
  const int per_side = std::max(nodes / 4, 8);
  double winding = 0.0;
  cplx prev = det_i_minus_m(g, p, corners[0], h, opts);
  for (int side = 0; side < 4; ++side) {
    cplx a = corners[side], b = corners[(side + 1) % 4];
    for (int k = 1; k <= per_side; ++k) {
      cplx z = a + (b - a) * (static_cast<double>(k) / per_side);
      cplx cur = det_i_minus_m(g, p, z, h, opts);
      if (cur == cplx(0.0)) fail(ErrorKind::Numerical, "ZeroOnContour", "det(I-M) vanishes on the box boundary");
      winding += std::arg(cur / prev);
      prev = cur;
    }
  }
  return static_cast<int>(std::lround(winding / (2.0 * kPi)));
}

PseudoResult pseudo_resonances(const Graph& g, const Problem& p, double h, const AmplitudeOptions& opts,
                               bool with_argument_count) {
  PseudoResult out;
  const auto seeds = bohr_sommerfeld(p, h);
  const double d = p.box_l * h;
  for (double s : seeds) {
    PseudoResonance r = newton_pseudo(g, p, h, s, opts);
    for (const auto& q : out.roots)
      if (!q.duplicate && std::abs(q.energy - r.energy) < h * h) r.duplicate = true;
    out.roots.push_back(r);
    if (r.converged && !r.duplicate && std::abs(r.energy.real() - p.e0) <= d && std::abs(r.energy.imag()) <= d)
      ++out.distinct_in_box;
  }
  if (with_argument_count) out.argument_count = argument_principle_count(g, p, h, 4096, opts);
  return out;
}

// ------------------------------------------------------------------ widths

Eigen::VectorXcd amplitude_vector(const AmplitudeModel& am, int e0, std::vector<std::string>* warnings) {
  const Graph& g = am.graph();
  if (e0 < 0) e0 = g.e0;
  Eigen::MatrixXcd mt = am.monodromy();
  mt.row(e0).setZero();
  const int n = g.num_edges();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n) - mt;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(e0) = 1.0;
  if (warnings) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(mt, false);
    double rho = es.eigenvalues().cwiseAbs().maxCoeff();
    if (rho >= 1.0) warnings->push_back("spectral radius of the reduced monodromy is " + std::to_string(rho));
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  if (lu.isInvertible()) return lu.solve(rhs);
  // Degenerate system: least squares with the normalization alpha_{e0} = 1 appended.
  Eigen::MatrixXcd aug(n + 1, n);
  aug << a, Eigen::MatrixXcd::Zero(1, n);
  aug(n, e0) = 1.0;
  Eigen::VectorXcd rhs_aug(n + 1);
  rhs_aug << rhs, 1.0;
  if (warnings) warnings->push_back("singular (I - M~); least-squares amplitude vector used");
  return aug.completeOrthogonalDecomposition().solve(rhs_aug);
}

WidthBreakdown width_coefficient(const Graph& g, const Problem& p, double energy, double h, WidthVariant variant,
                                 const AmplitudeOptions& opts, int e0) {
  if (e0 < 0) e0 = g.e0;
  WidthBreakdown wb;
  wb.energy = energy;
  wb.h = h;
  wb.variant = variant;
  AmplitudeModel am(g, p, energy, h, opts);
  const double a_prime = std::abs(quad::action_derivative(p, p.e0));
  const double pref = std::pow(h, -2.0 / (g.m0 + 1)) / (2.0 * a_prime);
  Eigen::VectorXcd alpha;
  if (variant == WidthVariant::Full) alpha = amplitude_vector(am, e0, &wb.warnings);
  double sum = 0.0;
  for (int t : geometry::outgoing_tails(g)) {
    cplx amp = 0.0;
    if (variant == WidthVariant::OneSwitch) {
      std::vector<cplx> per_path;
      for (const auto& path : geometry::paths_bounded(g, t, 1, e0)) {
        if (path.switch_count != 1) continue;
        cplx a = am.path_amplitude(path);
        per_path.push_back(a);
        amp += a;
      }
      wb.path_amplitudes.push_back(std::move(per_path));
    } else {
      const auto& tail = g.tails[static_cast<std::size_t>(t)];
      const int v = tail.attach;
      for (int c = 0; c < 2; ++c) {
        const auto& l = g.in[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)];
        if (l.kind != geometry::Link::EdgeLink) continue;
        amp += alpha(l.id) * am.step(l.id, am.base(l.id), 1.0) * am.tau(v, 2, c + 1);
      }
      amp *= am.tail_step(t);
    }
    wb.tails.push_back(t);
    wb.tail_amplitudes.push_back(amp);
    sum += std::norm(amp);
  }
  wb.d = pref * sum;
  return wb;
}

// --------------------------------------------------------- simple model

SimpleModel simple_model(const Graph& g) {
  if (!geometry::is_simple_model(g))
    fail(ErrorKind::Topology, "TopologyMismatch", "the graph does not have the single-crossing simple-model topology");
  SimpleModel sm;
  for (const auto& e : g.edges) {
    if (e.channel != 2 || e.turning_count != 1) continue;
    sm.crossing_sign_far = g.vertices[static_cast<std::size_t>(e.source)].sign;
    for (const auto& pc : e.pieces)
      if (pc.hi_turning) sm.turn_right = true;
      else if (pc.lo_turning) sm.turn_right = false;
  }
  return sm;
}

double s_gamma(const Graph& g, const Problem& p, double energy) {
  SimpleModel sm = simple_model(g);
  const double xc = g.crossings.front().x;
  quad::Well w = quad::well_at(p, energy);
  auto roots = model::turning_points(p.v2, energy, p.window, p.tol, 2);
  double c = 0.0;
  bool found = false;
  for (const auto& r : roots) {
    if (sm.turn_right && r.x > xc && (!found || r.x < c)) {
      c = r.x;
      found = true;
    }
    if (!sm.turn_right && r.x < xc && (!found || r.x > c)) {
      c = r.x;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::Numerical, "NoTurningPoints", "Gamma2 turning point lost");
  const double tol = p.tol.quad_tol;
  if (sm.turn_right) {
    return 2.0 * quad::piece_action(p.v1, energy, w.a, xc, true, false, tol).s +
           2.0 * quad::piece_action(p.v2, energy, xc, c, false, true, tol).s;
  }
  return 2.0 * quad::piece_action(p.v1, energy, xc, w.b, false, true, tol).s +
         2.0 * quad::piece_action(p.v2, energy, c, xc, true, false, tol).s;
}

namespace {

cplx eta(const model::CrossingPoint& c, int far_sign, double calib) {
  const int m = c.m;
  cplx mu = quad::stationary_phase_mu(m, far_sign * c.xi * c.dv);
  return calib * mu * std::tgamma((m + 2.0) / (m + 1.0)) * std::pow(2.0 * factorial(m + 1) / std::abs(c.dv), 1.0 / (m + 1));
}

}  // namespace

double closed_form_width_example(const Graph& g, const Problem& p, double energy, double h, double calib) {
  SimpleModel sm = simple_model(g);
  const auto c = crossing_at(p, g.crossings.front(), energy);
  const int m = c.m;
  const cplx u_far = sm.crossing_sign_far > 0 ? c.u_plus : c.u_minus;
  const double sg = s_gamma(g, p, energy);
  const double a_prime = std::abs(quad::action_derivative(p, p.e0));
  const double im = std::imag(eta(c, sm.crossing_sign_far, calib) * std::conj(u_far) * std::exp(cplx(0.0, sg / (2.0 * h))));
  return 2.0 * std::pow(c.xi * c.xi, -static_cast<double>(m) / (m + 1)) / a_prime * im * im;
}

std::vector<double> vanishing_energies(const Graph& g, const Problem& p, double h, double lo, double hi) {
  SimpleModel sm = simple_model(g);
  const auto& c0 = g.crossings.front();
  const double eta_arg = 2.0 * std::arg(eta(c0, sm.crossing_sign_far, 1.0));
  auto phase = [&](double e) {
    const auto c = crossing_at(p, c0, e);
    const cplx u_far = sm.crossing_sign_far > 0 ? c.u_plus : c.u_minus;
    if (u_far == cplx(0.0)) return std::numeric_limits<double>::quiet_NaN();
    return s_gamma(g, p, e) / h + eta_arg - 2.0 * std::arg(u_far);
  };
  const double flo = phase(lo), fhi = phase(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) return {};
  std::vector<double> out;
  for (long k = static_cast<long>(std::ceil(flo / (2 * kPi))); k <= static_cast<long>(std::floor(fhi / (2 * kPi))); ++k) {
    const double target = 2 * kPi * k;
    out.push_back(monotone_root([&](double e) { return phase(e) - target; }, lo, hi));
  }
  return out;
}

double width_exponent(int m0) { return (m0 + 3.0) / (m0 + 1.0); }

std::vector<ResonanceRecord> resonance_table(const Graph& g, const Problem& p, double h, const AmplitudeOptions& opts) {
  std::vector<ResonanceRecord> out;
  for (double seed : bohr_sommerfeld(p, h)) {
    ResonanceRecord r;
    r.seed = seed;
    r.h = h;
    r.m0 = g.m0;
    PseudoResonance pr = newton_pseudo(g, p, h, seed, opts);
    r.pseudo = pr.energy;
    r.pseudo_converged = pr.converged;
    r.d = width_coefficient(g, p, seed, h, WidthVariant::OneSwitch, opts).d;
    r.im_pred = -r.d * std::pow(h, width_exponent(g.m0));
    out.push_back(r);
  }
  return out;
}

}  // namespace cw::semi

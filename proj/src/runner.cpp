#include "crosswidth/runner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "crosswidth/errors.hpp"
#include "crosswidth/geometry.hpp"
#include "crosswidth/quadrature.hpp"

namespace cw::runner {

using exprs::cplx;

namespace {

using format::Json;
using format::number;

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Config: return "config";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::Internal: return "internal";
  }
  return "internal";
}

const char* side_name(model::Side s) { return s == model::Side::Left ? "left" : "right"; }

Json turning_json(const model::TurningPoint& t) {
  Json j = Json::object();
  j.set("x", t.x);
  j.set("channel", t.channel);
  j.set("side", side_name(t.side));
  return j;
}

Json edges_json(const std::vector<int>& edges) {
  Json j = Json::array();
  for (int e : edges) j.push(e);
  return j;
}

semi::AmplitudeOptions amp_options(const config::RunConfig& cfg) {
  semi::AmplitudeOptions o;
  o.calib = cfg.calib;
  return o;
}

double pick_h(const config::RunConfig& cfg, const Flags& f) {
  if (f.h) return *f.h;
  if (!f.h_list.empty()) return f.h_list.front();
  if (!cfg.h_list.empty()) return cfg.h_list.front();
  throw ConfigError(0, "no h given: pass --h or set [sweep] h_list");
}

std::vector<double> pick_list(const config::RunConfig* cfg, const Flags& f) {
  if (!f.h_list.empty()) return f.h_list;
  if (cfg && !cfg->h_list.empty()) return cfg->h_list;
  throw ConfigError(0, "no h list given: pass --h-list or set [sweep] h_list");
}

struct Prepared {
  model::StructureReport report;
  geometry::Graph graph;
};

Prepared prepare(const config::RunConfig& cfg) {
  Prepared pr;
  pr.report = model::validate_structure(cfg.problem);
  model::require_valid(pr.report);
  pr.graph = geometry::build_graph(cfg.problem, pr.report);
  return pr;
}

Output analyze(const config::RunConfig& cfg) {
  const auto& p = cfg.problem;
  const auto report = model::validate_structure(p);
  Json j = Json::object();
  j.set("status", report.ok() ? "ok" : "invalid");
  j.set("e0", p.e0);
  j.set("m0", report.m0);
  j.set("a0", turning_json(report.a0));
  j.set("b0", turning_json(report.b0));
  Json v2 = Json::array();
  for (const auto& t : report.v2_turning) v2.push(turning_json(t));
  j.set("v2_turning", std::move(v2));
  Json cr = Json::array();
  for (const auto& c : report.crossings) {
    Json x = Json::object();
    x.set("x", c.x);
    x.set("xi", c.xi);
    x.set("m", c.m);
    x.set("dv", c.dv);
    x.set("u_plus_re", c.u_plus.real());
    x.set("u_plus_im", c.u_plus.imag());
    x.set("u_minus_re", c.u_minus.real());
    x.set("u_minus_im", c.u_minus.imag());
    cr.push(std::move(x));
  }
  j.set("crossings", std::move(cr));
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json x = Json::object();
    x.set("name", c.name);
    x.set("passed", c.passed);
    x.set("fatal", c.fatal);
    x.set("detail", c.detail);
    checks.push(std::move(x));
  }
  j.set("checks", std::move(checks));
  if (!report.ok()) {
    Json d = Json::array();
    Json e = Json::object();
    e.set("code", "ValidationFailed");
    e.set("kind", "validation");
    e.set("message", report.failure_summary());
    d.push(std::move(e));
    j.set("diagnostics", std::move(d));
    return {kValidation, j.dump(), false};
  }

  const auto g = geometry::build_graph(p, report);
  Json gj = Json::object();
  Json verts = Json::array();
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    Json v = Json::object();
    v.set("id", static_cast<int>(i));
    v.set("crossing", g.vertices[i].crossing);
    v.set("sign", g.vertices[i].sign);
    verts.push(std::move(v));
  }
  gj.set("vertices", std::move(verts));
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    Json x = Json::object();
    x.set("id", e.id);
    x.set("channel", e.channel);
    x.set("source", e.source);
    x.set("target", e.target);
    x.set("turning_count", e.turning_count);
    edges.push(std::move(x));
  }
  gj.set("edges", std::move(edges));
  Json tails = Json::array();
  for (const auto& t : g.tails) {
    Json x = Json::object();
    x.set("id", t.id);
    x.set("direction", t.direction);
    x.set("xi_sign", t.xi_sign);
    x.set("outgoing", t.outgoing);
    x.set("attach", t.attach);
    tails.push(std::move(x));
  }
  gj.set("tails", std::move(tails));
  gj.set("gamma1", edges_json(g.gamma1));
  gj.set("e0", g.e0);
  Json cycles = Json::array();
  for (const auto& c : geometry::primitive_cycles(g)) {
    Json x = Json::object();
    x.set("edges", edges_json(c.edges));
    x.set("switches", c.switch_count);
    cycles.push(std::move(x));
  }
  gj.set("primitive_cycles", std::move(cycles));
  gj.set("simple_model", geometry::is_simple_model(g));
  j.set("graph", std::move(gj));
  j.set("diagnostics", Json::array());
  return {kOk, j.dump(), false};
}

Output bs(const config::RunConfig& cfg, const Flags& f) {
  const double h = pick_h(cfg, f);
  format::Csv csv;
  csv.header = {"index", "energy"};
  const auto grid = semi::bohr_sommerfeld(cfg.problem, h);
  for (std::size_t i = 0; i < grid.size(); ++i) csv.rows.push_back({std::to_string(i), number(grid[i])});
  return {kOk, csv.dump(), true};
}

Output pseudo(const config::RunConfig& cfg, const Flags& f) {
  const double h = pick_h(cfg, f);
  const auto pr = prepare(cfg);
  const auto res = semi::pseudo_resonances(pr.graph, cfg.problem, h, amp_options(cfg));
  Json j = Json::object();
  j.set("h", h);
  j.set("m0", pr.graph.m0);
  j.set("bs_count", static_cast<int>(semi::bohr_sommerfeld(cfg.problem, h).size()));
  j.set("argument_count", res.argument_count);
  j.set("distinct_in_box", res.distinct_in_box);
  Json recs = Json::array();
  bool all = true;
  for (const auto& r : res.roots) {
    Json x = Json::object();
    x.set("seed", r.seed);
    x.set("pseudo_re", r.energy.real());
    x.set("pseudo_im", r.energy.imag());
    x.set("residual", r.residual);
    x.set("newton_iters", r.newton_iters);
    x.set("converged", r.converged);
    x.set("duplicate", r.duplicate);
    all = all && r.converged;
    recs.push(std::move(x));
  }
  j.set("records", std::move(recs));
  j.set("diagnostics", Json::array());
  return {all ? kOk : kNonConvergence, j.dump(), false};
}

Output widths(const config::RunConfig& cfg, const Flags& f) {
  const double h = pick_h(cfg, f);
  const auto pr = prepare(cfg);
  semi::WidthVariant variant;
  if (f.variant == "one_switch") variant = semi::WidthVariant::OneSwitch;
  else if (f.variant == "full") variant = semi::WidthVariant::Full;
  else throw ConfigError(0, "--variant must be one_switch or full");
  const auto opts = amp_options(cfg);
  Json j = Json::object();
  j.set("h", h);
  j.set("m0", pr.graph.m0);
  j.set("variant", f.variant);
  Json recs = Json::array();
  Json warnings = Json::array();
  bool all = true;
  for (double seed : semi::bohr_sommerfeld(cfg.problem, h)) {
    const auto ps = semi::newton_pseudo(pr.graph, cfg.problem, h, seed, opts);
    const auto wb = semi::width_coefficient(pr.graph, cfg.problem, seed, h, variant, opts);
    for (const auto& w : wb.warnings) warnings.push(w);
    Json x = Json::object();
    x.set("seed", seed);
    x.set("pseudo_re", ps.energy.real());
    x.set("pseudo_im", ps.energy.imag());
    x.set("pseudo_converged", ps.converged);
    x.set("D", wb.d);
    x.set("im_pred", -wb.d * std::pow(h, semi::width_exponent(pr.graph.m0)));
    all = all && ps.converged;
    recs.push(std::move(x));
  }
  j.set("records", std::move(recs));
  j.set("warnings", std::move(warnings));
  j.set("diagnostics", Json::array());
  return {all ? kOk : kNonConvergence, j.dump(), false};
}

oracle::OracleOptions oracle_options(const config::RunConfig& cfg, const std::optional<double>& theta,
                                     const std::optional<double>& x) {
  auto o = cfg.oracle;
  if (theta) o.theta = *theta;
  if (x) o.x = *x;
  return o;
}

Output run_oracle(const config::RunConfig& cfg, const Flags& f) {
  const double h = pick_h(cfg, f);
  const auto pr = prepare(cfg);
  const auto grid = semi::bohr_sommerfeld(cfg.problem, h);
  if (grid.empty()) fail(ErrorKind::Numerical, "EmptyGrid", "no Bohr-Sommerfeld energy in the box");
  const int k = f.seed_index ? *f.seed_index : semi::nearest_seed_index(grid, cfg.problem.e0);
  if (k < 0 || k >= static_cast<int>(grid.size()))
    throw ConfigError(0, "--seed-index out of range [0, " + std::to_string(grid.size()) + ")");
  const double seed = grid[static_cast<std::size_t>(k)];
  const double d =
      semi::width_coefficient(pr.graph, cfg.problem, seed, h, semi::WidthVariant::OneSwitch, amp_options(cfg)).d;
  const double im_pred = -d * std::pow(h, semi::width_exponent(pr.graph.m0));
  const auto r = oracle::refine_resonance(cfg.problem, pr.report, {seed, im_pred}, h, oracle_options(cfg, f.theta, f.x));
  Json j = Json::object();
  j.set("E_re", r.energy.real());
  j.set("E_im", r.energy.imag());
  j.set("residual", r.residual);
  j.set("im_green", r.im_green ? Json(*r.im_green) : Json());
  j.set("im_theta_shifted", r.im_theta_shifted ? Json(*r.im_theta_shifted) : Json());
  j.set("theta_consistent", r.theta_consistent);
  j.set("converged", r.converged);
  j.set("iterations", r.iterations);
  j.set("h", h);
  j.set("seed_index", k);
  j.set("seed", seed);
  j.set("im_pred", im_pred);
  Json diag = Json::array();
  if (!r.converged) {
    Json e = Json::object();
    e.set("code", "NoConvergence");
    e.set("kind", "numerical");
    e.set("message", "Muller iteration did not reach the tolerance");
    diag.push(std::move(e));
  }
  j.set("diagnostics", std::move(diag));
  return {r.converged ? kOk : kNonConvergence, j.dump(), false};
}

Output run_compare(const config::RunConfig& cfg, const Flags& f) {
  const auto res = compare(cfg, pick_list(&cfg, f), f.seed_offset, f.theta, f.x);
  format::Csv csv;
  csv.header = {"h",      "seed_index", "seed",     "pseudo_re", "pseudo_im",        "D",         "im_pred",
                "E_re",   "E_im",       "im_green", "im_theta",  "theta_consistent", "converged", "ratio",
                "vanish_margin"};
  bool all = true;
  auto opt = [](const std::optional<double>& v) { return v ? number(*v) : std::string(); };
  for (const auto& r : res.rows) {
    all = all && r.oracle.converged;
    csv.rows.push_back({number(r.h), std::to_string(r.seed_index), number(r.seed), number(r.pseudo.real()),
                        number(r.pseudo.imag()), number(r.d), number(r.im_pred), number(r.oracle.energy.real()),
                        number(r.oracle.energy.imag()), opt(r.oracle.im_green), opt(r.oracle.im_theta_shifted),
                        r.oracle.theta_consistent ? "1" : "0", r.oracle.converged ? "1" : "0", number(r.ratio()),
                        opt(r.vanish_margin)});
  }
  csv.comments.push_back("m0=" + std::to_string(res.m0) + " expected_slope=" + number(semi::width_exponent(res.m0)));
  auto fit_line = [](const char* name, const std::optional<oracle::ExponentFit>& fit) {
    if (!fit) return std::string("fit ") + name + " unavailable";
    return std::string("fit ") + name + " slope=" + number(fit->slope) + " intercept=" + number(fit->intercept) +
           " r2=" + number(fit->r2);
  };
  csv.comments.push_back(fit_line("oracle", res.fit_oracle));
  csv.comments.push_back(fit_line("pred", res.fit_pred));
  return {all ? kOk : kNonConvergence, csv.dump(), true};
}

Output run_stphase(const config::RunConfig* cfg, const Flags& f) {
  const double calib = cfg ? cfg->stphase_calib : 2.0;
  const auto rows = stphase(f, calib, pick_list(cfg, f));
  format::Csv csv;
  csv.header = {"h", "numeric_re", "numeric_im", "asym_re", "asym_im", "ratio"};
  for (const auto& r : rows) {
    csv.rows.push_back({number(r.h), number(r.numeric.real()), number(r.numeric.imag()), number(r.asym.real()),
                        number(r.asym.imag()), number(std::abs(r.numeric) / std::abs(r.asym))});
  }
  return {kOk, csv.dump(), true};
}

Output error_output(const Error& e) {
  Json j = Json::object();
  j.set("status", "error");
  Json d = Json::array();
  Json x = Json::object();
  x.set("code", e.code());
  x.set("kind", kind_name(e.kind()));
  x.set("message", e.what());
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) x.set("line", ce->line());
  d.push(std::move(x));
  j.set("diagnostics", std::move(d));
  return {exit_code_for(e), j.dump(), false};
}

}  // namespace

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Syntax:
    case ErrorKind::Config:
    case ErrorKind::Precondition: return kUsage;
    case ErrorKind::Validation:
    case ErrorKind::Topology: return kValidation;
    default: return kNonConvergence;
  }
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"analyze", "bs", "pseudo", "widths", "oracle", "compare", "stphase"};
  return names;
}

Output run_subcommand(const std::string& name, const config::RunConfig* cfg, const Flags& flags) {
  try {
    if (name == "stphase") return run_stphase(cfg, flags);
    if (std::find(subcommands().begin(), subcommands().end(), name) == subcommands().end())
      throw ConfigError(0, "unknown subcommand '" + name + "'");
    if (!cfg) throw ConfigError(0, "subcommand '" + name + "' needs a config file");
    if (name == "analyze") return analyze(*cfg);
    if (name == "bs") return bs(*cfg, flags);
    if (name == "pseudo") return pseudo(*cfg, flags);
    if (name == "widths") return widths(*cfg, flags);
    if (name == "oracle") return run_oracle(*cfg, flags);
    return run_compare(*cfg, flags);
  } catch (const Error& e) {
    return error_output(e);
  } catch (const std::exception& e) {
    return error_output(Error(ErrorKind::Internal, "InternalError", e.what()));
  }
}

CompareResult compare(const config::RunConfig& cfg, const std::vector<double>& h_list, int seed_offset,
                      const std::optional<double>& theta, const std::optional<double>& x) {
  const auto pr = prepare(cfg);
  const auto& p = cfg.problem;
  const auto opts = amp_options(cfg);
  const auto oopts = oracle_options(cfg, theta, x);
  const bool simple = geometry::is_simple_model(pr.graph);
  const double a1 = quad::action_derivative(p, p.e0);

  CompareResult out;
  out.m0 = pr.graph.m0;
  for (double h : h_list) {
    const auto grid = semi::bohr_sommerfeld(p, h);
    if (grid.empty()) fail(ErrorKind::Numerical, "EmptyGrid", "no Bohr-Sommerfeld energy in the box");
    const int k = semi::nearest_seed_index(grid, p.e0) + seed_offset;
    if (k < 0 || k >= static_cast<int>(grid.size()))
      fail(ErrorKind::Precondition, "PreconditionViolated", "seed offset leaves the Bohr-Sommerfeld box");
    CompareRow row;
    row.h = h;
    row.seed_index = k;
    row.seed = grid[static_cast<std::size_t>(k)];
    row.pseudo = semi::newton_pseudo(pr.graph, p, h, row.seed, opts).energy;
    row.d = semi::width_coefficient(pr.graph, p, row.seed, h, semi::WidthVariant::OneSwitch, opts).d;
    row.im_pred = -row.d * std::pow(h, semi::width_exponent(pr.graph.m0));
    if (simple) {
      const double spacing = 2.0 * std::numbers::pi * h / a1;
      double best = std::numeric_limits<double>::infinity();
      for (double ev : semi::vanishing_energies(pr.graph, p, h, row.seed - spacing, row.seed + spacing))
        best = std::min(best, std::abs(ev - row.seed) / spacing);
      if (std::isfinite(best)) row.vanish_margin = best;
    }
    row.oracle = oracle::refine_resonance(p, pr.report, {row.seed, row.im_pred}, h, oopts);
    out.rows.push_back(row);
  }

  std::vector<double> hs, ims, hp, preds;
  for (const auto& r : out.rows) {
    if (r.oracle.converged && r.oracle.energy.imag() != 0.0) {
      hs.push_back(r.h);
      ims.push_back(r.oracle.energy.imag());
    }
    if (r.im_pred != 0.0) {
      hp.push_back(r.h);
      preds.push_back(r.im_pred);
    }
  }
  if (hs.size() >= 4) out.fit_oracle = oracle::exponent_fit(hs, ims);
  if (hp.size() >= 4) out.fit_pred = oracle::exponent_fit(hp, preds);
  return out;
}

std::vector<StphaseRow> stphase(const Flags& f, double calib, const std::vector<double>& h_list) {
  if (f.phi.empty()) throw ConfigError(0, "stphase needs --phi");
  if (f.m < 1) throw ConfigError(0, "--m must be at least 1");
  if (!(f.a < f.x0 && f.x0 < f.b)) throw ConfigError(0, "stationary point must lie inside (a, b)");
  const auto phi = exprs::Expr::parse(f.phi);
  const auto sigma = exprs::Expr::parse(f.sigma);
  const auto jet = phi.jet(f.x0, f.m + 1);
  const double sigma0 = sigma.eval(f.x0);
  std::vector<StphaseRow> rows;
  for (double h : h_list) {
    StphaseRow r;
    r.h = h;
    r.numeric = quad::oscillatory_integral([&](double x) { return cplx(sigma.eval(x)); },
                                           [&](double x) { return phi.eval(x); },
                                           [&](double x) { return phi.jet(x, 1).c[1]; }, f.a, f.b, h);
    r.asym = quad::stationary_phase(sigma0, jet, f.m, h, calib);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cw::runner

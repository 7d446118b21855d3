#include "crosswidth/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "crosswidth/errors.hpp"

namespace cw::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double to_double(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(line, "'" + key + "' expects a number, got '" + std::string(s) + "'");
  return v;
}

int to_int(std::string_view s, int line, const std::string& key) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(line, "'" + key + "' expects an integer, got '" + std::string(s) + "'");
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem", {"v1", "v2", "r0", "r1", "e0", "window", "L"}},
      {"numerics",
       {"root_tol", "contact_tol", "newton_tol", "quad_tol", "ode_tol", "scan_points", "k_max", "calib",
        "stphase_calib"}},
      {"sweep", {"h_list"}},
      {"oracle", {"theta", "X", "R0", "ode_tol", "theta_shift"}},
  };
  return s;
}

exprs::Expr to_expr(const Entry& e, const std::string& key) {
  try {
    return exprs::Expr::parse(e.value);
  } catch (const SyntaxError& err) {
    throw ConfigError(e.line, "'" + key + "': " + err.what());
  }
}

}  // namespace

std::vector<double> parse_list(std::string_view text, int line) {
  std::vector<double> out;
  text = trim(unquote(trim(text)));
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(to_double(item, line, "list"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    // '#' inside a quoted value is kept
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!schema().count(section)) throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "key outside of a section");
    const std::string key(trim(line.substr(0, eq)));
    if (!schema().at(section).count(key)) throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
    const std::string full = section + "." + key;
    if (entries.count(full)) throw ConfigError(line_no, "duplicate key '" + full + "'");
    entries[full] = Entry{std::string(unquote(trim(line.substr(eq + 1)))), line_no};
  }

  auto require = [&](const std::string& key) -> const Entry& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(0, "missing required key '" + key + "'");
    return it->second;
  };
  auto get = [&](const std::string& key) -> const Entry* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  RunConfig cfg;
  auto& p = cfg.problem;
  p.v1 = to_expr(require("problem.v1"), "problem.v1");
  p.v2 = to_expr(require("problem.v2"), "problem.v2");
  p.r0 = to_expr(require("problem.r0"), "problem.r0");
  p.r1 = to_expr(require("problem.r1"), "problem.r1");
  const auto& e0 = require("problem.e0");
  p.e0 = to_double(e0.value, e0.line, "problem.e0");
  if (const auto* w = get("problem.window")) {
    const auto v = parse_list(w->value, w->line);
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(w->line, "'problem.window' expects 'lo, hi' with lo < hi");
    p.window = {v[0], v[1]};
  }
  if (const auto* l = get("problem.L")) {
    p.box_l = to_double(l->value, l->line, "problem.L");
    if (!(p.box_l > 0.0)) throw ConfigError(l->line, "'problem.L' must be positive");
  }

  auto positive = [&](const std::string& key, double& target) {
    if (const auto* e = get(key)) {
      target = to_double(e->value, e->line, key);
      if (!(target > 0.0)) throw ConfigError(e->line, "'" + key + "' must be positive");
    }
  };
  auto& t = p.tol;
  positive("numerics.root_tol", t.root_tol);
  positive("numerics.contact_tol", t.contact_tol);
  positive("numerics.newton_tol", t.newton_tol);
  positive("numerics.quad_tol", t.quad_tol);
  positive("numerics.ode_tol", t.ode_tol);
  positive("numerics.calib", cfg.calib);
  positive("numerics.stphase_calib", cfg.stphase_calib);
  if (const auto* e = get("numerics.scan_points")) {
    t.scan_points = to_int(e->value, e->line, "numerics.scan_points");
    if (t.scan_points < 16) throw ConfigError(e->line, "'numerics.scan_points' must be at least 16");
  }
  if (const auto* e = get("numerics.k_max")) {
    t.k_max = to_int(e->value, e->line, "numerics.k_max");
    if (t.k_max < 1) throw ConfigError(e->line, "'numerics.k_max' must be at least 1");
  }

  if (const auto* e = get("sweep.h_list")) {
    cfg.h_list = parse_list(e->value, e->line);
    for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
      if (!(cfg.h_list[i] > 0.0)) throw ConfigError(e->line, "'sweep.h_list' entries must be positive");
      if (i > 0 && !(cfg.h_list[i] < cfg.h_list[i - 1]))
        throw ConfigError(e->line, "'sweep.h_list' must be strictly decreasing");
    }
  }

  auto& o = cfg.oracle;
  o.ode_tol = t.ode_tol;
  if (const auto* e = get("oracle.theta")) {
    o.theta = to_double(e->value, e->line, "oracle.theta");
    if (!(o.theta > 0.0 && o.theta < 1.5)) throw ConfigError(e->line, "'oracle.theta' must lie in (0, 1.5)");
  }
  if (const auto* e = get("oracle.X")) o.x = to_double(e->value, e->line, "oracle.X");
  if (const auto* e = get("oracle.R0")) o.r0 = to_double(e->value, e->line, "oracle.R0");
  positive("oracle.ode_tol", o.ode_tol);
  positive("oracle.theta_shift", o.theta_shift);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cw::config

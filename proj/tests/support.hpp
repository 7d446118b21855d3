#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "crosswidth/config.hpp"
#include "crosswidth/geometry.hpp"
#include "crosswidth/model.hpp"
#include "crosswidth/semiclassics.hpp"

namespace cwtest {

inline std::string fixture_path(const std::string& name) { return std::string(CW_FIXTURE_DIR) + "/" + name + ".cfg"; }

inline cw::config::RunConfig fixture(const std::string& name) { return cw::config::load_config(fixture_path(name)); }

struct Built {
  cw::config::RunConfig cfg;
  cw::model::StructureReport report;
  cw::geometry::Graph graph;

  const cw::model::Problem& problem() const { return cfg.problem; }
};

// Graph pieces hold no pointers into the config, so Built is safe to copy.
inline Built build(const std::string& name) {
  Built b;
  b.cfg = fixture(name);
  b.report = cw::model::validate_structure(b.cfg.problem);
  cw::model::require_valid(b.report);
  b.graph = cw::geometry::build_graph(b.cfg.problem, b.report);
  return b;
}

// det(I - M) by the cycle expansion: sum over sets of pairwise edge-disjoint
// edge-simple cycles of prod(-P(cycle)).
inline std::complex<double> det_by_cycles(const cw::semi::AmplitudeModel& am) {
  const auto cycles = cw::geometry::edge_simple_cycles(am.graph());
  std::vector<std::complex<double>> amp;
  std::vector<std::uint64_t> mask;
  for (const auto& c : cycles) {
    amp.push_back(am.cycle_amplitude(c));
    std::uint64_t m = 0;
    for (int e : c.edges) m |= std::uint64_t{1} << e;
    mask.push_back(m);
  }
  std::complex<double> total = 0.0;
  std::function<void(std::size_t, std::uint64_t, std::complex<double>)> rec = [&](std::size_t i, std::uint64_t used, std::complex<double> prod) {
    if (i == cycles.size()) {
      total += prod;
      return;
    }
    rec(i + 1, used, prod);
    if (!(used & mask[i])) rec(i + 1, used | mask[i], -prod * amp[i]);
  };
  rec(0, 0, 1.0);
  return total;
}

inline std::vector<double> random_bases(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::vector<double> b(static_cast<std::size_t>(n));
  for (auto& x : b) x = u(rng);
  return b;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace cwtest

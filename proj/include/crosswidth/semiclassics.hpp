#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "crosswidth/geometry.hpp"
#include "crosswidth/model.hpp"

namespace cw::semi {

using exprs::cplx;
using geometry::Graph;
using geometry::PathSeq;
using model::Problem;

struct TransferMatrix {
  std::array<std::array<cplx, 2>, 2> t{};  // t[out][in], channels 0-based
  double h = 0.0;
};

// The crossing point of Gamma(E) above c.x: xi and the coupling symbol at that energy.
model::CrossingPoint crossing_at(const Problem& p, const model::CrossingPoint& c, double energy);

// omega of the crossing (x, sign * xi); calib multiplies the leading constant.
cplx omega(const model::CrossingPoint& c, int sign, double calib = 1.0);
TransferMatrix transfer_matrix(const model::CrossingPoint& c, int sign, double h, double calib = 1.0);

struct AmplitudeOptions {
  double calib = 1.0;
  std::vector<double> base_fraction;  // per edge; empty means the edge defaults
};

// Resolved trajectory geometry and actions of every edge and tail at one real energy.
class GraphActions {
 public:
  GraphActions(const Graph& g, const Problem& p, double energy);

  double energy() const { return energy_; }
  // Action (and dS/dE) from the start of the edge to fraction f in [0, 1].
  std::pair<double, double> edge_cumulative(int edge, double f) const;
  std::pair<double, double> edge_total(int edge) const;
  std::pair<double, double> tail_total(int tail) const;
  int turning_between(int edge, double f0, double f1) const;

 private:
  struct ResolvedPiece {
    double lo = 0.0, hi = 0.0;
    double s = 0.0, ds = 0.0;
    double frac0 = 0.0, frac1 = 0.0;  // fraction range within the edge
    bool end_turning = false;         // the piece's flow end is a turning point
  };
  std::vector<ResolvedPiece> resolve(const std::vector<geometry::Piece>& pieces) const;

  const Graph* g_;
  const Problem* p_;
  double energy_;
  std::vector<std::vector<ResolvedPiece>> edges_;
  std::vector<std::vector<ResolvedPiece>> tails_;
  std::vector<std::vector<geometry::Piece>> edge_pieces_;
  mutable std::map<std::pair<int, double>, std::pair<double, double>> cache_;
};

// All probability amplitudes at a fixed complex energy.
class AmplitudeModel {
 public:
  AmplitudeModel(const Graph& g, const Problem& p, cplx energy, double h, AmplitudeOptions opts = {});

  double base(int edge) const;
  // exp(i S / h - i pi nu / 2) along an edge from fraction f0 to f1.
  cplx step(int edge, double f0, double f1) const;
  cplx tail_step(int tail) const;
  cplx tau(int vertex, int ch_out, int ch_in) const;  // 1-based channels

  // From the base point of path.edges[0] to the end of its tail.
  cplx path_amplitude(const PathSeq& path) const;
  cplx cycle_amplitude(const PathSeq& cycle) const;
  Eigen::MatrixXcd monodromy() const;
  // Entry for the one-vertex path from the base of e_from to the base of e_to.
  cplx monodromy_entry(int e_to, int e_from) const;

  const Graph& graph() const { return *g_; }
  double h() const { return h_; }

 private:
  cplx phase(double s, double ds, int nu) const;

  const Graph* g_;
  const Problem* p_;
  cplx energy_;
  double h_;
  AmplitudeOptions opts_;
  GraphActions actions_;
  std::vector<TransferMatrix> transfer_;
};

Eigen::MatrixXcd monodromy(const Graph& g, const Problem& p, cplx energy, double h, const AmplitudeOptions& opts = {});
cplx det_i_minus_m(const Graph& g, const Problem& p, cplx energy, double h, const AmplitudeOptions& opts = {});

std::vector<double> bohr_sommerfeld(const Problem& p, double h);
// Index of the Bohr-Sommerfeld point nearest E0 (ties go to the lower one).
int nearest_seed_index(const std::vector<double>& grid, double e0);

struct PseudoResonance {
  cplx energy;
  double seed = 0.0;
  double residual = 0.0;
  int newton_iters = 0;
  bool converged = false;
  bool duplicate = false;
};

struct PseudoResult {
  std::vector<PseudoResonance> roots;
  int argument_count = 0;
  int distinct_in_box = 0;
};

PseudoResonance newton_pseudo(const Graph& g, const Problem& p, double h, double seed, const AmplitudeOptions& opts = {});
int argument_principle_count(const Graph& g, const Problem& p, double h, int nodes = 4096,
                             const AmplitudeOptions& opts = {});
PseudoResult pseudo_resonances(const Graph& g, const Problem& p, double h, const AmplitudeOptions& opts = {},
                               bool with_argument_count = true);

Eigen::VectorXcd amplitude_vector(const AmplitudeModel& am, int e0 = -1, std::vector<std::string>* warnings = nullptr);

enum class WidthVariant { OneSwitch, Full };

struct WidthBreakdown {
  double energy = 0.0;
  double h = 0.0;
  double d = 0.0;
  WidthVariant variant = WidthVariant::OneSwitch;
  std::vector<int> tails;
  std::vector<cplx> tail_amplitudes;
  std::vector<std::vector<cplx>> path_amplitudes;  // one_switch only
  std::vector<std::string> warnings;
};

WidthBreakdown width_coefficient(const Graph& g, const Problem& p, double energy, double h, WidthVariant variant,
                                 const AmplitudeOptions& opts = {}, int e0 = -1);

// Simple-model geometry: the Gamma2 arc with its turning point.
struct SimpleModel {
  int crossing_sign_far = 1;  // xi sign of the vertex where the Gamma2 arc starts
  bool turn_right = true;     // Gamma2 turning point lies right of the crossing
};
SimpleModel simple_model(const Graph& g);

double s_gamma(const Graph& g, const Problem& p, double energy);
double closed_form_width_example(const Graph& g, const Problem& p, double energy, double h, double calib = 1.0);
std::vector<double> vanishing_energies(const Graph& g, const Problem& p, double h, double lo, double hi);

struct ResonanceRecord {
  double seed = 0.0;
  cplx pseudo;
  bool pseudo_converged = false;
  double d = 0.0;
  double im_pred = 0.0;
  int m0 = 1;
  double h = 0.0;
};

double width_exponent(int m0);
std::vector<ResonanceRecord> resonance_table(const Graph& g, const Problem& p, double h, const AmplitudeOptions& opts = {});

}  // namespace cw::semi

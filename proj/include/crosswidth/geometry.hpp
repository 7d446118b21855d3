#pragma once

#include <array>
#include <string>
#include <vector>

#include "crosswidth/model.hpp"

namespace cw::geometry {

// One monotone x-piece of a trajectory on a fixed xi-branch. Endpoints are
// either fixed abscissae (vertices, window boundary) or turning points, which
// move with the energy and are re-tracked from their E0 location.
struct Piece {
  int channel = 1;
  int sign = 1;  // xi sign; the flow runs towards increasing x iff sign > 0
  double lo_x0 = 0.0, hi_x0 = 0.0;
  bool lo_turning = false, hi_turning = false;
};

struct Vertex {
  int crossing = 0;
  int sign = 1;
};

struct Edge {
  int id = 0;
  int channel = 1;
  int source = -1, target = -1;  // vertex ids
  std::vector<Piece> pieces;     // in flow order
  int turning_count = 0;
  double base_fraction = 0.5;
};

struct Tail {
  int id = 0;
  int direction = 1;
  int xi_sign = 1;
  bool outgoing = false;
  int attach = -1;           // vertex id, or -1 for a component without crossings
  std::vector<Piece> pieces;  // from the vertex to the window boundary (outgoing only)
};

struct Link {
  enum Kind { None, EdgeLink, TailLink };
  Kind kind = None;
  int id = -1;
};

struct Graph {
  std::vector<model::CrossingPoint> crossings;
  int m0 = 0;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Tail> tails;
  std::vector<std::array<Link, 2>> in, out;  // [vertex][channel - 1]
  std::vector<int> gamma1;                    // Gamma1 edges in flow order
  int e0 = -1;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

struct PathSeq {
  std::vector<int> edges;
  int tail = -1;  // terminal outgoing tail, or -1 for cycles
  int switch_count = 0;
};

Graph build_graph(const model::Problem& p, const model::StructureReport& report);

// Alternative admissible e0 (the chain to the other outgoing tail), or -1.
int alternative_e0(const Graph& g);

std::vector<PathSeq> primitive_cycles(const Graph& g);
// Cycles without a repeated edge (vertices may repeat); these index the
// cycle expansion of det(I - M).
std::vector<PathSeq> edge_simple_cycles(const Graph& g);

std::vector<PathSeq> paths_one_switch(const Graph& g, int tail);
std::vector<PathSeq> paths_bounded(const Graph& g, int tail, int max_switch, int e0 = -1);

int count_switches(const Graph& g, const std::vector<int>& edges, bool cyclic, int tail = -1);

// Simple-model topology: one crossing pair, and its Gamma2 component turns.
bool is_simple_model(const Graph& g);

std::vector<int> outgoing_tails(const Graph& g);

}  // namespace cw::geometry

#include "crosswidth/geometry.hpp"

#include <algorithm>
#include <functional>

#include "crosswidth/errors.hpp"

namespace cw::geometry {

namespace {

enum class StationKind { Vertex, Turning, Infinity };

struct Station {
  StationKind kind = StationKind::Vertex;
  int vertex = -1;
  double x = 0.0;
  int xi_sign = 1;  // for Infinity stations: the branch of the adjoining tail
};

Station vertex_station(const Graph& g, int v) {
  return {StationKind::Vertex, v, g.crossings[static_cast<std::size_t>(g.vertices[static_cast<std::size_t>(v)].crossing)].x,
          g.vertices[static_cast<std::size_t>(v)].sign};
}

Piece piece_between(const Station& a, const Station& b, int channel) {
  Piece p;
  p.channel = channel;
  if (a.kind == StationKind::Vertex || a.kind == StationKind::Infinity)
    p.sign = a.xi_sign;
  else
    p.sign = b.xi_sign;
  p.lo_x0 = std::min(a.x, b.x);
  p.hi_x0 = std::max(a.x, b.x);
  const Station& lo = a.x <= b.x ? a : b;
  const Station& hi = a.x <= b.x ? b : a;
  p.lo_turning = lo.kind == StationKind::Turning;
  p.hi_turning = hi.kind == StationKind::Turning;
  return p;
}

// Splits an open or closed station sequence into edges between consecutive
// vertices; open sequences also produce an incoming and an outgoing tail.
void emit_curve(Graph& g, const std::vector<Station>& st, int channel, bool closed, int in_dir, int in_sign,
                int out_dir, int out_sign) {
  std::vector<std::size_t> vpos;
  for (std::size_t i = 0; i < st.size(); ++i)
    if (st[i].kind == StationKind::Vertex) vpos.push_back(i);
  const int ch = channel - 1;

  auto make_edge = [&](std::size_t from, std::size_t to) {
    Edge e;
    e.id = g.num_edges();
    e.channel = channel;
    e.source = st[from].vertex;
    e.target = st[to % st.size()].vertex;
    for (std::size_t k = from; k < to; ++k) {
      const Station& a = st[k % st.size()];
      const Station& b = st[(k + 1) % st.size()];
      e.pieces.push_back(piece_between(a, b, channel));
      if (b.kind == StationKind::Turning) ++e.turning_count;
    }
    g.out[static_cast<std::size_t>(e.source)][ch] = {Link::EdgeLink, e.id};
    g.in[static_cast<std::size_t>(e.target)][ch] = {Link::EdgeLink, e.id};
    g.edges.push_back(std::move(e));
    if (channel == 1) g.gamma1.push_back(g.edges.back().id);
  };

  if (vpos.empty()) {
    if (!closed) {
      g.tails.push_back({static_cast<int>(g.tails.size()), in_dir, in_sign, false, -1, {}});
      g.tails.push_back({static_cast<int>(g.tails.size()), out_dir, out_sign, true, -1, {}});
    }
    return;
  }
  if (closed) {
    for (std::size_t k = 0; k < vpos.size(); ++k) {
      std::size_t from = vpos[k];
      std::size_t to = k + 1 < vpos.size() ? vpos[k + 1] : vpos[0] + st.size();
      make_edge(from, to);
    }
    return;
  }
  {
    Tail t{static_cast<int>(g.tails.size()), in_dir, in_sign, false, st[vpos.front()].vertex, {}};
    g.in[static_cast<std::size_t>(t.attach)][ch] = {Link::TailLink, t.id};
    g.tails.push_back(t);
  }
  for (std::size_t k = 0; k + 1 < vpos.size(); ++k) make_edge(vpos[k], vpos[k + 1]);
  {
    Tail t{static_cast<int>(g.tails.size()), out_dir, out_sign, true, st[vpos.back()].vertex, {}};
    for (std::size_t k = vpos.back(); k + 1 < st.size(); ++k) t.pieces.push_back(piece_between(st[k], st[k + 1], channel));
    g.out[static_cast<std::size_t>(t.attach)][ch] = {Link::TailLink, t.id};
    g.tails.push_back(t);
  }
}

}  // namespace

Graph build_graph(const model::Problem& p, const model::StructureReport& report) {
  model::require_valid(report);
  Graph g;
  g.crossings = report.crossings;
  std::sort(g.crossings.begin(), g.crossings.end(),
            [](const model::CrossingPoint& a, const model::CrossingPoint& b) { return a.x < b.x; });
  g.m0 = report.m0;
  const int n = static_cast<int>(g.crossings.size());
  for (int i = 0; i < n; ++i) {
    g.vertices.push_back({i, +1});
    g.vertices.push_back({i, -1});
  }
  g.in.assign(g.vertices.size(), {});
  g.out.assign(g.vertices.size(), {});

  auto vid = [](int crossing, int sign) { return 2 * crossing + (sign > 0 ? 0 : 1); };

  // Gamma1: upper branch left to right, turn at b0, lower branch back, turn at a0.
  {
    std::vector<Station> st;
    for (int i = 0; i < n; ++i) st.push_back(vertex_station(g, vid(i, +1)));
    st.push_back({StationKind::Turning, -1, report.b0.x, 0});
    for (int i = n - 1; i >= 0; --i) st.push_back(vertex_station(g, vid(i, -1)));
    st.push_back({StationKind::Turning, -1, report.a0.x, 0});
    emit_curve(g, st, 1, true, 0, 0, 0, 0);
  }

  // Gamma2: components of {V2 <= E0}, each unbounded on at least one side.
  const double lo = p.window.lo, hi = p.window.hi;
  const bool open_lo = p.v2.eval(lo) < p.e0;
  const bool open_hi = p.v2.eval(hi) < p.e0;
  struct Component {
    double l, r;
    bool inf_l, inf_r;
  };
  std::vector<Component> comps;
  {
    const auto& r = report.v2_turning;
    double cur_l = lo;
    bool cur_inf = open_lo;
    bool inside = open_lo;
    for (const auto& tp : r) {
      if (tp.side == model::Side::Right) {  // allowed region ends here
        if (inside) comps.push_back({cur_l, tp.x, cur_inf, false});
        inside = false;
      } else {
        cur_l = tp.x;
        cur_inf = false;
        inside = true;
      }
    }
    if (inside) comps.push_back({cur_l, hi, cur_inf, true});
    if (!open_hi && inside)
      fail(ErrorKind::Internal, "InternalInconsistency", "V2 root pattern disagrees with its boundary values");
  }
  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  for (const Component& c : comps) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      double x = g.crossings[static_cast<std::size_t>(i)].x;
      if ((c.inf_l || x > c.l) && (c.inf_r || x < c.r)) {
        idx.push_back(i);
        covered[static_cast<std::size_t>(i)] = true;
      }
    }
    const Station inf_lo_in{StationKind::Infinity, -1, lo, +1}, inf_lo_out{StationKind::Infinity, -1, lo, -1};
    const Station inf_hi_in{StationKind::Infinity, -1, hi, -1}, inf_hi_out{StationKind::Infinity, -1, hi, +1};
    if (c.inf_l && c.inf_r) {
      std::vector<Station> up{inf_lo_in}, down{inf_hi_in};
      for (int i : idx) up.push_back(vertex_station(g, vid(i, +1)));
      up.push_back(inf_hi_out);
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) down.push_back(vertex_station(g, vid(*it, -1)));
      down.push_back(inf_lo_out);
      emit_curve(g, up, 2, false, -1, +1, +1, +1);
      emit_curve(g, down, 2, false, +1, -1, -1, -1);
    } else if (c.inf_r) {
      std::vector<Station> st{inf_hi_in};
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) st.push_back(vertex_station(g, vid(*it, -1)));
      st.push_back({StationKind::Turning, -1, c.l, 0});
      for (int i : idx) st.push_back(vertex_station(g, vid(i, +1)));
      st.push_back(inf_hi_out);
      emit_curve(g, st, 2, false, +1, -1, +1, +1);
    } else if (c.inf_l) {
      std::vector<Station> st{inf_lo_in};
      for (int i : idx) st.push_back(vertex_station(g, vid(i, +1)));
      st.push_back({StationKind::Turning, -1, c.r, 0});
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) st.push_back(vertex_station(g, vid(*it, -1)));
      st.push_back(inf_lo_out);
      emit_curve(g, st, 2, false, -1, +1, -1, -1);
    } else {
      fail(ErrorKind::Validation, "BoundedComponent", "bounded classically allowed interval of V2");
    }
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end())
    fail(ErrorKind::Internal, "InternalInconsistency", "crossing outside every Gamma2 component");

  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (int ch = 0; ch < 2; ++ch)
      if (g.in[v][static_cast<std::size_t>(ch)].kind == Link::None || g.out[v][static_cast<std::size_t>(ch)].kind == Link::None)
        fail(ErrorKind::Internal, "InternalInconsistency", "vertex " + std::to_string(v) + " violates the degree invariant");
  int maslov = 0;
  for (int e : g.gamma1) maslov += g.edges[static_cast<std::size_t>(e)].turning_count;
  if (maslov != 2) fail(ErrorKind::Internal, "InternalInconsistency", "Gamma1 Maslov count differs from 2");

  int attach = -1;
  for (const Tail& t : g.tails)
    if (t.outgoing && t.direction < 0 && t.attach >= 0) attach = t.attach;
  if (attach < 0)
    for (const Tail& t : g.tails)
      if (t.outgoing && t.direction > 0 && t.attach >= 0) attach = t.attach;
  if (attach < 0) fail(ErrorKind::Topology, "NoOutgoingTail", "no outgoing tail is attached to the graph");
  g.e0 = g.in[static_cast<std::size_t>(attach)][0].id;
  return g;
}

int alternative_e0(const Graph& g) {
  for (const Tail& t : g.tails) {
    if (!t.outgoing || t.attach < 0) continue;
    int e = g.in[static_cast<std::size_t>(t.attach)][0].id;
    if (e != g.e0) return e;
  }
  return -1;
}

std::vector<int> outgoing_tails(const Graph& g) {
  std::vector<int> out;
  for (const Tail& t : g.tails)
    if (t.outgoing && t.attach >= 0) out.push_back(t.id);
  return out;
}

int count_switches(const Graph& g, const std::vector<int>& edges, bool cyclic, int tail) {
  int s = 0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    if (g.edges[static_cast<std::size_t>(edges[k])].channel != g.edges[static_cast<std::size_t>(edges[k + 1])].channel) ++s;
  if (cyclic && !edges.empty() &&
      g.edges[static_cast<std::size_t>(edges.back())].channel != g.edges[static_cast<std::size_t>(edges.front())].channel)
    ++s;
  if (tail >= 0 && !edges.empty() && g.edges[static_cast<std::size_t>(edges.back())].channel != 2) ++s;
  return s;
}

std::vector<PathSeq> primitive_cycles(const Graph& g) {
  std::vector<PathSeq> out;
  const int nv = g.num_vertices();
  for (int s = 0; s < nv; ++s) {
    std::vector<bool> on_path(static_cast<std::size_t>(nv), false);
    std::vector<int> path;
    std::function<void(int)> dfs = [&](int v) {
      on_path[static_cast<std::size_t>(v)] = true;
      for (const Link& l : g.out[static_cast<std::size_t>(v)]) {
        if (l.kind != Link::EdgeLink) continue;
        const Edge& e = g.edges[static_cast<std::size_t>(l.id)];
        if (e.target == s) {
          path.push_back(e.id);
          out.push_back({path, -1, count_switches(g, path, true)});
          path.pop_back();
        } else if (e.target > s && !on_path[static_cast<std::size_t>(e.target)]) {
          path.push_back(e.id);
          dfs(e.target);
          path.pop_back();
        }
      }
      on_path[static_cast<std::size_t>(v)] = false;
    };
    dfs(s);
  }
  return out;
}

std::vector<PathSeq> edge_simple_cycles(const Graph& g) {
  std::vector<PathSeq> out;
  const int ne = g.num_edges();
  for (int s = 0; s < ne; ++s) {
    std::vector<bool> used(static_cast<std::size_t>(ne), false);
    std::vector<int> path{s};
    used[static_cast<std::size_t>(s)] = true;
    std::function<void(int)> dfs = [&](int e) {
      int v = g.edges[static_cast<std::size_t>(e)].target;
      for (const Link& l : g.out[static_cast<std::size_t>(v)]) {
        if (l.kind != Link::EdgeLink) continue;
        if (l.id == s) {
          out.push_back({path, -1, count_switches(g, path, true)});
        } else if (l.id > s && !used[static_cast<std::size_t>(l.id)]) {
          used[static_cast<std::size_t>(l.id)] = true;
          path.push_back(l.id);
          dfs(l.id);
          path.pop_back();
          used[static_cast<std::size_t>(l.id)] = false;
        }
      }
    };
    dfs(s);
  }
  return out;
}

std::vector<PathSeq> paths_bounded(const Graph& g, int tail, int max_switch, int e0) {
  if (e0 < 0) e0 = g.e0;
  std::vector<PathSeq> out;
  if (max_switch < 0) return out;
  constexpr std::size_t kMaxDepth = 256;
  std::vector<int> path{e0};
  std::function<void(int, int)> dfs = [&](int e, int switches) {
    const Edge& cur = g.edges[static_cast<std::size_t>(e)];
    for (int ch = 0; ch < 2; ++ch) {
      const Link& l = g.out[static_cast<std::size_t>(cur.target)][static_cast<std::size_t>(ch)];
      int s = switches + (ch + 1 != cur.channel ? 1 : 0);
      if (s > max_switch) continue;
      if (l.kind == Link::TailLink) {
        if (l.id == tail) out.push_back({path, tail, s});
      } else if (l.kind == Link::EdgeLink && l.id != e0 && path.size() < kMaxDepth) {
        path.push_back(l.id);
        dfs(l.id, s);
        path.pop_back();
      }
    }
  };
  dfs(e0, 0);
  return out;
}

std::vector<PathSeq> paths_one_switch(const Graph& g, int tail) {
  auto all = paths_bounded(g, tail, 1);
  std::vector<PathSeq> out;
  for (auto& p : all)
    if (p.switch_count == 1) out.push_back(std::move(p));
  return out;
}

bool is_simple_model(const Graph& g) {
  if (g.crossings.size() != 1) return false;
  for (const Edge& e : g.edges)
    if (e.channel == 2 && e.turning_count == 1) return true;
  return false;
}

}  // namespace cw::geometry

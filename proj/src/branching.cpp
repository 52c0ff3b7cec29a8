#include "spinscape/branching.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace spinscape {

TetBranching make_branching(const std::array<int, 4>& order) {
  TetBranching b;
  b.order = order;
  Perm4 p;
  p.img = order;
  b.index = p.sign();
  return b;
}

const std::vector<TetBranching>& enumerate_tet_branchings() {
  static const std::vector<TetBranching> all = [] {
    std::vector<TetBranching> v;
    std::array<int, 4> o{0, 1, 2, 3};
    do {
      v.push_back(make_branching(o));
    } while (std::next_permutation(o.begin(), o.end()));
    return v;
  }();
  return all;
}

bool germ_out(const TetBranching& b, int face) {
  int r = b.role_of()[face];
  return (r % 2 == 0) == (b.index == +1);
}

std::array<bool, 4> out_pattern(const TetBranching& b) {
  std::array<bool, 4> p{};
  for (int f = 0; f < 4; ++f) p[f] = germ_out(b, f);
  return p;
}

std::array<int, 2> over_faces(const TetBranching& b) { return {b.order[0], b.order[1]}; }
std::array<int, 2> under_faces(const TetBranching& b) { return {b.order[2], b.order[3]}; }

int face_label_of_vertex(const TetBranching& b, int face, int v) {
  auto roles = b.role_of();
  int label = 0;
  for (int u : face_vertices(face))
    if (u != v && roles[u] < roles[v]) ++label;
  return label;
}

int face_vertex_with_label(const TetBranching& b, int face, int label) {
  for (int u : face_vertices(face))
    if (face_label_of_vertex(b, face, u) == label) return u;
  throw std::logic_error("face label out of range");
}

std::string serialize_pre_branching(const PreBranching& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.dir.size(); ++i) os << "edge " << i << " dir " << w.dir[i] << "\n";
  return os.str();
}

PreBranching parse_pre_branching(const std::string& text) {
  std::istringstream is(text);
  std::string raw;
  struct Item {
    int id, dir;
  };
  std::vector<Item> items;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream ls(line);
    std::string kw, kw2;
    Item it{};
    if (!(ls >> kw)) continue;
    if (!(ls >> it.id >> kw2 >> it.dir) || kw != "edge" || kw2 != "dir" ||
        (it.dir != 0 && it.dir != 1))
      throw TriError(line_no, "malformed edge direction line");
    items.push_back(it);
  }
  PreBranching w;
  w.dir.assign(items.size(), -1);
  for (auto& it : items) {
    if (it.id < 0 || it.id >= int(items.size()) || w.dir[it.id] != -1)
      throw TriError(0, "bad or duplicate edge id in direction file");
    w.dir[it.id] = it.dir;
  }
  return w;
}

bool omega_germ_out(const Triangulation& t, const TriIndex& idx, const PreBranching& w, int tet,
                    int face) {
  auto ref = idx.at(tet, face);
  // Source germ is outgoing when dir is 0; the target germ is then incoming.
  return (ref.side == 0) == (w.dir[ref.pairing] == 0);
}

bool pre_branching_valid(const GluingGraph& g, const PreBranching& w) {
  if (w.dir.size() != g.edges.size()) return false;
  for (int d : w.dir)
    if (d != 0 && d != 1) return false;
  std::vector<int> out(g.n_vertices, 0);
  for (const auto& e : g.edges) {
    if (e.u == e.v) {
      // A loop contributes one incoming and one outgoing germ either way.
      out[e.u] += 1;
      continue;
    }
    out[w.dir[e.id] == 0 ? e.u : e.v] += 1;
  }
  for (int v = 0; v < g.n_vertices; ++v)
    if (out[v] != 2) return false;
  return true;
}

bool pre_branching_valid(const Triangulation& t, const PreBranching& w) {
  return pre_branching_valid(gluing_graph(t), w);
}

PreBranching find_pre_branching(const GluingGraph& g) {
  // Hierholzer walk, orienting each edge the way the circuit first
  // traverses it.
  for (int v = 0; v < g.n_vertices; ++v)
    if (g.degree(v) != 4) throw std::invalid_argument("graph is not 4-valent");
  if (!g.connected()) throw std::invalid_argument("graph is disconnected");

  std::vector<std::vector<std::pair<int, int>>> adj(g.n_vertices);  // (edge id, side)
  for (const auto& e : g.edges) {
    adj[e.u].push_back({e.id, 0});
    if (e.v != e.u) adj[e.v].push_back({e.id, 1});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  PreBranching w;
  w.dir.assign(g.edges.size(), -1);
  std::vector<char> used(g.edges.size(), 0);
  std::vector<std::size_t> next(g.n_vertices, 0);
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int v = stack.back();
    while (next[v] < adj[v].size() && used[adj[v][next[v]].first]) ++next[v];
    if (next[v] == adj[v].size()) {
      stack.pop_back();
      continue;
    }
    auto [eid, side] = adj[v][next[v]];
    used[eid] = 1;
    // Traversal leaves v through this germ.
    w.dir[eid] = side == 0 ? 0 : 1;
    const auto& e = g.edges[eid];
    stack.push_back(side == 0 ? e.v : e.u);
  }
  if (!pre_branching_valid(g, w)) throw std::logic_error("euler orientation failed audit");
  return w;
}

PreBranching find_pre_branching(const Triangulation& t) {
  return find_pre_branching(gluing_graph(t));
}

std::vector<PreBranching> enumerate_pre_branchings(const GluingGraph& g, int max_edges) {
  int m = int(g.edges.size());
  if (m > max_edges) throw std::runtime_error("pre-branching enumeration guard exceeded");
  std::vector<PreBranching> out;
  for (long long mask = 0; mask < (1LL << m); ++mask) {
    PreBranching w;
    w.dir.resize(m);
    for (int i = 0; i < m; ++i) w.dir[i] = (mask >> i) & 1;
    if (pre_branching_valid(g, w)) out.push_back(std::move(w));
  }
  return out;
}

std::vector<PreBranching> enumerate_pre_branchings(const Triangulation& t, int max_edges) {
  return enumerate_pre_branchings(gluing_graph(t), max_edges);
}

std::array<bool, 4> tet_pattern(const Triangulation& t, const TriIndex& idx, const PreBranching& w,
                                int tet) {
  std::array<bool, 4> p{};
  for (int f = 0; f < 4; ++f) p[f] = omega_germ_out(t, idx, w, tet, f);
  return p;
}

std::vector<TetBranching> compatible_tet_branchings(const std::array<bool, 4>& pattern) {
  int outs = 0;
  for (bool b : pattern) outs += b ? 1 : 0;
  if (outs != 2) throw std::invalid_argument("pattern must have exactly two outgoing germs");
  std::vector<TetBranching> out;
  for (const auto& b : enumerate_tet_branchings())
    if (out_pattern(b) == pattern) out.push_back(b);
  if (out.size() != 4) throw std::logic_error("pattern does not have exactly 4 branchings");
  return out;
}

std::string serialize_weak_branching(const WeakBranching& wb) {
  std::ostringstream os;
  for (std::size_t t = 0; t < wb.tet.size(); ++t) {
    os << "tet " << t << " order";
    for (int v : wb.tet[t].order) os << " " << v;
    os << "\n";
  }
  return os.str();
}

WeakBranching parse_weak_branching(const std::string& text, const PreBranching& omega) {
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<int, std::array<int, 4>>> items;
  while (std::getline(is, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    std::istringstream ls(line);
    std::string kw, kw2;
    int tet;
    std::array<int, 4> order{};
    if (!(ls >> kw)) continue;
    if (!(ls >> tet >> kw2 >> order[0] >> order[1] >> order[2] >> order[3]) || kw != "tet" ||
        kw2 != "order")
      throw TriError(line_no, "malformed tet order line");
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != std::array<int, 4>{0, 1, 2, 3})
      throw TriError(line_no, "tet order is not a vertex permutation");
    items.push_back({tet, order});
  }
  WeakBranching wb;
  wb.omega = omega;
  wb.tet.assign(items.size(), TetBranching{});
  std::vector<char> seen(items.size(), 0);
  for (auto& [tet, order] : items) {
    if (tet < 0 || tet >= int(items.size()) || seen[tet])
      throw TriError(0, "bad or duplicate tet id in branching file");
    seen[tet] = 1;
    wb.tet[tet] = make_branching(order);
  }
  return wb;
}

std::string color_name(EdgeColor c) {
  switch (c) {
    case EdgeColor::empty: return "empty";
    case EdgeColor::plus: return "+1";
    case EdgeColor::minus: return "-1";
  }
  return "?";
}

Perm3 gluing_label_perm(const FacePairing& p, const TetBranching& b_src,
                        const TetBranching& b_dst) {
  Perm3 perm;
  for (int j = 0; j < 3; ++j) {
    int v = face_vertex_with_label(b_src, p.src_face, j);
    int vi = pairing_apply(p, v);
    perm.img[j] = face_label_of_vertex(b_dst, p.dst_face, vi);
  }
  return perm;
}

EdgeTypeResult classify_edge_type(const FacePairing& p, const TetBranching& b_src,
                                  const TetBranching& b_dst) {
  EdgeTypeResult r;
  r.perm = gluing_label_perm(p, b_src, b_dst);
  if (r.perm.sign() == -1) {
    r.odd = true;
    return r;
  }
  if (r.perm.is_identity())
    r.color = EdgeColor::empty;
  else if (r.perm == perm3_cycle012())
    r.color = EdgeColor::plus;
  else
    r.color = EdgeColor::minus;
  return r;
}

bool weak_branching_valid(const Triangulation& t, const WeakBranching& wb) {
  if (int(wb.tet.size()) != t.n_tets) return false;
  if (!pre_branching_valid(t, wb.omega)) return false;
  TriIndex idx(t);
  for (int tet = 0; tet < t.n_tets; ++tet)
    if (out_pattern(wb.tet[tet]) != tet_pattern(t, idx, wb.omega, tet)) return false;
  for (const auto& p : t.pairings)
    if (classify_edge_type(p, wb.tet[p.src_tet], wb.tet[p.dst_tet]).odd) return false;
  return true;
}

namespace {

// Shared backtracking over per-tet candidate branchings. accept_edge decides
// whether an edge with both ends assigned keeps the partial assignment alive.
template <class AcceptEdge>
bool branching_dfs(const Triangulation& t, const std::vector<std::vector<TetBranching>>& cands,
                   AcceptEdge accept_edge, std::vector<int>& choice, long long& nodes,
                   int tet = 0) {
  if (tet == t.n_tets) return true;
  for (int c = 0; c < int(cands[tet].size()); ++c) {
    choice[tet] = c;
    ++nodes;
    bool ok = true;
    for (const auto& p : t.pairings) {
      int hi = std::max(p.src_tet, p.dst_tet);
      if (hi != tet) continue;
      const auto& bs = cands[p.src_tet][choice[p.src_tet]];
      const auto& bd = cands[p.dst_tet][choice[p.dst_tet]];
      if (!accept_edge(classify_edge_type(p, bs, bd))) {
        ok = false;
        break;
      }
    }
    if (ok && branching_dfs(t, cands, accept_edge, choice, nodes, tet + 1)) return true;
  }
  choice[tet] = -1;
  return false;
}

}  // namespace

WeakBranchingSearch find_weak_branching(const Triangulation& t, const PreBranching& w) {
  TriIndex idx(t);
  std::vector<std::vector<TetBranching>> cands(t.n_tets);
  for (int tet = 0; tet < t.n_tets; ++tet)
    cands[tet] = compatible_tet_branchings(tet_pattern(t, idx, w, tet));

  WeakBranchingSearch s;
  std::vector<int> choice(t.n_tets, -1);
  bool found = branching_dfs(
      t, cands, [](const EdgeTypeResult& r) { return !r.odd; }, choice, s.nodes_visited);
  s.found = found;
  if (found) {
    s.result.omega = w;
    for (int tet = 0; tet < t.n_tets; ++tet) s.result.tet.push_back(cands[tet][choice[tet]]);
    if (!weak_branching_valid(t, s.result)) throw std::logic_error("weak branching failed audit");
  }
  return s;
}

std::vector<WeakBranching> enumerate_weak_branchings(const Triangulation& t,
                                                     const PreBranching& w) {
  TriIndex idx(t);
  std::vector<std::vector<TetBranching>> cands(t.n_tets);
  long long total = 1;
  for (int tet = 0; tet < t.n_tets; ++tet) {
    cands[tet] = compatible_tet_branchings(tet_pattern(t, idx, w, tet));
    total *= int(cands[tet].size());
    if (total > 1 << 20) throw std::runtime_error("weak branching enumeration too large");
  }
  std::vector<WeakBranching> out;
  std::vector<int> choice(t.n_tets, 0);
  for (long long it = 0; it < total; ++it) {
    long long x = it;
    for (int tet = 0; tet < t.n_tets; ++tet) {
      choice[tet] = int(x % cands[tet].size());
      x /= cands[tet].size();
    }
    WeakBranching wb;
    wb.omega = w;
    for (int tet = 0; tet < t.n_tets; ++tet) wb.tet.push_back(cands[tet][choice[tet]]);
    if (weak_branching_valid(t, wb)) out.push_back(std::move(wb));
  }
  return out;
}

TautStructure z2_taut(const Triangulation& t, const PreBranching& w, const WeakBranching& wb) {
  if (!weak_branching_valid(t, wb) || !(wb.omega == w))
    throw std::invalid_argument("z2_taut needs a valid compatible weak branching");
  TautStructure taut;
  taut.sign.assign(std::size_t(t.n_tets) * 6, +1);
  for (int tet = 0; tet < t.n_tets; ++tet) {
    const auto& o = wb.tet[tet].order;
    taut.sign[tet * 6 + edge_slot(std::min(o[0], o[2]), std::max(o[0], o[2]))] = -1;
    taut.sign[tet * 6 + edge_slot(std::min(o[1], o[3]), std::max(o[1], o[3]))] = -1;
  }
  // Per-class parity audit.
  for (const auto& c : compute_edge_classes(t)) {
    int minus = 0;
    for (const auto& e : c.fiber)
      if (taut.sign[e.tet * 6 + edge_slot(e.a, e.b)] == -1) ++minus;
    if (minus % 2 != 0) throw std::logic_error("taut signs have odd class parity");
  }
  return taut;
}

BranchabilityResult global_branching_exists(const Triangulation& t, int guard_tets) {
  if (t.n_tets > guard_tets) throw std::runtime_error("branchability guard exceeded");
  BranchabilityResult r;
  r.assignments_total = 1;
  for (int i = 0; i < t.n_tets; ++i) r.assignments_total *= 24;

  std::vector<std::vector<TetBranching>> cands(t.n_tets, enumerate_tet_branchings());
  std::vector<int> choice(t.n_tets, -1);
  bool found = branching_dfs(
      t, cands,
      [](const EdgeTypeResult& c) { return !c.odd && c.color == EdgeColor::empty; }, choice,
      r.nodes_visited);
  r.branchable = found;
  r.exhaustive = !found;
  if (found)
    for (int tet = 0; tet < t.n_tets; ++tet) r.witness.push_back(cands[tet][choice[tet]]);
  return r;
}

}  // namespace spinscape

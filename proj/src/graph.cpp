#include "spinscape/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace spinscape {

Subedge subedge_reversed(const Subedge& s) {
  Subedge r;
  r.tail_or = -s.head_or;
  r.head_or = -s.tail_or;
  r.iorient = -s.iorient;
  r.perm = s.perm.inverse();
  r.weight2x = s.weight2x;
  return r;
}

Perm3 fuse_A_colors(const Perm3& x, const Perm3& y) { return compose(y, x); }

EdgeColor color_of_perm(const Perm3& p) {
  if (p.sign() < 0) throw TriError(0, "an odd permutation has no color");
  if (p.is_identity()) return EdgeColor::empty;
  return p == perm3_cycle012() ? EdgeColor::plus : EdgeColor::minus;
}

Perm3 perm_of_color(EdgeColor c) {
  if (c == EdgeColor::empty) return Perm3{};
  return c == EdgeColor::plus ? perm3_cycle012() : perm3_cycle021();
}

namespace {

int mod4(int v) { return ((v % 4) + 4) % 4; }

}  // namespace

Subedge fuse_A_weighted(const Subedge& x, const Subedge& y) {
  if (x.head_or != y.tail_or) throw TriError(0, "stretches do not meet end to end");
  Subedge r;
  r.tail_or = x.tail_or;
  r.head_or = y.head_or;
  r.perm = compose(y.perm, x.perm);
  if (x.odd() && y.odd()) {
    if (x.iorient == y.iorient) {
      // Both internal orientations point the same way along the chain. The
      // junction must sit behind both of them; the other case has no rule.
      if (x.iorient != -x.head_or)
        throw TriError(0, "no fusion rule covers this pair of internal orientations");
      r.weight2x = mod4(x.weight2x + y.weight2x);
    } else {
      r.weight2x = mod4(x.weight2x - y.weight2x);
    }
    r.iorient = 0;
  } else {
    r.weight2x = mod4(x.weight2x + y.weight2x);
    r.iorient = x.odd() ? x.iorient : y.iorient;
  }
  return r;
}

DecoratedGraph graph_of(const Triangulation& t, const PreBranching& w, const WeakBranching& wb,
                        const GF2Vector* beta) {
  if (w.dir.size() != t.pairings.size())
    throw std::invalid_argument("pre-branching does not match the triangulation");
  if (wb.tet.size() != static_cast<std::size_t>(t.n_tets))
    throw std::invalid_argument("weak branching does not match the triangulation");
  if (beta && beta->size() != t.pairings.size())
    throw std::invalid_argument("weight vector does not match the face classes");
  DecoratedGraph g;
  g.vertices.reserve(t.n_tets);
  for (int i = 0; i < t.n_tets; ++i)
    g.vertices.push_back({i, wb.tet[i].index, wb.tet[i]});
  g.edges.reserve(t.pairings.size());
  for (std::size_t p = 0; p < t.pairings.size(); ++p) {
    const FacePairing& fp = t.pairings[p];
    DecoratedGraph::Edge e;
    e.id = static_cast<int>(p);
    e.tail = {fp.src_tet, fp.src_face};
    e.head = {fp.dst_tet, fp.dst_face};
    Subedge s;
    s.tail_or = s.head_or = w.dir[p] == 0 ? +1 : -1;
    s.perm = gluing_label_perm(fp, wb.tet[fp.src_tet], wb.tet[fp.dst_tet]);
    if (s.perm.sign() < 0) throw TriError(0, "branching gives an odd gluing, graph has no color");
    s.weight2x = beta && beta->get(p) ? 2 : 0;
    e.parts = {s};
    g.edges.push_back(std::move(e));
  }
  return g;
}

GraphState state_of(const DecoratedGraph& g) {
  GraphState st;
  st.omega.dir.resize(g.edges.size());
  st.colors.resize(g.edges.size());
  st.weights = GF2Vector(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    Subedge f = fuse_chain(g.edges[i].parts);
    if (f.odd()) throw TriError(0, "an odd edge carries no flow direction");
    st.omega.dir[i] = f.tail_or > 0 ? 0 : 1;
    st.colors[i] = color_of_perm(f.perm);
    st.weights.set(i, f.weight2x == 2);
  }
  return st;
}

std::vector<std::string> validate_graph(const DecoratedGraph& g) {
  std::vector<std::string> issues;
  auto complain = [&](const std::string& m) { issues.push_back(m); };
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    const auto& v = g.vertices[i];
    if (v.id != static_cast<int>(i)) complain("vertex ids are not positional");
    if (v.index != 1 && v.index != -1) complain("vertex index out of range");
    if (v.index != v.branching.index) complain("vertex index disagrees with its branching");
  }
  std::map<std::pair<int, int>, int> germ_use;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    std::string tag = "edge " + std::to_string(e.id) + ": ";
    if (e.id != static_cast<int>(i)) complain(tag + "ids are not positional");
    for (const DecoratedGraph::End& end : {e.tail, e.head}) {
      if (end.vertex < 0 || end.vertex >= static_cast<int>(g.vertices.size()))
        complain(tag + "end vertex out of range");
      else if (end.germ < 0 || end.germ > 3)
        complain(tag + "end germ out of range");
      else
        ++germ_use[{end.vertex, end.germ}];
    }
    if (e.parts.empty()) {
      complain(tag + "no stretches");
      continue;
    }
    for (std::size_t k = 0; k + 1 < e.parts.size(); ++k)
      if (e.parts[k].head_or != e.parts[k + 1].tail_or)
        complain(tag + "stretches do not meet end to end");
    for (const Subedge& s : e.parts) {
      if (std::abs(s.tail_or) != 1 || std::abs(s.head_or) != 1)
        complain(tag + "end orientation out of range");
      if (s.weight2x < 0 || s.weight2x > 3) complain(tag + "weight out of range");
      if (s.odd() != (s.perm.sign() < 0)) complain(tag + "color parity disagrees with the ends");
      if (s.odd() != (s.weight2x % 2 == 1)) complain(tag + "weight parity disagrees with the ends");
      if (s.odd() && s.iorient != 1 && s.iorient != -1)
        complain(tag + "odd stretch without an internal orientation");
      if (!s.odd() && s.iorient != 0) complain(tag + "even stretch with an internal orientation");
    }
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    for (int f = 0; f < 4; ++f) {
      auto it = germ_use.find({static_cast<int>(v), f});
      int n = it == germ_use.end() ? 0 : it->second;
      if (n != 1)
        complain("vertex " + std::to_string(v) + " germ " + std::to_string(f) + " used " +
                 std::to_string(n) + " times");
    }
  return issues;
}

namespace {

std::string weight_token(int w2x) {
  switch (mod4(w2x)) {
    case 0: return "0";
    case 1: return "1/2";
    case 2: return "1";
    default: return "-1/2";
  }
}

int weight_from_token(const std::string& tok) {
  if (tok == "0") return 0;
  if (tok == "1/2") return 1;
  if (tok == "1") return 2;
  if (tok == "-1/2") return 3;
  throw TriError(0, "bad weight token: " + tok);
}

std::string color_token(const Perm3& p) {
  std::string s;
  for (int i = 0; i < 3; ++i) s += static_cast<char>('0' + p.img[i]);
  return s;
}

Perm3 color_from_token(const std::string& tok) {
  if (tok.size() != 3) throw TriError(0, "bad color token: " + tok);
  Perm3 p;
  bool seen[3] = {false, false, false};
  for (int i = 0; i < 3; ++i) {
    int d = tok[i] - '0';
    if (d < 0 || d > 2 || seen[d]) throw TriError(0, "bad color token: " + tok);
    seen[d] = true;
    p.img[i] = d;
  }
  return p;
}

DecoratedGraph::End end_from_token(const std::string& tok) {
  std::size_t c = tok.find(',');
  if (c == std::string::npos) throw TriError(0, "bad end token: " + tok);
  return {std::stoi(tok.substr(0, c)), std::stoi(tok.substr(c + 1))};
}

}  // namespace

std::string serialize_graph(const DecoratedGraph& g) {
  std::ostringstream out;
  for (const auto& v : g.vertices)
    out << "vertex " << v.id << " index " << (v.index > 0 ? "+1" : "-1") << "\n";
  for (const auto& e : g.edges) {
    if (e.parts.size() != 1) throw TriError(0, "cannot serialize a split edge");
    Subedge s = e.parts[0];
    DecoratedGraph::End tail = e.tail, head = e.head;
    // Even edges are written in the flow direction. Odd edges are written
    // tail out, head in; a both-in odd edge has no form in this format.
    if (!s.odd() && s.tail_or < 0) {
      std::swap(tail, head);
      s = subedge_reversed(s);
    }
    if (s.odd() && s.tail_or < 0) throw TriError(0, "a both-in odd edge has no text form");
    out << "edge " << e.id << " : " << tail.vertex << "," << tail.germ << " -> " << head.vertex
        << "," << head.germ << " color " << color_token(s.perm) << " weight "
        << weight_token(s.weight2x);
    if (s.odd()) out << " iorient " << (s.iorient > 0 ? "+" : "-");
    out << "\n";
  }
  return out.str();
}

DecoratedGraph parse_graph(const std::string& text) {
  DecoratedGraph g;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    if (kind == "vertex") {
      std::string idx_kw, idx;
      int id = 0;
      if (!(ls >> id >> idx_kw >> idx) || idx_kw != "index")
        throw TriError(0, "bad vertex line: " + line);
      DecoratedGraph::Vertex v;
      v.id = id;
      v.index = idx == "+1" ? +1 : idx == "-1" ? -1 : throw TriError(0, "bad index: " + idx);
      // The format does not carry vertex orderings; a fixed branching of the
      // right index stands in.
      v.branching = make_branching(v.index > 0 ? std::array<int, 4>{0, 1, 2, 3}
                                               : std::array<int, 4>{0, 1, 3, 2});
      g.vertices.push_back(v);
    } else if (kind == "edge") {
      DecoratedGraph::Edge e;
      std::string colon, tail_tok, arrow, head_tok, kw, color_tok, wtok;
      if (!(ls >> e.id >> colon >> tail_tok >> arrow >> head_tok) || colon != ":" || arrow != "->")
        throw TriError(0, "bad edge line: " + line);
      e.tail = end_from_token(tail_tok);
      e.head = end_from_token(head_tok);
      Subedge s;
      bool have_color = false, have_weight = false;
      while (ls >> kw) {
        if (kw == "color") {
          if (!(ls >> color_tok)) throw TriError(0, "bad edge line: " + line);
          s.perm = color_from_token(color_tok);
          have_color = true;
        } else if (kw == "weight") {
          if (!(ls >> wtok)) throw TriError(0, "bad edge line: " + line);
          s.weight2x = weight_from_token(wtok);
          have_weight = true;
        } else if (kw == "iorient") {
          std::string io;
          if (!(ls >> io) || (io != "+" && io != "-")) throw TriError(0, "bad edge line: " + line);
          s.iorient = io == "+" ? +1 : -1;
        } else {
          throw TriError(0, "bad edge token: " + kw);
        }
      }
      if (!have_color || !have_weight) throw TriError(0, "edge line misses color or weight: " + line);
      bool odd = s.perm.sign() < 0;
      s.tail_or = +1;
      s.head_or = odd ? -1 : +1;
      if (odd && s.iorient == 0) throw TriError(0, "odd edge without an internal orientation");
      if (!odd && s.iorient != 0) throw TriError(0, "even edge with an internal orientation");
      if (odd != (s.weight2x % 2 == 1)) throw TriError(0, "weight parity disagrees with the color");
      e.parts = {s};
      g.edges.push_back(std::move(e));
    } else {
      throw TriError(0, "bad graph line: " + line);
    }
  }
  std::vector<std::string> issues = validate_graph(g);
  if (!issues.empty()) throw TriError(0, "parsed graph invalid: " + issues.front());
  return g;
}

Subedge fuse_chain(const std::vector<Subedge>& parts) {
  if (parts.empty()) throw TriError(0, "empty chain");
  Subedge acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = fuse_A_weighted(acc, parts[i]);
  return acc;
}

Subedge fuse_chain_in_order(const std::vector<Subedge>& parts, const std::vector<int>& order) {
  if (parts.empty()) throw TriError(0, "empty chain");
  if (order.size() + 1 != parts.size()) throw std::invalid_argument("order length mismatch");
  std::vector<Subedge> cur = parts;
  for (int pick : order) {
    if (pick < 0 || pick + 1 >= static_cast<int>(cur.size()))
      throw std::invalid_argument("order pick out of range");
    cur[pick] = fuse_A_weighted(cur[pick], cur[pick + 1]);
    cur.erase(cur.begin() + pick + 1);
  }
  return cur[0];
}

DecoratedGraph fuse_N(const DecoratedGraph& g) {
  DecoratedGraph out = g;
  for (auto& e : out.edges) {
    for (const Subedge& s : e.parts)
      if (s.odd()) throw TriError(0, "odd stretch in a branched-family fusion");
    e.parts = {fuse_chain(e.parts)};
  }
  return out;
}

DecoratedGraph fuse_A(const DecoratedGraph& g) {
  DecoratedGraph out = g;
  for (auto& e : out.edges) {
    Subedge acc;
    acc.tail_or = e.parts.front().tail_or;
    acc.head_or = e.parts.back().head_or;
    for (const Subedge& s : e.parts) acc.perm = compose(s.perm, acc.perm);
    acc.weight2x = 0;
    acc.iorient = 0;
    e.parts = {acc};
  }
  return out;
}

DecoratedGraph fuse_all_weighted(const DecoratedGraph& g, int audit_orders) {
  DecoratedGraph out = g;
  for (auto& e : out.edges) {
    Subedge canonical = fuse_chain(e.parts);
    if (e.parts.size() > 2) {
      std::vector<std::vector<int>> orders;
      std::vector<int> right_fold;
      for (int i = static_cast<int>(e.parts.size()) - 2; i >= 0; --i) right_fold.push_back(i);
      orders.push_back(right_fold);
      for (int k = 0; k < audit_orders; ++k) {
        std::mt19937 rng(0x9e3779b9u * static_cast<unsigned>(e.id + 1) + static_cast<unsigned>(k));
        std::vector<int> order;
        for (int left = static_cast<int>(e.parts.size()); left > 1; --left)
          order.push_back(std::uniform_int_distribution<int>(0, left - 2)(rng));
        orders.push_back(std::move(order));
      }
      for (const std::vector<int>& order : orders)
        if (!(fuse_chain_in_order(e.parts, order) == canonical))
          throw TriError(0, "fusion of edge " + std::to_string(e.id) + " is order dependent");
    }
    e.parts = {canonical};
  }
  return out;
}

bool weight_class_equal(const DecoratedGraph& g, const GF2Vector& w0, const GF2Vector& w1) {
  if (w0.size() != g.edges.size() || w1.size() != g.edges.size())
    throw std::invalid_argument("weight vector does not match the edges");
  GF2Matrix inc(g.edges.size(), g.vertices.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    int tv = g.edges[e].tail.vertex, hv = g.edges[e].head.vertex;
    if (tv != hv) {
      // A loop flips twice and stays put, so its row is zero.
      inc.set(e, tv, true);
      inc.set(e, hv, true);
    }
  }
  return gf2_solve(inc, w0 ^ w1).feasible;
}

std::vector<Subedge> random_pattern_chain(const Subedge& whole, std::mt19937& rng) {
  if (whole.odd()) throw TriError(0, "only even stretches are split");
  std::uniform_int_distribution<int> coin(0, 1), small(0, 2);
  int tail_letter = whole.tail_or;

  struct Shape {
    int t, h, io;
  };
  std::vector<Shape> seq;
  auto run = [&](int k, Shape a, Shape b) {
    for (int i = 0; i < k; ++i) {
      seq.push_back(a);
      seq.push_back(b);
    }
  };
  bool capped = coin(rng) == 1;
  int k = small(rng), h = small(rng);
  const Shape rRl{+1, -1, +1}, rLl{+1, -1, -1}, lRr{-1, +1, +1}, lLr{-1, +1, -1};
  if (tail_letter > 0) {
    if (!capped) {
      run(k, rRl, lLr);
      run(h, rLl, lRr);
    } else {
      seq.push_back(rRl);
      run(k, lLr, rRl);
      run(h, lRr, rLl);
      seq.push_back(lRr);
    }
  } else {
    if (!capped) {
      run(k, lLr, rRl);
      run(h, lRr, rLl);
    } else {
      seq.push_back(lLr);
      run(k, rRl, lLr);
      run(h, rLl, lRr);
      seq.push_back(rLl);
    }
  }
  int evens = 1 + small(rng);
  for (int i = 0; i < evens; ++i) {
    int pos = std::uniform_int_distribution<int>(0, static_cast<int>(seq.size()))(rng);
    int letter = pos == 0 ? tail_letter : seq[pos - 1].h;
    seq.insert(seq.begin() + pos, Shape{letter, letter, 0});
  }

  std::vector<Subedge> chain(seq.size());
  Perm3 prefix;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    Subedge& s = chain[i];
    s.tail_or = seq[i].t;
    s.head_or = seq[i].h;
    s.iorient = seq[i].io;
    bool odd = s.odd();
    if (i + 1 < seq.size()) {
      s.perm = all_perm3()[(odd ? 3 : 0) + small(rng)];
    } else {
      s.perm = compose(whole.perm, prefix.inverse());
      if ((s.perm.sign() < 0) != odd)
        throw std::logic_error("pattern parity bookkeeping went wrong");
    }
    s.weight2x = (odd ? 1 : 0) + 2 * coin(rng);
    prefix = compose(s.perm, prefix);
  }
  // Settle the leftover weight on an even stretch so the chain fuses back to
  // the whole exactly.
  int diff = mod4(whole.weight2x - fuse_chain(chain).weight2x);
  for (Subedge& s : chain)
    if (!s.odd()) {
      s.weight2x = mod4(s.weight2x + diff);
      break;
    }
  return chain;
}

DecoratedGraph split_edges_random(const DecoratedGraph& g, std::mt19937& rng) {
  DecoratedGraph out = g;
  for (auto& e : out.edges) {
    if (e.parts.size() != 1 || e.parts[0].odd()) continue;
    e.parts = random_pattern_chain(e.parts[0], rng);
  }
  return out;
}

namespace {

// Walks one strand through the chain in the flow direction, adding each
// stretch's contribution for the label the strand carries there.
int chain_passage_weight(const std::vector<Subedge>& parts, bool flow_forward, int entry_label,
                         bool second_method, bool out_takes_plus_row) {
  std::vector<Subedge> gp;
  gp.reserve(parts.size());
  if (flow_forward) {
    gp = parts;
  } else {
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) gp.push_back(subedge_reversed(*it));
  }
  int label = entry_label, total = 0;
  for (const Subedge& s : gp) {
    if (second_method) {
      total += s_table(s.perm)[label];
    } else if (!s.odd()) {
      EdgeColor c = color_of_perm(s.tail_or > 0 ? s.perm : s.perm.inverse());
      total += strand_weight(c, s.tail_or > 0 ? label : s.perm(label));
    } else {
      bool plus_row = (s.tail_or > 0) == out_takes_plus_row;
      int fixed = 0;
      while (s.perm(fixed) != fixed) ++fixed;
      if (fixed == 1)
        total += 2;
      else if (fixed == 2 && label != 2)
        total += plus_row ? 1 : 3;
      else if (fixed == 0 && label != 0)
        total += plus_row ? 3 : 1;
    }
    label = s.perm(label);
  }
  return mod4(total);
}

ObstructionChain alpha_split(const Triangulation& t, const PreBranching& w,
                             const WeakBranching& wb, const DecoratedGraph& split,
                             bool second_method, bool out_takes_plus_row) {
  DecoratedGraph base = graph_of(t, w, wb);
  if (split.edges.size() != base.edges.size() || split.vertices.size() != base.vertices.size())
    throw std::invalid_argument("split graph does not match the triangulation");
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    Subedge f = fuse_chain(split.edges[e].parts);
    const Subedge& b = base.edges[e].parts[0];
    if (f.tail_or != b.tail_or || f.head_or != b.head_or || !(f.perm == b.perm) ||
        !(split.edges[e].tail == base.edges[e].tail) ||
        !(split.edges[e].head == base.edges[e].head))
      throw std::invalid_argument("split graph does not fuse back to the given state");
  }

  std::vector<RegionBoundary> regions = region_boundaries(t, w, wb, frozen_arrow_table());
  ObstructionChain out;
  out.chain = GF2Vector(regions.size());
  out.audit.resize(regions.size());
  for (const RegionBoundary& r : regions) {
    int total = 2;
    for (const auto& vp : r.vertices)
      if (vp.arrow_agree != 0) total += vp.arrow_agree > 0 ? 1 : 3;
    for (const auto& ep : r.edges)
      total += chain_passage_weight(split.edges[ep.pairing].parts, w.dir[ep.pairing] == 0,
                                    ep.first_label, second_method, out_takes_plus_row);
    total = mod4(total);
    if (total % 2 != 0) throw std::logic_error("split passage weights broke the parity audit");
    out.chain.set(r.edge_class, total == 2);
    out.audit[r.edge_class].total = total;
  }
  return out;
}

}  // namespace

bool frozen_first_method_row() { return true; }

ObstructionChain alpha_split_first_method_with(const Triangulation& t, const PreBranching& w,
                                               const WeakBranching& wb,
                                               const DecoratedGraph& split,
                                               bool out_takes_plus_row) {
  return alpha_split(t, w, wb, split, false, out_takes_plus_row);
}

ObstructionChain alpha_split_first_method(const Triangulation& t, const PreBranching& w,
                                          const WeakBranching& wb, const DecoratedGraph& split) {
  return alpha_split(t, w, wb, split, false, frozen_first_method_row());
}

ObstructionChain alpha_split_second_method(const Triangulation& t, const PreBranching& w,
                                           const WeakBranching& wb, const DecoratedGraph& split) {
  return alpha_split(t, w, wb, split, true, false);
}

}  // namespace spinscape

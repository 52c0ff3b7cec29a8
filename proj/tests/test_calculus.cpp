#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "spinscape/branching.hpp"
#include "spinscape/graph.hpp"
#include "spinscape/obstruction.hpp"
#include "spinscape/tri.hpp"

using namespace spinscape;

namespace {

std::string fixture_path(const std::string& name) { return std::string(FIXTURES_DIR "/") + name; }

const std::vector<std::string>& all_fixtures() {
  static const std::vector<std::string> v = {"s3_punctured.tri", "lens_q4.tri",
                                             "fig8_complement.tri", "fig8_sister.tri"};
  return v;
}

template <class F>
void for_each_state(const Triangulation& t, F f) {
  for (const PreBranching& w : enumerate_pre_branchings(t))
    for (const WeakBranching& wb : enumerate_weak_branchings(t, w)) f(w, wb);
}

Subedge mk(int tail_or, int head_or, int iorient, const Perm3& p, int weight2x) {
  Subedge s;
  s.tail_or = tail_or;
  s.head_or = head_or;
  s.iorient = iorient;
  s.perm = p;
  s.weight2x = weight2x;
  return s;
}

const Perm3 id3{};
const Perm3 t01 = perm3_swap(0, 1);
const Perm3 t12 = perm3_swap(1, 2);
const Perm3 t02 = perm3_swap(0, 2);

Perm3 random_perm(std::mt19937& rng, bool odd) {
  return all_perm3()[(odd ? 3 : 0) + std::uniform_int_distribution<int>(0, 2)(rng)];
}

// A pattern chain built with explicit sign bookkeeping: every stretch weight
// is recorded with the coefficient its slot carries in the closed form.
struct BuiltPattern {
  std::vector<Subedge> parts;
  int expected2x = 0;
};

BuiltPattern build_pattern(std::mt19937& rng, int tail_letter, bool capped, int k, int h,
                           int evens) {
  std::uniform_int_distribution<int> coin(0, 1);
  auto odd_w = [&] { return 1 + 2 * coin(rng); };
  auto even_w = [&] { return 2 * coin(rng); };

  struct Slot {
    int t, hd, io, coeff;
  };
  std::vector<Slot> slots;
  const Slot rRl{+1, -1, +1, 0}, rLl{+1, -1, -1, 0}, lRr{-1, +1, +1, 0}, lLr{-1, +1, -1, 0};
  auto with = [](Slot s, int c) {
    s.coeff = c;
    return s;
  };
  if (tail_letter > 0) {
    if (!capped) {
      for (int i = 0; i < k; ++i) {
        slots.push_back(with(rRl, +1));  // a_i
        slots.push_back(with(lLr, -1));  // b_i
      }
      for (int j = 0; j < h; ++j) {
        slots.push_back(with(rLl, -1));  // d_j
        slots.push_back(with(lRr, +1));  // c_j
      }
    } else {
      slots.push_back(with(rRl, -1));  // b_0
      for (int i = 0; i < k; ++i) {
        slots.push_back(with(lLr, +1));  // a_i
        slots.push_back(with(rRl, -1));  // b_i
      }
      for (int j = 0; j < h; ++j) {
        slots.push_back(with(lRr, -1));  // d_j
        slots.push_back(with(rLl, +1));  // c_j
      }
      slots.push_back(with(lRr, -1));  // d_0
    }
  } else {
    if (!capped) {
      for (int i = 0; i < k; ++i) {
        slots.push_back(with(lLr, +1));
        slots.push_back(with(rRl, -1));
      }
      for (int j = 0; j < h; ++j) {
        slots.push_back(with(lRr, -1));
        slots.push_back(with(rLl, +1));
      }
    } else {
      slots.push_back(with(lLr, -1));
      for (int i = 0; i < k; ++i) {
        slots.push_back(with(rRl, +1));
        slots.push_back(with(lLr, -1));
      }
      for (int j = 0; j < h; ++j) {
        slots.push_back(with(rLl, -1));
        slots.push_back(with(lRr, +1));
      }
      slots.push_back(with(rLl, -1));
    }
  }
  for (int i = 0; i < evens; ++i) {
    int pos = std::uniform_int_distribution<int>(0, static_cast<int>(slots.size()))(rng);
    int letter = pos == 0 ? tail_letter : slots[pos - 1].hd;
    slots.insert(slots.begin() + pos, Slot{letter, letter, 0, +1});
  }

  BuiltPattern out;
  for (const Slot& s : slots) {
    bool odd = s.t != s.hd;
    int w = odd ? odd_w() : even_w();
    out.parts.push_back(mk(s.t, s.hd, s.io, random_perm(rng, odd), w));
    out.expected2x = (out.expected2x + s.coeff * w + 8) % 4;
  }
  return out;
}

}  // namespace

TEST_CASE("stretch reversal mirrors fusion") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> coin(0, 1);
  int fused_pairs = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Subedge x, y;
    for (Subedge* s : {&x, &y}) {
      s->tail_or = coin(rng) ? +1 : -1;
      s->head_or = coin(rng) ? +1 : -1;
      s->iorient = s->odd() ? (coin(rng) ? +1 : -1) : 0;
      s->perm = random_perm(rng, s->odd());
      s->weight2x = (s->odd() ? 1 : 0) + 2 * coin(rng);
    }
    CHECK(subedge_reversed(subedge_reversed(x)) == x);
    if (x.head_or != y.tail_or) continue;
    bool legal = true;
    Subedge xy;
    try {
      xy = fuse_A_weighted(x, y);
    } catch (const TriError&) {
      legal = false;
    }
    Subedge ry_rx;
    bool legal_rev = true;
    try {
      ry_rx = fuse_A_weighted(subedge_reversed(y), subedge_reversed(x));
    } catch (const TriError&) {
      legal_rev = false;
    }
    CHECK(legal == legal_rev);
    if (legal) {
      ++fused_pairs;
      CHECK(ry_rx == subedge_reversed(xy));
    }
  }
  CHECK(fused_pairs > 50);
}

TEST_CASE("weighted fusion follows the rule table") {
  auto w2 = [](const Subedge& s) { return s.weight2x; };

  // Even with even: weights add, ends persist.
  Subedge rr = fuse_A_weighted(mk(+1, +1, 0, id3, 2), mk(+1, +1, 0, perm3_cycle012(), 2));
  CHECK(w2(rr) == 0);
  CHECK(rr.tail_or == +1);
  CHECK(rr.head_or == +1);
  CHECK(rr.perm == perm3_cycle012());
  Subedge ll = fuse_A_weighted(mk(-1, -1, 0, id3, 2), mk(-1, -1, 0, id3, 0));
  CHECK(w2(ll) == 2);
  CHECK(ll.odd() == false);

  // Even with odd on either side: the odd stretch keeps its orientation.
  Subedge a = fuse_A_weighted(mk(+1, +1, 0, id3, 2), mk(+1, -1, +1, t01, 1));
  CHECK(w2(a) == 3);
  CHECK(a.iorient == +1);
  CHECK(a.odd());
  Subedge b = fuse_A_weighted(mk(-1, +1, -1, t12, 3), mk(+1, +1, 0, id3, 2));
  CHECK(w2(b) == 1);
  CHECK(b.iorient == -1);

  // Odd with odd, same internal letter: weights add.
  Subedge s1 = fuse_A_weighted(mk(-1, +1, -1, t01, 1), mk(+1, -1, -1, t12, 1));
  CHECK(s1.odd() == false);
  CHECK(s1.tail_or == -1);
  CHECK(w2(s1) == 2);
  CHECK(s1.iorient == 0);
  Subedge s2 = fuse_A_weighted(mk(+1, -1, +1, t01, 3), mk(-1, +1, +1, t02, 1));
  CHECK(s2.tail_or == +1);
  CHECK(w2(s2) == 0);

  // Odd with odd, different internal letters: the second weight flips sign.
  CHECK(w2(fuse_A_weighted(mk(-1, +1, -1, t01, 1), mk(+1, -1, +1, t01, 3))) == 2);
  CHECK(w2(fuse_A_weighted(mk(-1, +1, +1, t01, 1), mk(+1, -1, -1, t01, 1))) == 0);
  CHECK(w2(fuse_A_weighted(mk(+1, -1, +1, t12, 1), mk(-1, +1, -1, t12, 1))) == 0);
  CHECK(w2(fuse_A_weighted(mk(+1, -1, -1, t02, 3), mk(-1, +1, +1, t01, 1))) == 2);

  // The two adjacencies outside the table are refused.
  CHECK_THROWS_AS(fuse_A_weighted(mk(+1, -1, -1, t01, 1), mk(-1, +1, -1, t12, 1)), TriError);
  CHECK_THROWS_AS(fuse_A_weighted(mk(-1, +1, +1, t01, 1), mk(+1, -1, +1, t12, 1)), TriError);

  // Ends that do not meet are refused.
  CHECK_THROWS_AS(fuse_A_weighted(mk(+1, +1, 0, id3, 0), mk(-1, -1, 0, id3, 0)), TriError);
}

TEST_CASE("color fusion composes permutations in chain order") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Perm3> ps;
    Perm3 total;
    for (int i = 0; i < 5; ++i) {
      ps.push_back(all_perm3()[std::uniform_int_distribution<int>(0, 5)(rng)]);
      total = compose(ps.back(), total);
    }
    Perm3 left = ps[0];
    for (int i = 1; i < 5; ++i) left = fuse_A_colors(left, ps[i]);
    Perm3 right = ps[4];
    for (int i = 3; i >= 0; --i) right = fuse_A_colors(ps[i], right);
    CHECK(left == total);
    CHECK(right == total);
  }
}

TEST_CASE("inverting a product of two swaps balances against the third") {
  const Perm3 swaps[3] = {t01, t12, t02};
  int cases = 0;
  for (const Perm3& u1 : swaps)
    for (const Perm3& u2 : swaps)
      for (const Perm3& u3 : swaps) {
        Perm3 lhs = compose(compose(u2, u1).inverse(), u3);
        Perm3 rhs = compose(compose(u2, u3).inverse(), u1);
        CHECK(lhs == rhs);
        ++cases;
      }
  CHECK(cases == 27);
}

TEST_CASE("pattern chains fuse to the closed form in any order") {
  std::mt19937 rng(91);
  std::uniform_int_distribution<int> coin(0, 1), small(0, 3);
  int orders_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int letter = coin(rng) ? +1 : -1;
    BuiltPattern p =
        build_pattern(rng, letter, coin(rng) == 1, small(rng), small(rng), small(rng));
    if (p.parts.empty()) continue;
    Subedge fused = fuse_chain(p.parts);
    CHECK(fused.odd() == false);
    CHECK(fused.tail_or == letter);
    CHECK(fused.head_or == letter);
    CHECK(fused.weight2x == p.expected2x);
    for (int o = 0; o < 10 && p.parts.size() > 1; ++o) {
      std::vector<int> order;
      for (int left = static_cast<int>(p.parts.size()); left > 1; --left)
        order.push_back(std::uniform_int_distribution<int>(0, left - 2)(rng));
      CHECK(fuse_chain_in_order(p.parts, order) == fused);
      ++orders_checked;
    }
  }
  CHECK(orders_checked > 1000);
}

TEST_CASE("a three stretch chain outside the patterns is order dependent") {
  std::vector<Subedge> chain = {mk(+1, -1, +1, t01, 1), mk(-1, +1, +1, t12, 1),
                                mk(+1, -1, -1, t02, 1)};
  Subedge left = fuse_A_weighted(fuse_A_weighted(chain[0], chain[1]), chain[2]);
  Subedge right = fuse_A_weighted(chain[0], fuse_A_weighted(chain[1], chain[2]));
  CHECK(left.odd());
  CHECK(right.odd());
  CHECK(left.perm == right.perm);
  CHECK(left.iorient == -1);
  CHECK(right.iorient == +1);
  CHECK(left.weight2x == 3);
  CHECK(right.weight2x == 1);

  DecoratedGraph g;
  g.vertices.push_back({0, +1, make_branching({0, 1, 2, 3})});
  DecoratedGraph::Edge e;
  e.id = 0;
  e.tail = {0, 0};
  e.head = {0, 1};
  e.parts = chain;
  g.edges.push_back(e);
  CHECK_THROWS_AS(fuse_all_weighted(g), TriError);
}

TEST_CASE("branched family fusion adds colors and refuses odd stretches") {
  Subedge f = fuse_chain({mk(+1, +1, 0, perm3_cycle012(), 0), mk(+1, +1, 0, perm3_cycle021(), 2)});
  CHECK(color_of_perm(f.perm) == EdgeColor::empty);
  CHECK(f.weight2x == 2);

  DecoratedGraph g;
  g.vertices.push_back({0, +1, make_branching({0, 1, 2, 3})});
  DecoratedGraph::Edge e;
  e.id = 0;
  e.tail = {0, 0};
  e.head = {0, 1};
  e.parts = {mk(+1, +1, 0, perm3_cycle012(), 0), mk(+1, +1, 0, perm3_cycle012(), 2)};
  g.edges.push_back(e);
  DecoratedGraph::Edge e2 = e;
  e2.id = 1;
  e2.tail = {0, 2};
  e2.head = {0, 3};
  e2.parts = {mk(+1, +1, 0, id3, 0)};
  g.edges.push_back(e2);
  DecoratedGraph fused = fuse_N(g);
  CHECK(fused.edges[0].parts.size() == 1);
  CHECK(color_of_perm(fused.edges[0].parts[0].perm) == EdgeColor::minus);
  CHECK(fused.edges[0].parts[0].weight2x == 2);

  g.edges[1].parts = {mk(+1, -1, +1, t01, 1)};
  CHECK_THROWS_AS(fuse_N(g), TriError);
}

TEST_CASE("the graph of a state reports that state back") {
  for (const std::string& name : all_fixtures()) {
    CAPTURE(name);
    Triangulation t = load_triangulation(fixture_path(name));
    PreBranching w = find_pre_branching(t);
    WeakBranchingSearch search = find_weak_branching(t, w);
    REQUIRE(search.found);
    const WeakBranching& wb = search.result;
    GF2Vector beta = solve_spin(t, w, wb).particular;

    DecoratedGraph g = graph_of(t, w, wb, &beta);
    CHECK(validate_graph(g).empty());
    GraphState st = state_of(g);
    CHECK(st.omega == w);
    CHECK(st.weights == beta);
    for (std::size_t p = 0; p < t.pairings.size(); ++p) {
      EdgeTypeResult et = classify_edge_type(t.pairings[p], wb.tet[t.pairings[p].src_tet],
                                             wb.tet[t.pairings[p].dst_tet]);
      REQUIRE(!et.odd);
      CHECK(st.colors[p] == et.color);
    }
  }
}

TEST_CASE("graph text serialization is stable under reparsing") {
  Triangulation t = load_triangulation(fixture_path("fig8_complement.tri"));
  PreBranching w = find_pre_branching(t);
  WeakBranchingSearch search = find_weak_branching(t, w);
  REQUIRE(search.found);
  GF2Vector beta = solve_spin(t, w, search.result).particular;
  DecoratedGraph g = graph_of(t, w, search.result, &beta);

  std::string text = serialize_graph(g);
  DecoratedGraph back = parse_graph(text);
  CHECK(validate_graph(back).empty());
  CHECK(serialize_graph(back) == text);

  // The writer normalizes even edges to their flow direction, so the reparse
  // keeps colors along the flow and all weights.
  GraphState st0 = state_of(g), st1 = state_of(back);
  REQUIRE(st0.colors.size() == st1.colors.size());
  for (std::size_t p = 0; p < st0.colors.size(); ++p) {
    EdgeColor along0 = st0.omega.dir[p] == 0 ? st0.colors[p]
                       : st0.colors[p] == EdgeColor::plus  ? EdgeColor::minus
                       : st0.colors[p] == EdgeColor::minus ? EdgeColor::plus
                                                           : EdgeColor::empty;
    CHECK(along0 == st1.colors[p]);
    CHECK(st0.weights.get(p) == st1.weights.get(p));
  }
}

TEST_CASE("odd edges carry their orientation token through the format") {
  std::string text =
      "vertex 0 index +1\n"
      "edge 0 : 0,0 -> 0,1 color 102 weight 1/2 iorient +\n"
      "edge 1 : 0,2 -> 0,3 color 021 weight 1 iorient -\n";
  CHECK_THROWS_AS(parse_graph(text), TriError);  // even color with an orientation

  text =
      "vertex 0 index +1\n"
      "edge 0 : 0,0 -> 0,1 color 102 weight 1/2 iorient +\n"
      "edge 1 : 0,2 -> 0,3 color 210 weight -1/2 iorient -\n";
  DecoratedGraph g = parse_graph(text);
  CHECK(g.edges[0].parts[0].odd());
  CHECK(g.edges[0].parts[0].iorient == +1);
  CHECK(g.edges[1].parts[0].weight2x == 3);
  CHECK(serialize_graph(g) == text);

  CHECK_THROWS_AS(parse_graph("vertex 0 index +1\nedge 0 : 0,0 -> 0,1 color 102 weight 1/2\n"),
                  TriError);
  CHECK_THROWS_AS(parse_graph("vertex 0 index 2\n"), TriError);
}

TEST_CASE("weight classes quotient by the vertex action") {
  Triangulation t = load_triangulation(fixture_path("fig8_complement.tri"));
  PreBranching w = find_pre_branching(t);
  WeakBranchingSearch search = find_weak_branching(t, w);
  REQUIRE(search.found);
  DecoratedGraph g = graph_of(t, w, search.result);

  std::mt19937 rng(17);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    GF2Vector w0(g.edges.size());
    for (std::size_t i = 0; i < w0.size(); ++i) w0.set(i, coin(rng) == 1);
    std::vector<bool> flip(g.vertices.size());
    for (std::size_t v = 0; v < flip.size(); ++v) flip[v] = coin(rng) == 1;
    GF2Vector w1 = w0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      int tv = g.edges[e].tail.vertex, hv = g.edges[e].head.vertex;
      if (tv != hv) {
        if (flip[tv]) w1.flip(e);
        if (flip[hv]) w1.flip(e);
      }
    }
    CHECK(weight_class_equal(g, w0, w1));
  }

  // One lone edge flip joins the two vertices an odd number of times and
  // cannot come from vertex flips here.
  GF2Vector w0(g.edges.size()), w1(g.edges.size());
  w1.flip(0);
  CHECK(weight_class_equal(g, w0, w1) == false);

  // Loops never move, so on an all-loop graph only equality survives.
  Triangulation ts = load_triangulation(fixture_path("s3_punctured.tri"));
  PreBranching ws = find_pre_branching(ts);
  WeakBranchingSearch ss = find_weak_branching(ts, ws);
  REQUIRE(ss.found);
  DecoratedGraph gs = graph_of(ts, ws, ss.result);
  GF2Vector z0(gs.edges.size()), z1(gs.edges.size());
  CHECK(weight_class_equal(gs, z0, z1));
  z1.flip(0);
  CHECK(weight_class_equal(gs, z0, z1) == false);
}

TEST_CASE("random pattern splits fuse back to their source graph") {
  std::mt19937 rng(23);
  for (const std::string& name : all_fixtures()) {
    CAPTURE(name);
    Triangulation t = load_triangulation(fixture_path(name));
    PreBranching w = find_pre_branching(t);
    WeakBranchingSearch search = find_weak_branching(t, w);
    REQUIRE(search.found);
    GF2Vector beta = solve_spin(t, w, search.result).particular;
    DecoratedGraph g = graph_of(t, w, search.result, &beta);
    for (int trial = 0; trial < 10; ++trial) {
      DecoratedGraph split = split_edges_random(g, rng);
      CHECK(validate_graph(split).empty());
      DecoratedGraph fused = fuse_all_weighted(split);
      for (std::size_t e = 0; e < g.edges.size(); ++e)
        CHECK(fused.edges[e].parts[0] == g.edges[e].parts[0]);
    }
  }
}

TEST_CASE("both split methods reproduce the obstruction everywhere") {
  std::mt19937 rng(41);
  int states = 0;
  for (const std::string& name : all_fixtures()) {
    CAPTURE(name);
    Triangulation t = load_triangulation(fixture_path(name));
    for_each_state(t, [&](const PreBranching& w, const WeakBranching& wb) {
      ++states;
      ObstructionChain ref = alpha_bar(t, w, wb);
      DecoratedGraph g = graph_of(t, w, wb);
      for (int trial = 0; trial < 3; ++trial) {
        DecoratedGraph split = split_edges_random(g, rng);
        CHECK(alpha_split_first_method(t, w, wb, split).chain == ref.chain);
        CHECK(alpha_split_second_method(t, w, wb, split).chain == ref.chain);
      }
    });
  }
  CHECK(states == 224);
}

TEST_CASE("twenty fresh splittings per fixture agree with the fused computation") {
  std::mt19937 rng(59);
  for (const std::string& name : all_fixtures()) {
    CAPTURE(name);
    Triangulation t = load_triangulation(fixture_path(name));
    PreBranching w = find_pre_branching(t);
    WeakBranchingSearch search = find_weak_branching(t, w);
    REQUIRE(search.found);
    const WeakBranching& wb = search.result;
    ObstructionChain ref = alpha_bar(t, w, wb);
    DecoratedGraph g = graph_of(t, w, wb);
    for (int trial = 0; trial < 20; ++trial) {
      DecoratedGraph split = split_edges_random(g, rng);
      CHECK(alpha_split_first_method(t, w, wb, split).chain == ref.chain);
      CHECK(alpha_split_second_method(t, w, wb, split).chain == ref.chain);
    }
  }
}

TEST_CASE("the first method row binding is forced") {
  CHECK(frozen_first_method_row() == true);
  std::mt19937 rng(67);
  int mismatches = 0;
  for (const std::string& name : all_fixtures()) {
    Triangulation t = load_triangulation(fixture_path(name));
    for_each_state(t, [&](const PreBranching& w, const WeakBranching& wb) {
      ObstructionChain ref = alpha_bar(t, w, wb);
      DecoratedGraph g = graph_of(t, w, wb);
      DecoratedGraph split = split_edges_random(g, rng);
      if (!(alpha_split_first_method_with(t, w, wb, split, false).chain == ref.chain))
        ++mismatches;
    });
  }
  CHECK(mismatches > 0);
}

TEST_CASE("split methods refuse a graph from a different state") {
  Triangulation t = load_triangulation(fixture_path("lens_q4.tri"));
  std::vector<PreBranching> ws = enumerate_pre_branchings(t);
  REQUIRE(ws.size() >= 2);
  WeakBranchingSearch s0 = find_weak_branching(t, ws[0]);
  REQUIRE(s0.found);
  DecoratedGraph g = graph_of(t, ws[0], s0.result);
  WeakBranchingSearch s1 = find_weak_branching(t, ws[1]);
  REQUIRE(s1.found);
  CHECK_THROWS_AS(alpha_split_second_method(t, ws[1], s1.result, g), std::invalid_argument);
}

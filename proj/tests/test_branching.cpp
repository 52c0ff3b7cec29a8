#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "spinscape/branching.hpp"

using namespace spinscape;

namespace {
std::string fixture_path(const std::string& name) { return std::string(FIXTURES_DIR "/") + name; }
}  // namespace

TEST_CASE("twenty four branchings, twelve per index") {
  const auto& all = enumerate_tet_branchings();
  REQUIRE(all.size() == 24);
  int plus = 0;
  for (const auto& b : all) plus += b.index == +1 ? 1 : 0;
  CHECK(plus == 12);
  CHECK(make_branching({0, 1, 2, 3}).index == +1);
  // A transposition flips the index.
  CHECK(make_branching({1, 0, 2, 3}).index == -1);
}

TEST_CASE("in out table is coherent with gluing parity") {
  // The frozen germ-direction table must make the label permutation of a
  // gluing even exactly when the two germ directions are consistent (one in,
  // one out). Checked over every admissible pairing shape and branching pair.
  long long checked = 0;
  for (int sf = 0; sf < 4; ++sf)
    for (int df = 0; df < 4; ++df) {
      auto dv = face_vertices(df);
      std::array<int, 3> vm = dv;
      std::sort(vm.begin(), vm.end());
      do {
        FacePairing p;
        p.src_tet = 0;
        p.src_face = sf;
        p.dst_tet = 1;
        p.dst_face = df;
        p.vertex_map = vm;
        if (pairing_tet_perm(p).sign() != -1) continue;
        for (const auto& bs : enumerate_tet_branchings())
          for (const auto& bd : enumerate_tet_branchings()) {
            bool even = gluing_label_perm(p, bs, bd).sign() == +1;
            bool consistent = germ_out(bs, sf) != germ_out(bd, df);
            REQUIRE(even == consistent);
            ++checked;
          }
      } while (std::next_permutation(vm.begin(), vm.end()));
    }
  CHECK(checked == 27648);
}

TEST_CASE("branchings distribute four to one over the six patterns") {
  std::map<std::array<bool, 4>, int> hist;
  for (const auto& b : enumerate_tet_branchings()) {
    auto p = out_pattern(b);
    CHECK(std::count(p.begin(), p.end(), true) == 2);
    hist[p]++;
  }
  CHECK(hist.size() == 6);
  for (const auto& [p, n] : hist) {
    CHECK(n == 4);
    auto compat = compatible_tet_branchings(p);
    CHECK(compat.size() == 4);
    for (const auto& b : compat) CHECK(out_pattern(b) == p);
  }
  CHECK_THROWS(compatible_tet_branchings({true, true, true, false}));
}

TEST_CASE("the four compatible branchings split two and two by index") {
  for (const auto& b : enumerate_tet_branchings()) {
    auto compat = compatible_tet_branchings(out_pattern(b));
    int plus = 0;
    for (const auto& c : compat) plus += c.index == +1 ? 1 : 0;
    CHECK(plus == 2);
  }
}

TEST_CASE("euler orientation gives a valid pre-branching on all fixtures") {
  for (const char* name :
       {"s3_punctured.tri", "lens_q4.tri", "fig8_complement.tri", "fig8_sister.tri"}) {
    auto t = load_triangulation(fixture_path(name));
    auto w = find_pre_branching(t);
    CHECK(pre_branching_valid(t, w));
    // Determinism.
    CHECK(find_pre_branching(t) == w);
  }
}

TEST_CASE("loops self balance in a pre-branching") {
  // The punctured-sphere fixture's gluing graph is one vertex with two loops.
  auto t = load_triangulation(fixture_path("s3_punctured.tri"));
  auto g = gluing_graph(t);
  REQUIRE(g.n_vertices == 1);
  for (const auto& e : g.edges) CHECK(e.u == e.v);
  CHECK(pre_branching_valid(t, find_pre_branching(t)));
}

TEST_CASE("enumerating pre-branchings matches brute force") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  auto all = enumerate_pre_branchings(t);
  CHECK(!all.empty());
  CHECK(all.size() <= 16);
  for (const auto& w : all) CHECK(pre_branching_valid(t, w));
  // The canonical search result is among them.
  auto w0 = find_pre_branching(t);
  CHECK(std::find(all.begin(), all.end(), w0) != all.end());
}

TEST_CASE("weak branchings exist for every omega on the figure-eight fixture") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  for (const auto& w : enumerate_pre_branchings(t)) {
    auto s = find_weak_branching(t, w);
    REQUIRE(s.found);
    CHECK(weak_branching_valid(t, s.result));
    for (const auto& p : t.pairings) {
      auto r = classify_edge_type(p, s.result.tet[p.src_tet], s.result.tet[p.dst_tet]);
      CHECK_FALSE(r.odd);
    }
  }
}

TEST_CASE("edge classification reads the label permutation") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  auto w = find_pre_branching(t);
  auto s = find_weak_branching(t, w);
  REQUIRE(s.found);
  std::set<int> colors_seen;
  for (const auto& p : t.pairings) {
    auto r = classify_edge_type(p, s.result.tet[p.src_tet], s.result.tet[p.dst_tet]);
    REQUIRE_FALSE(r.odd);
    CHECK(r.perm.sign() == +1);
    colors_seen.insert(int(r.color));
    if (r.perm.is_identity()) CHECK(r.color == EdgeColor::empty);
    if (r.perm == perm3_cycle012()) CHECK(r.color == EdgeColor::plus);
    if (r.perm == perm3_cycle021()) CHECK(r.color == EdgeColor::minus);
    // Reading from the other side inverts the permutation.
    auto rq = classify_edge_type(pairing_flipped(p), s.result.tet[p.dst_tet],
                                 s.result.tet[p.src_tet]);
    CHECK(rq.perm == r.perm.inverse());
  }
  CHECK(!colors_seen.empty());
}

TEST_CASE("a global branching induces a valid weak branching") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  auto res = global_branching_exists(t);
  REQUIRE(res.branchable);
  REQUIRE(res.witness.size() == 2);
  // All edges are empty under the witness.
  for (const auto& p : t.pairings) {
    auto r = classify_edge_type(p, res.witness[p.src_tet], res.witness[p.dst_tet]);
    CHECK_FALSE(r.odd);
    CHECK(r.color == EdgeColor::empty);
  }
  // The induced germ directions form a pre-branching, and the witness is a
  // weak branching for it, found by the search as well.
  TriIndex idx(t);
  PreBranching w;
  w.dir.resize(t.pairings.size());
  for (std::size_t i = 0; i < t.pairings.size(); ++i) {
    const auto& p = t.pairings[i];
    w.dir[i] = germ_out(res.witness[p.src_tet], p.src_face) ? 0 : 1;
  }
  CHECK(pre_branching_valid(t, w));
  WeakBranching wb{res.witness, w};
  CHECK(weak_branching_valid(t, wb));
  auto found = find_weak_branching(t, w);
  CHECK(found.found);
}

TEST_CASE("sister fixture is not branchable") {
  auto t = load_triangulation(fixture_path("fig8_sister.tri"));
  auto res = global_branching_exists(t);
  CHECK_FALSE(res.branchable);
  CHECK(res.exhaustive);
  CHECK(res.assignments_total == 576);
}

TEST_CASE("taut signs: two per tetrahedron, even per class, omega determined") {
  for (const char* name : {"s3_punctured.tri", "lens_q4.tri", "fig8_complement.tri"}) {
    auto t = load_triangulation(fixture_path(name));
    for (const auto& w : enumerate_pre_branchings(t)) {
      auto wbs = enumerate_weak_branchings(t, w);
      if (wbs.empty()) continue;
      std::vector<int> reference;
      for (const auto& wb : wbs) {
        auto taut = z2_taut(t, w, wb);
        for (int tet = 0; tet < t.n_tets; ++tet) {
          int minus = 0;
          for (int s = 0; s < 6; ++s) minus += taut.sign[tet * 6 + s] == -1 ? 1 : 0;
          CHECK(minus == 2);
        }
        for (const auto& c : compute_edge_classes(t)) {
          int minus = 0;
          for (const auto& e : c.fiber) minus += taut.sign[e.tet * 6 + edge_slot(e.a, e.b)] == -1;
          CHECK(minus % 2 == 0);
        }
        if (reference.empty())
          reference = taut.sign;
        else
          CHECK(taut.sign == reference);
      }
    }
  }
}

TEST_CASE("pre branching and weak branching serialization round trips") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  auto w = find_pre_branching(t);
  auto w2 = parse_pre_branching(serialize_pre_branching(w));
  CHECK(w2 == w);
  auto s = find_weak_branching(t, w);
  REQUIRE(s.found);
  auto wb2 = parse_weak_branching(serialize_weak_branching(s.result), w);
  CHECK(wb2.tet.size() == s.result.tet.size());
  for (std::size_t i = 0; i < wb2.tet.size(); ++i) CHECK(wb2.tet[i] == s.result.tet[i]);
}

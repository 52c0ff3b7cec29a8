#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "spinscape/tri.hpp"

using namespace spinscape;

namespace {

std::string fixture_path(const std::string& name) { return std::string(FIXTURES_DIR "/") + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("face vertex conventions") {
  CHECK(face_vertices(0) == std::array<int, 3>{1, 2, 3});
  CHECK(face_vertices(2) == std::array<int, 3>{0, 1, 3});
  CHECK(face_vertex_rank(0, 3) == 2);
  CHECK(edge_slot(1, 3) == 4);
  CHECK(edge_slot_vertices(4) == std::array<int, 2>{1, 3});
}

TEST_CASE("one tetrahedron fixture parses and validates") {
  auto t = load_triangulation(fixture_path("s3_punctured.tri"));
  CHECK(t.n_tets == 1);
  CHECK(t.pairings.size() == 2);
  CHECK(validate(t).empty());

  auto g = gluing_graph(t);
  CHECK(g.n_vertices == 1);
  CHECK(g.degree(0) == 4);
  CHECK(g.connected());
}

TEST_CASE("json mirror matches the text form") {
  auto a = load_triangulation(fixture_path("s3_punctured.tri"));
  auto b = load_triangulation(fixture_path("s3_punctured.json"));
  CHECK(serialize_triangulation(a) == serialize_triangulation(b));
  auto c = parse_triangulation_json(serialize_triangulation_json(a));
  CHECK(serialize_triangulation(c) == serialize_triangulation(a));
}

TEST_CASE("figure-eight fixture shape") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  CHECK(t.n_tets == 2);
  CHECK(validate(t).empty());
  auto g = gluing_graph(t);
  CHECK(g.n_vertices == 2);
  CHECK(g.edges.size() == 4);
  CHECK(g.degree(0) == 4);
  CHECK(g.degree(1) == 4);

  auto classes = compute_edge_classes(t);
  REQUIRE(classes.size() == 2);
  CHECK(classes[0].fiber.size() == 6);
  CHECK(classes[1].fiber.size() == 6);
}

TEST_CASE("edge class fibers partition all abstract edges") {
  for (const char* name :
       {"s3_punctured.tri", "lens_q4.tri", "fig8_complement.tri", "fig8_sister.tri"}) {
    auto t = load_triangulation(fixture_path(name));
    auto classes = compute_edge_classes(t);
    std::size_t total = 0;
    std::set<int> seen;
    for (const auto& c : classes) {
      total += c.fiber.size();
      CHECK(c.fiber[c.ref].sign == +1);
      for (const auto& e : c.fiber) {
        CHECK(e.a < e.b);
        CHECK(seen.insert(e.tet * 6 + edge_slot(e.a, e.b)).second);
      }
    }
    CHECK(total == std::size_t(t.n_tets) * 6);

    auto lookup = edge_class_lookup(t, classes);
    for (int x : lookup) CHECK(x >= 0);
  }
}

TEST_CASE("round trip on canonical form") {
  for (const char* name :
       {"s3_punctured.tri", "lens_q4.tri", "fig8_complement.tri", "fig8_sister.tri"}) {
    auto text = slurp(fixture_path(name));
    auto t = parse_triangulation(text);
    auto canon = serialize_triangulation(t);
    auto t2 = parse_triangulation(canon);
    CHECK(serialize_triangulation(t2) == canon);
  }
}

TEST_CASE("pairing flip is an involution preserving the gluing") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  for (const auto& p : t.pairings) {
    auto q = pairing_flipped(p);
    CHECK(pairing_flipped(q) == p);
    for (int v : face_vertices(p.src_face)) CHECK(pairing_apply_inverse(q, v) == pairing_apply(p, v));
    CHECK(pairing_tet_perm(q).sign() == -1);
  }
}

TEST_CASE("syntax errors carry line numbers") {
  CHECK_THROWS_AS(parse_triangulation("bad"), TriError);
  try {
    parse_triangulation("tri 1\nglue 0 0 : 0 1 : 0 2 3\nglue 0 0 0 1 : 0 1 2\n");
    FAIL("expected parse failure");
  } catch (const TriError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("validation failures are named") {
  const char* self_glued =
      "tri 1\n"
      "glue 0 0 : 0 1 : 0 2 3\n"
      "glue 0 2 : 0 2 : 0 1 3\n";
  CHECK_THROWS_WITH_AS(parse_triangulation(self_glued), doctest::Contains("glued to itself"),
                       TriError);

  Triangulation t = load_triangulation(fixture_path("s3_punctured.tri"));
  // Face (0,2) in two pairings.
  Triangulation doubled = t;
  doubled.pairings[0] = doubled.pairings[1];
  bool twice = false;
  for (const auto& v : validate(doubled))
    if (v.find("paired twice") != std::string::npos) twice = true;
  CHECK(twice);
  // Injecting an orientation-preserving vertex map must be reported.
  Triangulation broken = t;
  broken.pairings[0].vertex_map = {2, 0, 3};
  bool named = false;
  for (const auto& v : validate(broken))
    if (v.find("orientation-preserving") != std::string::npos) named = true;
  CHECK(named);

  Triangulation missing = t;
  missing.pairings.pop_back();
  named = false;
  for (const auto& v : validate(missing))
    if (v.find("unglued") != std::string::npos) named = true;
  CHECK(named);
}

TEST_CASE("vertex classes of the fixtures") {
  CHECK(compute_vertex_classes(load_triangulation(fixture_path("s3_punctured.tri"))).count == 2);
  CHECK(compute_vertex_classes(load_triangulation(fixture_path("lens_q4.tri"))).count == 1);
  CHECK(compute_vertex_classes(load_triangulation(fixture_path("fig8_complement.tri"))).count == 1);
  CHECK(compute_vertex_classes(load_triangulation(fixture_path("fig8_sister.tri"))).count == 1);
}

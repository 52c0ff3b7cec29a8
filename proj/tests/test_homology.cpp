#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spinscape/homology.hpp"

using namespace spinscape;

namespace {
std::string fixture_path(const std::string& name) { return std::string(FIXTURES_DIR "/") + name; }
}  // namespace

TEST_CASE("boundary of boundary vanishes") {
  for (const char* name :
       {"s3_punctured.tri", "lens_q4.tri", "fig8_complement.tri", "fig8_sister.tri"}) {
    auto t = load_triangulation(fixture_path(name));
    auto d2 = boundary_matrix(t, 2);
    auto d3 = boundary_matrix(t, 3);
    REQUIRE(d2.cols() == d3.rows());
    for (std::size_t c = 0; c < d3.cols(); ++c) {
      GF2Vector col(d3.rows());
      for (std::size_t r = 0; r < d3.rows(); ++r)
        if (d3.get(r, c)) col.flip(r);
      CHECK(d2.apply(col).is_zero());
    }
    auto d1 = boundary_matrix(t, 1);
    for (std::size_t c = 0; c < d2.cols(); ++c) {
      GF2Vector col(d2.rows());
      for (std::size_t r = 0; r < d2.rows(); ++r)
        if (d2.get(r, c)) col.flip(r);
      CHECK(d1.apply(col).is_zero());
    }
  }
}

TEST_CASE("matrix shapes follow the cell counts") {
  auto t = load_triangulation(fixture_path("fig8_complement.tri"));
  auto counts = cell_counts(t);
  CHECK(counts.vertices == 1);
  CHECK(counts.edges == 2);
  CHECK(counts.faces == 4);
  CHECK(counts.tets == 2);
  auto d2 = boundary_matrix(t, 2);
  CHECK(d2.rows() == 2);
  CHECK(d2.cols() == 4);
  auto d3 = boundary_matrix(t, 3);
  CHECK(d3.rows() == 4);
  CHECK(d3.cols() == 2);
}

// The one-tetrahedron sphere fixture by hand: faces 0 and 1 glue with vertex
// map (1,2,3)->(0,2,3), faces 2 and 3 with (0,1,3)->(0,1,2). Each face's
// three edges land in the classes listed by the incidence oracle below.
TEST_CASE("one tetrahedron boundary columns by hand") {
  auto t = load_triangulation(fixture_path("s3_punctured.tri"));
  auto classes = compute_edge_classes(t);
  REQUIRE(classes.size() == 3);
  auto lookup = edge_class_lookup(t, classes);
  auto d2 = boundary_matrix(t, 2);
  REQUIRE(d2.rows() == 3);
  REQUIRE(d2.cols() == 2);
  for (std::size_t i = 0; i < t.pairings.size(); ++i) {
    const auto& p = t.pairings[i];
    auto fv = face_vertices(p.src_face);
    std::vector<int> count(classes.size(), 0);
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) count[lookup[p.src_tet * 6 + edge_slot(fv[a], fv[b])]]++;
    for (std::size_t r = 0; r < classes.size(); ++r) CHECK(d2.get(r, i) == (count[r] % 2 == 1));
  }
}

TEST_CASE("homology ranks of the fixtures") {
  auto s3 = load_triangulation(fixture_path("s3_punctured.tri"));
  CHECK(homology_rank(s3, 0) == 1);
  CHECK(homology_rank(s3, 1) == 0);
  CHECK(homology_rank(s3, 2) == 0);

  auto lens = load_triangulation(fixture_path("lens_q4.tri"));
  CHECK(homology_rank(lens, 0) == 1);
  CHECK(homology_rank(lens, 1) == 1);
  CHECK(homology_rank(lens, 2) == 1);

  // For the knot complement the complex is the compactification, so the rank
  // the dual spine sees as first cohomology is the complex's H2.
  auto fig8 = load_triangulation(fixture_path("fig8_complement.tri"));
  CHECK(homology_rank(fig8, 0) == 1);
  CHECK(homology_rank(fig8, 1) == 0);
  CHECK(homology_rank(fig8, 2) == 1);

  auto sister = load_triangulation(fixture_path("fig8_sister.tri"));
  CHECK(homology_rank(sister, 0) == 1);
  CHECK(homology_rank(sister, 1) == 0);
  CHECK(homology_rank(sister, 2) == 1);
}

TEST_CASE("solver examples") {
  auto t = load_triangulation(fixture_path("lens_q4.tri"));
  auto d2 = boundary_matrix(t, 2);

  GF2Vector zero(d2.rows());
  auto s0 = gf2_solve(d2, zero);
  REQUIRE(s0.feasible);
  CHECK(s0.particular.is_zero());
  CHECK(s0.kernel.size() == d2.cols() - gf2_rank(d2));

  // Any column of d2 is feasible by construction.
  GF2Vector col(d2.rows());
  for (std::size_t r = 0; r < d2.rows(); ++r)
    if (d2.get(r, 0)) col.flip(r);
  auto s1 = gf2_solve(d2, col);
  REQUIRE(s1.feasible);
  CHECK(d2.apply(s1.particular) == col);
}

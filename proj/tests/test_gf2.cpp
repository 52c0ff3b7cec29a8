#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spinscape/gf2.hpp"

using namespace spinscape;

TEST_CASE("vector basics and chain round trip") {
  GF2Vector v(10);
  v.flip(2);
  v.flip(7);
  v.flip(2);
  v.flip(3);
  CHECK(v.popcount() == 2);
  CHECK(v.get(3));
  CHECK(v.get(7));
  CHECK_FALSE(v.get(2));
  CHECK(v.to_chain_string(1) == "chain 1: 3,7");

  int grade = -1;
  GF2Vector w = parse_chain("chain 1: 3,7", &grade, 10);
  CHECK(grade == 1);
  CHECK(w == v);

  GF2Vector empty = parse_chain("chain 2:", &grade, 4);
  CHECK(grade == 2);
  CHECK(empty.is_zero());
  CHECK(empty.size() == 4);
  CHECK(empty.to_chain_string(2) == "chain 2:");
}

TEST_CASE("xor is an involution") {
  GF2Vector a(65), b(65);
  a.flip(0);
  a.flip(64);
  b.flip(64);
  b.flip(13);
  GF2Vector c = a ^ b;
  CHECK(c.get(0));
  CHECK(c.get(13));
  CHECK_FALSE(c.get(64));
  CHECK((c ^ b) == a);
}

// Worked example: rows x0+x1, x1+x2, x0+x2 over GF(2). The three rows sum to
// zero, so the rank is 2 and the kernel is spanned by (1,1,1).
TEST_CASE("solve on a rank two system") {
  GF2Matrix a(3, 3);
  a.set(0, 0, true);
  a.set(0, 1, true);
  a.set(1, 1, true);
  a.set(1, 2, true);
  a.set(2, 0, true);
  a.set(2, 2, true);
  CHECK(gf2_rank(a) == 2);

  GF2Vector b(3);
  b.set(0, true);
  b.set(1, true);
  GF2Solution s = gf2_solve(a, b);
  REQUIRE(s.feasible);
  CHECK(a.apply(s.particular) == b);
  REQUIRE(s.kernel.size() == 1);
  CHECK(s.kernel[0].popcount() == 3);
  CHECK(a.apply(s.kernel[0]).is_zero());

  // b with odd total parity is outside the column span.
  GF2Vector bad(3);
  bad.set(0, true);
  GF2Solution t = gf2_solve(a, bad);
  CHECK_FALSE(t.feasible);
}

TEST_CASE("kernel dimension equals cols minus rank") {
  GF2Matrix a(2, 5);
  a.set(0, 0, true);
  a.set(0, 3, true);
  a.set(1, 1, true);
  a.set(1, 3, true);
  a.set(1, 4, true);
  auto k = gf2_kernel(a);
  CHECK(k.size() == 3);
  for (const auto& v : k) CHECK(a.apply(v).is_zero());
  CHECK(gf2_span_rank(k) == 3);
}

TEST_CASE("span membership") {
  GF2Vector g1(4), g2(4);
  g1.flip(0);
  g1.flip(1);
  g2.flip(1);
  g2.flip(2);
  std::vector<GF2Vector> gens{g1, g2};

  GF2Vector in(4);
  in.flip(0);
  in.flip(2);
  CHECK(gf2_in_span(gens, in));

  GF2Vector out(4);
  out.flip(3);
  CHECK_FALSE(gf2_in_span(gens, out));
  CHECK(gf2_in_span({}, GF2Vector(4)));
}

TEST_CASE("transpose and apply agree") {
  GF2Matrix a(2, 3);
  a.set(0, 1, true);
  a.set(1, 2, true);
  GF2Matrix t = a.transpose();
  CHECK(t.rows() == 3);
  CHECK(t.get(1, 0));
  CHECK(t.get(2, 1));
  GF2Vector x(2);
  x.set(0, true);
  GF2Vector y = t.apply(x);
  CHECK(y.get(1));
  CHECK_FALSE(y.get(2));
}

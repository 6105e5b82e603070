#include <catch2/catch_amalgamated.hpp>

#include "ratkon/pairing.hpp"

using namespace ratkon;

namespace {

const Color X{"x", false};
const Color DX{"x", true};
const Color Y{"y", false};
const Color Z{"z", false};

}  // namespace

TEST_CASE("welding a dual strut onto a beaded strut keeps the bead", "[pairing]") {
  DiagramSum a = strut_sum(DX, Y, GroupRingElement::one(), 4);
  DiagramSum b = strut_sum(X, Z, GroupRingElement::gen(1), 4);
  REQUIRE(pair_all(a, b, {"x"}) == strut_sum(Y, Z, GroupRingElement::gen(1), 4));
}

TEST_CASE("pairing the quadratic exponential term doubles the single weld", "[pairing]") {
  // <exp(-1/2 m^-1 strut(dx, dx)), strut(x,y) u strut(x,y)> at m = 3: the two
  // bijections of legs contribute equally, giving -1/3 strut(y, y).
  DiagramSum g = strut_sum(DX, DX, GroupRingElement::one(), 4, Rat(-1, 6));
  DiagramSum bb = disjoint_union(strut_sum(X, Y, GroupRingElement::one(), 4),
                                 strut_sum(X, Y, GroupRingElement::one(), 4));
  REQUIRE(pair_all(exp_union(g, 2), bb, {"x"}) ==
          strut_sum(Y, Y, GroupRingElement::one(), 4, Rat(-1, 3)));
}

TEST_CASE("pairing against the unit is the identity filter", "[pairing]") {
  DiagramSum b = strut_sum(Y, Z, GroupRingElement::gen(2), 4);
  REQUIRE(pair_all(DiagramSum::unit(4), b, {"x"}) == b);

  // a leftover plain leg in the pairing color kills the term
  DiagramSum withx = strut_sum(X, Z, GroupRingElement::one(), 4);
  REQUIRE(pair_all(DiagramSum::unit(4), withx, {"x"}).is_zero());

  // mismatched counts kill the term as well
  DiagramSum one_dual = strut_sum(DX, Y, GroupRingElement::one(), 4);
  DiagramSum two_plain = disjoint_union(strut_sum(X, Y, GroupRingElement::one(), 4),
                                        strut_sum(X, Z, GroupRingElement::one(), 4));
  REQUIRE(pair_all(one_dual, two_plain, {"x"}).is_zero());
}

TEST_CASE("flat gluing hits subsets and keeps the rest", "[pairing]") {
  DiagramSum a = exp_union(strut_sum(DX, Y, GroupRingElement::one(), 4), 2);
  DiagramSum b = strut_sum(X, Z, GroupRingElement::one(), 4);
  REQUIRE(flat_glue(a, b, {"x"}) ==
          b + strut_sum(Y, Z, GroupRingElement::one(), 4));

  // with no dual legs the flat gluing is the disjoint union
  DiagramSum plain = strut_sum(Y, Y, GroupRingElement::gen(1), 4, Rat(1, 2));
  REQUIRE(flat_glue(plain, b, {"x"}) == disjoint_union(plain, b));
}

TEST_CASE("divergence welds duals into plains of the same term", "[pairing]") {
  DiagramSum s = exp_union(strut_sum(Y, DX, GroupRingElement::one(), 4), 2);
  REQUIRE(divergence(s, {"x"}) == DiagramSum::unit(4));

  DiagramSum bad = strut_sum(X, X, GroupRingElement::one(), 4);
  REQUIRE_THROWS_AS(divergence(bad, {"x"}), not_substantial_error);
}

TEST_CASE("wrap contraction pairs the wrap color across a union", "[pairing]") {
  DiagramSum s = disjoint_union(strut_sum(wrap_color(true), X, GroupRingElement::one(), 4),
                                strut_sum(wrap_color(), Y, GroupRingElement::one(), 4));
  REQUIRE(contract_h(s) == strut_sum(X, Y, GroupRingElement::one(), 4));

  // dual wrap legs with nothing to land on vanish
  DiagramSum lone = strut_sum(wrap_color(true), X, GroupRingElement::one(), 4);
  REQUIRE(contract_h(lone).is_zero());
}

TEST_CASE("the divergence enumerates exactly the injective assignments", "[pairing]") {
  // A four-legged wheel recolored to two duals and two plains: the two
  // injections are the only contributions.
  Diagram d = wheel_of_word({1, 1, 1, 1});
  d.legs = {DX, DX, X, X};
  DiagramSum s = DiagramSum::single(d, 8);

  DiagramSum byhand(8);
  for (auto& [dd, c] : s.terms()) {
    byhand.add(weld_pairs(dd, {{0, 2}, {1, 3}}), c);
    byhand.add(weld_pairs(dd, {{0, 3}, {1, 2}}), c);
  }
  REQUIRE(divergence(s, {"x"}) == byhand);
}

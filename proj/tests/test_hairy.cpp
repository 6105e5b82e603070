#include <catch2/catch_amalgamated.hpp>

#include "ratkon/hairy.hpp"

using namespace ratkon;

namespace {

const Color X{"x", false};
const Color Y{"y", false};

int hair_legs(const Diagram& d, const std::string& base) {
  int n = 0;
  for (auto& l : d.legs) n += (l.base == base);
  return n;
}

}  // namespace

TEST_CASE("hair expands a bead into leg slices", "[hairy]") {
  DiagramSum st = strut_sum(X, Y, GroupRingElement::gen(1), 6);
  DiagramSum h = hair(st, 2);
  REQUIRE(h.size() == 3);

  // zero hairs: the bare strut with trivial bead
  DiagramSum slice0(6), slice1(6), slice2(6);
  for (auto& [d, c] : h.terms()) {
    int n = hair_legs(d, "h1");
    if (n == 0) slice0.add(d, c);
    if (n == 1) slice1.add(d, c);
    if (n == 2) slice2.add(d, c);
  }
  REQUIRE(slice0 == strut_sum(X, Y, GroupRingElement::one(), 6));

  // one hair: the caterpillar with the leg spliced into the arc
  Diagram cat;
  cat.legs = {hair_color(1), X, Y};
  cat.n_int = 1;
  cat.edges.push_back({{3, 0}, {0, 0}, Bead::one()});
  cat.edges.push_back({{3, 1}, {1, 0}, Bead::one()});
  cat.edges.push_back({{3, 2}, {2, 0}, Bead::one()});
  REQUIRE(slice1 == DiagramSum::single(cat, 6));

  // two hairs: a single caterpillar class weighted by the 1/2! of the
  // exponential-letter expansion (the canonical orientation fixes the sign)
  REQUIRE(slice2.size() == 1);
  for (auto& [d, c] : slice2.terms()) REQUIRE(c * c == Rat(1, 4));
}

TEST_CASE("hair is budget-monotone and respects trivial beads", "[hairy]") {
  DiagramSum st = strut_sum(X, Y, GroupRingElement::one(), 6);
  REQUIRE(hair(st, 3) == st);

  // a reducible bead word expands like its reduction
  Diagram d;
  d.legs = {X, Y};
  Bead b;
  b.parts.push_back(FreeWord::gen(1));
  b.parts.push_back(FreeWord::gen(1, -1));
  d.edges.push_back({{0, 0}, {1, 0}, b});
  DiagramSum s = DiagramSum::single(d, 6);
  REQUIRE(hair(s, 2) == hair(st, 2));
}

TEST_CASE("the degree-one splice adds one wrap leg with zero total weight", "[hairy]") {
  DiagramSum st = strut_sum(X, Y, GroupRingElement::gen(1), 6);
  DiagramSum ed = eta_diagrams(st, 1);
  REQUIRE(ed.size() == 2);
  Rat total(0);
  for (auto& [d, c] : ed.terms()) {
    REQUIRE(hair_legs(d, "h") == 1);
    total += c;
  }
  REQUIRE(total == Rat(0));

  // a site that does not appear in any bead gives zero
  REQUIRE(eta_diagrams(st, 2).is_zero());

  // trivial beads have no splice sites
  REQUIRE(eta_diagrams(strut_sum(X, Y, GroupRingElement::one(), 6), 1).is_zero());
}

TEST_CASE("circle traces of h-ring terms materialize as one-legged circles", "[hairy]") {
  // t1 h t2 becomes a circle whose arc reads t2 t1 across the wrap
  HElement e = HElement(LocElement::gen(1)) * HElement::h_power(1) * HElement(LocElement::gen(2));
  Diagram circle;
  circle.legs = {wrap_color()};
  circle.n_int = 1;
  circle.edges.push_back({{1, 0}, {0, 0}, Bead::one()});
  circle.edges.push_back({{1, 2}, {1, 1}, Bead::word(FreeWord::gen(2) * FreeWord::gen(1))});
  REQUIRE(circles_of_h(e, 3) == DiagramSum::single(circle, 3));

  // the pure scalar part contributes a legless beaded circle
  REQUIRE(circles_of_h(HElement::h_power(1), 3).size() == 1);
}

#include "ratkon/wrapping.hpp"

TEST_CASE("the wrapping move demands exactly one dual wrap leg per term", "[wrapping]") {
  LocMatrix M = LocMatrix::identity(1);
  // zero dual wrap legs
  DiagramSum plain = strut_sum(X, Y, GroupRingElement::gen(1), 4);
  REQUIRE_THROWS_AS(wrapping_move(M, plain, 1), wrong_leg_count_error);
  // two dual wrap legs
  DiagramSum twice =
      disjoint_union(strut_sum(wrap_color(true), X, GroupRingElement::one(), 4),
                     strut_sum(wrap_color(true), Y, GroupRingElement::one(), 4));
  REQUIRE_THROWS_AS(wrapping_move(M, twice, 1), wrong_leg_count_error);
}

TEST_CASE("wrapping an identity presentation matrix kills the dual strut", "[wrapping]") {
  LocMatrix M = LocMatrix::identity(1);
  DiagramSum d = strut_sum(wrap_color(true), X, GroupRingElement::one(), 4);
  REQUIRE(wrapping_move(M, d, 1).is_zero());
}

TEST_CASE("hairy gluing with a unit nu reduces to the hair expansion", "[wrapping]") {
  LocMatrix M(0, 0);
  DiagramSum s = strut_sum(X, Y, GroupRingElement::gen(1), 4);
  REQUIRE(hair_nu(M, s, DiagramSum::unit(4), 4, 1) == hair(s, 4));
}

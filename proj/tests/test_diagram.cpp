#include <catch2/catch_amalgamated.hpp>

#include "ratkon/diagram.hpp"

using namespace ratkon;

namespace {

const Color X{"x", false};
const Color Y{"y", false};
const Color Z{"z", false};

// A one-vertex diagram with legs x, y, z attached at the given slots.
Diagram y_graph(int8_t sx, int8_t sy, int8_t sz) {
  Diagram d;
  d.legs = {X, Y, Z};
  d.n_int = 1;
  d.edges.push_back({{0, 0}, {3, sx}, Bead::one()});
  d.edges.push_back({{1, 0}, {3, sy}, Bead::one()});
  d.edges.push_back({{2, 0}, {3, sz}, Bead::one()});
  return d;
}

}  // namespace

TEST_CASE("odd slot permutations flip the sign", "[diagram]") {
  Diagram d1 = y_graph(0, 1, 2);
  Diagram swapped = y_graph(0, 2, 1);   // transposition of two slots
  Diagram rotated = y_graph(1, 2, 0);   // three-cycle, even

  DiagramSum cancel(4);
  cancel.add(d1, 1);
  cancel.add(swapped, 1);
  REQUIRE(cancel.is_zero());

  DiagramSum doubled(4);
  doubled.add(d1, 1);
  doubled.add(swapped, -1);
  REQUIRE(doubled == Rat(2) * DiagramSum::single(d1, 4));

  REQUIRE(DiagramSum::single(rotated, 4) == DiagramSum::single(d1, 4));
}

TEST_CASE("edge reversal involutes the bead", "[diagram]") {
  Diagram a;
  a.legs = {X, Y};
  a.edges.push_back({{0, 0}, {1, 0}, Bead::word(FreeWord::gen(1))});
  Diagram b;
  b.legs = {X, Y};
  b.edges.push_back({{1, 0}, {0, 0}, Bead::word(FreeWord::gen(1, -1))});
  REQUIRE(DiagramSum::single(a, 2) == DiagramSum::single(b, 2));
}

TEST_CASE("a trivially-beaded tadpole cancels itself", "[diagram]") {
  REQUIRE(DiagramSum::single(wheel_of_word({1}), 2).is_zero());
  REQUIRE(!DiagramSum::single(wheel_of_word({1, 1}), 3).is_zero());
  REQUIRE(!DiagramSum::single(wheel_of_word({1, 2}), 3).is_zero());
}

TEST_CASE("wheels are identified up to rotation", "[diagram]") {
  REQUIRE(DiagramSum::single(wheel_of_word({1, 2}), 3) ==
          DiagramSum::single(wheel_of_word({2, 1}), 3));
  REQUIRE(DiagramSum::single(wheel_of_word({1, 2, 2}), 4) ==
          DiagramSum::single(wheel_of_word({2, 2, 1}), 4));

  CyclicSeries c(4);
  c.add_word({1, 2}, 1);
  c.add_word({2, 1}, 1);
  REQUIRE(wheels_from_cyclic(c, 4) == Rat(2) * DiagramSum::single(wheel_of_word({1, 2}), 4));
}

TEST_CASE("strut sums split the bead multilinearly", "[diagram]") {
  GroupRingElement bead = Rat(2) * GroupRingElement::gen(1) + GroupRingElement::gen(2);
  DiagramSum s = strut_sum(X, Y, bead, 4);
  REQUIRE(s.size() == 2);
  REQUIRE(s == Rat(2) * strut_sum(X, Y, GroupRingElement::gen(1), 4) +
                   strut_sum(X, Y, GroupRingElement::gen(2), 4));
}

TEST_CASE("leg relabeling distributes linearly over images", "[diagram]") {
  DiagramSum s = strut_sum(X, Y, GroupRingElement::gen(1), 4);
  DiagramSum r = relabel_legs_linear(s, X, {{X, Bead::one()}, {Y, Bead::one()}});
  REQUIRE(r == s + strut_sum(Y, Y, GroupRingElement::gen(1), 4));
}

TEST_CASE("bead substitution implements basis changes", "[diagram]") {
  // alpha: t1 -> t2^-1 t1 t2 fixing t2, with inverse t1 -> t2 t1 t2^-1.
  std::vector<GroupRingElement> fwd = string_alpha_images(1, 2, 2);
  DiagramSum s = strut_sum(X, Y, GroupRingElement::gen(1), 4);
  DiagramSum moved = substitute_beads(s, fwd);
  FreeWord conj = FreeWord::gen(2, -1) * FreeWord::gen(1) * FreeWord::gen(2);
  REQUIRE(moved == strut_sum(X, Y, GroupRingElement(conj), 4));

  std::vector<GroupRingElement> bwd = {
      GroupRingElement(FreeWord::gen(2) * FreeWord::gen(1) * FreeWord::gen(2, -1)),
      GroupRingElement::gen(2)};
  REQUIRE(substitute_beads(moved, bwd) == s);
}

TEST_CASE("pushing a group element around a color is invertible", "[diagram]") {
  DiagramSum s = strut_sum(X, Y, GroupRingElement::gen(2), 4) +
                 Rat(1, 2) * DiagramSum::single(wheel_of_word({1, 2}), 4);
  FreeWord f = FreeWord::from_letters({1, -2});
  REQUIRE(push_group(s, X, FreeWord()) == s);
  REQUIRE(push_group(push_group(s, X, f), X, f.inverse()) == s);
}

TEST_CASE("disjoint exponentials of opposite arguments cancel", "[diagram]") {
  DiagramSum w = DiagramSum::single(wheel_of_word({1, 2}), 6);
  DiagramSum prod = disjoint_union(exp_union(w), exp_union(Rat(-1) * w));
  REQUIRE(prod == DiagramSum::unit(6));
}

TEST_CASE("exponentials of degree-zero terms need an explicit bound", "[diagram]") {
  DiagramSum st = strut_sum(X, Y, GroupRingElement::one(), 6);
  REQUIRE_THROWS_AS(exp_union(st), cap_exceeded_error);
  REQUIRE(exp_union(st, 2).size() == 3);  // 1, strut, strut^2/2

  DiagramSum u = DiagramSum::unit(4);
  REQUIRE_THROWS_AS(exp_union(u, 2), constant_term_error);
}

TEST_CASE("truncations filter by legs and by degree", "[diagram]") {
  DiagramSum s = strut_sum(X, Y, GroupRingElement::one(), 6) +
                 disjoint_union(strut_sum(X, X, GroupRingElement::one(), 6),
                                strut_sum(X, Y, GroupRingElement::one(), 6)) +
                 DiagramSum::single(wheel_of_word({1, 1}), 6);

  DiagramSum upto2 = truncate_by_legs(s, {"x"}, 2);
  for (auto& [d, c] : upto2.terms()) {
    int n = 0;
    for (auto& l : d.legs) n += (l.base == "x");
    REQUIRE(n <= 2);
  }
  REQUIRE(truncate_by_legs(s, {"x"}, 4) == s);
  REQUIRE(truncate_by_legs(s, {"x"}, 0) ==
          DiagramSum::single(wheel_of_word({1, 1}), 6));

  // degree_part picks by internal vertex count
  REQUIRE(degree_part(s, 2) == DiagramSum::single(wheel_of_word({1, 1}), 6));
  REQUIRE(degree_part(s, 0).size() == 2);
}

TEST_CASE("diagram validation rejects malformed ports", "[diagram]") {
  Diagram d;
  d.legs = {X, Y};
  d.edges.push_back({{0, 0}, {1, 0}, Bead::one()});
  REQUIRE_NOTHROW(d.validate());

  Diagram twice = d;
  twice.legs.push_back(Z);
  twice.edges.push_back({{0, 0}, {2, 0}, Bead::one()});  // slot (0,0) reused
  REQUIRE_THROWS_AS(twice.validate(), error);

  Diagram dangling;
  dangling.legs = {X};
  dangling.n_int = 1;  // the internal vertex has no incident edges
  dangling.edges.push_back({{0, 0}, {1, 0}, Bead::one()});
  REQUIRE_THROWS_AS(dangling.validate(), error);
}

#include <catch2/catch_amalgamated.hpp>

#include "ratkon/gaussian.hpp"
#include "ratkon/hairy.hpp"

using namespace ratkon;

namespace {

const Color X{"x", false};
const Color Y{"y", false};
const Color Z{"z", false};

LocMatrix scalar1x1(const Rat& v) {
  LocMatrix m(1, 1);
  m(0, 0) = LocElement::scalar(v);
  return m;
}

// The doubled-border example matrix [[1, t3 - t2 t1^-1], [*, 1]].
LocMatrix wrap2() {
  GroupRingElement b = GroupRingElement::gen(3) -
                       GroupRingElement(FreeWord::gen(2) * FreeWord::gen(1, -1));
  GRMatrix m(2, 2);
  m(0, 0) = GroupRingElement::one();
  m(1, 1) = GroupRingElement::one();
  m(0, 1) = b;
  m(1, 0) = b.involute();
  return LocMatrix::from_gr(m);
}

}  // namespace

TEST_CASE("a scalar Gaussian is recovered from its exponential", "[gaussian]") {
  // exp(1/2 * 2 * strut(x,x)) decomposes to covariance [2] and unit rest.
  DiagramSum s = exp_union(strut_sum(X, X, GroupRingElement::one(), 8), 3);
  Integrand I = decompose(s, {"x"}, 6);
  REQUIRE(loc_equal(I.cov, scalar1x1(2), 4));
  REQUIRE(I.substantial == DiagramSum::unit(8));
}

TEST_CASE("a diagonal word covariance reads back symmetrized", "[gaussian]") {
  GroupRingElement m00 = GroupRingElement::gen(1) + GroupRingElement::gen(1, -1);
  DiagramSum s = exp_union(strut_sum(X, X, m00, 8, Rat(1, 2)), 2);
  Integrand I = decompose(s, {"x"}, 5);
  LocMatrix want(1, 1);
  want(0, 0) = LocElement::gen(1) + LocElement::gen(1, -1);
  REQUIRE(loc_equal(I.cov, want, 4));
  REQUIRE(I.substantial == DiagramSum::unit(8));
}

TEST_CASE("decomposition works against a non-unit ground term", "[gaussian]") {
  // exp of the doubled-border Gaussian next to a plain strut: the minimal
  // term is that strut, not the empty diagram.
  LocMatrix M = wrap2();
  std::vector<Color> cols{Color{"x1", false}, Color{"x2", false}};
  DiagramSum G(8);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      G += strut_sum(cols[i], cols[j], M(i, j), 8, Rat(1, 2));
  DiagramSum rest = strut_sum(cols[0], Y, GroupRingElement::gen(1), 8);
  Integrand I = decompose(disjoint_union(exp_union(G, 2), rest), {"x1", "x2"}, 5);
  REQUIRE(loc_equal(I.cov, M, 4));
  REQUIRE(I.substantial == rest);
}

TEST_CASE("non-Gaussian input is rejected", "[gaussian]") {
  // unit + strut^2 has no matching exponential: the linear strut term is
  // missing.
  DiagramSum pair = disjoint_union(strut_sum(X, X, GroupRingElement::one(), 8),
                                   strut_sum(X, X, GroupRingElement::one(), 8));
  REQUIRE_THROWS_AS(decompose(DiagramSum::unit(8) + pair, {"x"}, 6), non_integrable_error);

  // a minimal term carrying a covariance strut cannot serve as ground
  REQUIRE_THROWS_AS(decompose(strut_sum(X, X, GroupRingElement::one(), 8), {"x"}, 4),
                    non_integrable_error);

  REQUIRE_THROWS_AS(decompose(DiagramSum(6), {"x"}, 4), not_substantial_error);
}

TEST_CASE("integration pairs legs against the inverse covariance", "[gaussian]") {
  // no covariance legs: the integrand passes through
  Integrand trivial{scalar1x1(2), {"x"}, DiagramSum::unit(6)};
  REQUIRE(integrate(trivial) == DiagramSum::unit(6));

  // <x x> against [3] gives -1/3 per pairing
  DiagramSum bb = disjoint_union(strut_sum(X, Y, GroupRingElement::one(), 6),
                                 strut_sum(X, Y, GroupRingElement::one(), 6));
  REQUIRE(integrate(Integrand{scalar1x1(3), {"x"}, bb}) ==
          strut_sum(Y, Y, GroupRingElement::one(), 6, Rat(-1, 3)));

  // odd covariance-leg counts vanish
  DiagramSum odd = strut_sum(X, Y, GroupRingElement::one(), 6);
  REQUIRE(integrate(Integrand{scalar1x1(3), {"x"}, odd}).is_zero());

  // strut components in the covariance colors are rejected
  DiagramSum bad = strut_sum(X, X, GroupRingElement::one(), 6);
  REQUIRE_THROWS_AS(integrate(Integrand{scalar1x1(3), {"x"}, bad}), not_substantial_error);
}

TEST_CASE("staged integration agrees with direct integration", "[gaussian]") {
  Color x{"x", false}, y{"y", false};
  DiagramSum R = disjoint_union(strut_sum(x, Z, GroupRingElement::gen(2), 8),
                                strut_sum(y, Z, GroupRingElement::one(), 8));

  SECTION("rational covariance compares structurally") {
    LocMatrix M(2, 2);
    M(0, 0) = LocElement::scalar(2);
    M(1, 1) = LocElement::scalar(3);
    M(0, 1) = LocElement::one();
    M(1, 0) = LocElement::one();
    Integrand I{M, {"x", "y"}, R};
    REQUIRE(integrate(integrate_partial(I, {"x"})) == integrate(I));
  }

  SECTION("word covariance compares after bead expansion") {
    LocMatrix M(2, 2);
    M(0, 0) = LocElement::scalar(2);
    M(1, 1) = LocElement::scalar(3);
    M(0, 1) = LocElement::gen(1);
    M(1, 0) = LocElement::gen(1, -1);
    Integrand I{M, {"x", "y"}, R};
    DiagramSum direct = integrate(I);
    DiagramSum staged = integrate(integrate_partial(I, {"x"}));
    REQUIRE(hair(direct, 4) == hair(staged, 4));
  }
}

TEST_CASE("covariance reading conventions", "[gaussian]") {
  // off-diagonal entries come in star-conjugate pairs
  Color x1{"x1", false}, x2{"x2", false};
  DiagramSum s = DiagramSum::unit(6) + strut_sum(x1, x2, GroupRingElement::gen(1), 6);
  LocMatrix M = read_covariance(s, {"x1", "x2"}, Rat(1));
  REQUIRE(loc_equal(M(0, 1), LocElement::gen(1), 4));
  REQUIRE(loc_equal(M(1, 0), LocElement::gen(1, -1), 4));
  REQUIRE(is_hermitian(M));

  // a bare diagonal strut counts twice
  DiagramSum d = DiagramSum::unit(6) + strut_sum(X, X, GroupRingElement::one(), 6, Rat(3));
  LocMatrix D = read_covariance(d, {"x"}, Rat(1));
  REQUIRE(loc_equal(D(0, 0), LocElement::scalar(6), 4));
}

TEST_CASE("hermitian projection restores structural storage", "[gaussian]") {
  // The input is Hermitian by value; the projection makes the storage show
  // it: lower triangle becomes the star of the upper, presentation diagonals
  // are symmetrized structurally.
  LocElement p = (LocElement::scalar(2) - LocElement::gen(1)).invert();
  LocMatrix M(2, 2);
  M(0, 0) = p + p.star();
  M(1, 1) = LocElement::one();
  M(0, 1) = LocElement::gen(2);
  M(1, 0) = LocElement::gen(2, -1);
  LocMatrix H = herm_project(M);
  REQUIRE(is_hermitian(H));
  REQUIRE(loc_equal(H(0, 0), p + p.star(), 4));
  REQUIRE(loc_equal(H(0, 1), LocElement::gen(2), 4));
  REQUIRE(loc_equal(H(1, 0), LocElement::gen(2, -1), 4));
}

#include <catch2/catch_amalgamated.hpp>

#include "ratkon/loc.hpp"

using namespace ratkon;

namespace {

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

TEST_CASE("augmentation extends through inverses", "[loc]") {
  // (3 - t1^2 t2^-1 (t3 + 1) t1^-1)^-1 * t2 - 5  augments to -4.
  LocElement t1 = LocElement::gen(1);
  LocElement t2 = LocElement::gen(2);
  LocElement t3 = LocElement::gen(3);
  LocElement inner = LocElement::scalar(3) -
                     t1 * t1 * LocElement::gen(2, -1) * (t3 + LocElement::one()) *
                         LocElement::gen(1, -1);
  LocElement e = inner.invert() * t2 - LocElement::scalar(5);
  REQUIRE(e.augment() == Rat(-4));
  REQUIRE(!e.is_polynomial());
}

TEST_CASE("the inverse of 2 - t1 expands as a geometric series", "[loc]") {
  LocElement x = LocElement::scalar(2) - LocElement::gen(1);
  LocElement inv = x.invert();

  NCSeries got = magnus_expand(inv, 2);
  NCSeries want(2);
  want.add_term({}, 1);
  want.add_term({1}, 1);
  want.add_term({1, 1}, Rat(3, 2));
  REQUIRE(got == want);

  REQUIRE(loc_equal(inv * x, LocElement::one(), 6));
  REQUIRE(loc_equal(x * inv, LocElement::one(), 6));
  REQUIRE(inv.augment() == Rat(1));
}

TEST_CASE("monomials invert without a presentation", "[loc]") {
  LocElement m = LocElement::scalar(Rat(2, 3)) * LocElement::gen(1) * LocElement::gen(2, -1);
  LocElement mi = m.invert();
  REQUIRE(mi.is_polynomial());
  REQUIRE(loc_equal(m * mi, LocElement::one(), 5));

  // polynomial embedding is multiplicative on the nose
  LocElement p = LocElement::gen(1) * LocElement::gen(2);
  REQUIRE(p.is_polynomial());
  REQUIRE(p.gr() == GroupRingElement(FreeWord::gen(1) * FreeWord::gen(2)));
}

TEST_CASE("inversion demands nonzero augmentation", "[loc]") {
  LocElement x = LocElement::one() - LocElement::gen(1);
  REQUIRE(x.augment() == Rat(0));
  REQUIRE_THROWS_AS(x.invert(), zero_augmentation_error);

  LocMatrix m(1, 1);
  m(0, 0) = x;
  REQUIRE_THROWS_AS(mat_invert(m), singular_augmentation_error);
}

TEST_CASE("star is an involutive anti-automorphism", "[loc]") {
  LocElement p = (LocElement::scalar(2) - LocElement::gen(1)).invert();
  LocElement q = (LocElement::scalar(3) - LocElement::gen(2) - LocElement::gen(1)).invert() *
                 LocElement::gen(2);

  REQUIRE(loc_equal((p * q).star(), q.star() * p.star(), 5));
  REQUIRE(loc_equal((p + q).star(), p.star() + q.star(), 5));
  REQUIRE(loc_equal(p.star().star(), p, 5));
  REQUIRE(p.star().augment() == p.augment());
}

TEST_CASE("matrix inversion against an entrywise Neumann oracle", "[loc]") {
  LocMatrix M = wrap2();
  LocMatrix inv = herm_invert(M);
  REQUIRE(is_hermitian(inv));

  // The augmentation of M is the identity, so M^-1 = sum_k (I - M)^k.  The
  // oracle expands that sum entrywise without touching presentations.
  unsigned cap = 3;
  SeriesMatrix E(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      NCSeries iij(cap);
      if (i == j) iij.add_term({}, 1);
      E(i, j) = iij - magnus_expand(M(i, j), cap);  // (I - M)_{ij}
    }
  SeriesMatrix geo(2, 2);
  for (std::size_t i = 0; i < 2; ++i) {
    NCSeries one(cap);
    one.add_term({}, 1);
    geo(i, i) = one;
  }
  SeriesMatrix pw = geo;  // (I - M)^k accumulator, starts at identity
  for (int k = 1; k <= 3; ++k) {
    pw = pw * E;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) geo(i, j) = geo(i, j) + pw(i, j);
  }
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) REQUIRE(magnus_expand(inv(i, j), cap) == geo(i, j));

  // and the product really is the identity under expansion
  REQUIRE(loc_equal(inv * M, LocMatrix::identity(2), 4));
}

TEST_CASE("the bordered block matrix inverts to its closed form", "[loc]") {
  // L = t1 + t1^-1 is Hermitian; [[0, 1], [1, L]]^-1 = [[-L, 1], [1, 0]].
  LocElement L = LocElement::gen(1) + LocElement::gen(1, -1);
  LocMatrix X(2, 2);
  X(0, 1) = LocElement::one();
  X(1, 0) = LocElement::one();
  X(1, 1) = L;
  LocMatrix Y(2, 2);
  Y(0, 0) = LocElement::scalar(-1) * L;
  Y(0, 1) = LocElement::one();
  Y(1, 0) = LocElement::one();

  REQUIRE(is_hermitian(X));
  // X Y = I holds exactly in the polynomial ring.
  LocMatrix prod = X * Y;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      REQUIRE(prod(i, j).is_polynomial());
      REQUIRE(prod(i, j).gr() == (i == j ? GroupRingElement::one() : GroupRingElement()));
    }
  REQUIRE(loc_equal(herm_invert(X), Y, 4));
}

TEST_CASE("hermitian symmetrization fixes star structurally", "[loc]") {
  LocElement x = (LocElement::scalar(2) - LocElement::gen(1) * LocElement::gen(2)).invert();
  LocElement h = herm_symmetrize(x);
  REQUIRE(h == h.star());
  REQUIRE(loc_equal(h, LocElement::scalar(Rat(1, 2)) * (x + x.star()), 5));
}

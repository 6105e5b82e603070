#include <catch2/catch_amalgamated.hpp>

#include "ratkon/hring.hpp"

using namespace ratkon;

TEST_CASE("degree parts of the conjugation of a generator", "[hring]") {
  HElement t = HElement(LocElement::gen(1));
  HElement h = HElement::h_power(1);
  HElement h2 = HElement::h_power(2);

  // degree one: t1 h - h t1
  HElement d1 = phi_conj(GroupRingElement::gen(1), 1, 1).deg_h(1);
  HElement want1 = t * h - h * t;
  REQUIRE(h_equal(d1, want1, 3));

  // degree two: (h^2 t1 + t1 h^2)/2 - h t1 h
  HElement d2 = phi_conj(GroupRingElement::gen(1), 1, 2).deg_h(2);
  HElement want2 = Rat(1, 2) * (h2 * t + t * h2) - h * t * h;
  REQUIRE(h_equal(d2, want2, 4));

  // the degree-zero part is the element itself
  HElement d0 = phi_conj(GroupRingElement::gen(1), 1, 2).deg_h(0);
  REQUIRE(h_equal(d0, t, 4));

  // conjugating at a site that does not appear is trivial
  REQUIRE(eta(GroupRingElement::gen(2), 1).expand(3).is_zero());
  REQUIRE(h_equal(eta(LocElement::gen(1), 1), want1, 3));
}

TEST_CASE("conjugation is a ring map at truncation", "[hring]") {
  GroupRingElement x = GroupRingElement::gen(1) + Rat(2) * GroupRingElement::gen(2, -1);
  GroupRingElement y = GroupRingElement(FreeWord::from_letters({2, 1})) - GroupRingElement(Rat(1, 3));

  HElement px = phi_conj(x, 1, 2);
  HElement py = phi_conj(y, 1, 2);
  HElement pxy = phi_conj(x * y, 1, 2);
  REQUIRE(h_equal(pxy, px * py, 3));

  // and on a presentation: phi(s) phi(s^-1) = 1
  LocElement s = (LocElement::scalar(2) - LocElement::gen(1)).invert();
  HElement ps = phi_conj(s, 1, 2);
  HElement psi = phi_conj(s.invert(), 1, 2);
  REQUIRE(h_equal(ps * psi, HElement::one(), 3));
}

TEST_CASE("the splice derivative kills the wrap variable", "[hring]") {
  REQUIRE(eta_hat(HElement::h_power(1), 1).expand(4).is_zero());
  REQUIRE(eta_hat(HElement::h_power(3), 1).expand(5).is_zero());

  // half the squared splice derivative gives the degree-two conjugation part
  HElement t = HElement(LocElement::gen(1));
  HElement iter = Rat(1, 2) * eta_hat(eta_hat(t, 1), 1);
  HElement want = phi_conj(GroupRingElement::gen(1), 1, 2).deg_h(2);
  REQUIRE(h_equal(iter, want, 4));
}

TEST_CASE("the trace logarithm vanishes on the identity and adds over products",
          "[hring]") {
  HMatrix I2 = HMatrix::identity(2);
  REQUIRE(chi_h(I2, 4).is_zero());

  // unipotent upper and lower factors
  HMatrix U = HMatrix::identity(2);
  U(0, 1) = HElement(LocElement::gen(1)) * HElement::h_power(1) * HElement(LocElement::gen(2));
  HMatrix V = HMatrix::identity(2);
  V(1, 0) = HElement::h_power(2) * HElement(LocElement::gen(1, -1));

  CyclicSeries sum = chi_h(U, 4) + chi_h(V, 4);
  REQUIRE(chi_h(U * V, 4) == sum);
  REQUIRE(chi_h(V * U, 4) == sum);

  // non-unipotent input is rejected
  HMatrix W = HMatrix::identity(2);
  W(0, 0) = HElement(LocElement::gen(1));
  REQUIRE_THROWS_AS(chi_h(W, 3), non_unipotent_error);
}

TEST_CASE("the trace logarithm of 1 + h is the logarithm series", "[hring]") {
  HMatrix m(1);
  m(0, 0) = HElement::one() + HElement::h_power(1);
  HElement t = tr_log_unipotent(m, 3);

  NCSeries x = NCSeries::letter(kLetterH, 3);
  NCSeries one(3);
  one.add_term({}, 1);
  REQUIRE(t.expand(3) == (one + x).log());

  HMatrix b(1);
  b(0, 0) = HElement(LocElement::gen(1));
  REQUIRE_THROWS_AS(tr_log_unipotent(b, 2), non_unipotent_error);
}

TEST_CASE("frozen values of the matrix logarithmic trace", "[hring]") {
  LocMatrix one(1, 1);
  one(0, 0) = LocElement::one();
  REQUIRE(chi_prime(one, 4).is_zero());

  // chi'([t1]) = h1 on the nose: log of exp(h1)
  LocMatrix mt(1, 1);
  mt(0, 0) = LocElement::gen(1);
  CyclicSeries want_t(4);
  want_t.add_word({1}, 1);
  REQUIRE(chi_prime(mt, 4) == want_t);

  // chi'([2 - t1]) = -h1 - h1 h1 + O(3)
  LocMatrix m2(1, 1);
  m2(0, 0) = LocElement::scalar(2) - LocElement::gen(1);
  CyclicSeries want_2(2);
  want_2.add_word({1}, -1);
  want_2.add_word({1, 1}, -1);
  REQUIRE(chi_prime(m2, 2) == want_2);

  // block-diagonal additivity
  LocMatrix blk(2, 2);
  blk(0, 0) = mt(0, 0);
  blk(1, 1) = m2(0, 0);
  REQUIRE(chi_prime(blk, 3) == chi_prime(mt, 3) + chi_prime(m2, 3));

  // singular augmentation is rejected
  LocMatrix bad(1, 1);
  bad(0, 0) = LocElement::one() - LocElement::gen(1);
  REQUIRE_THROWS_AS(chi_prime(bad, 2), singular_augmentation_error);
}

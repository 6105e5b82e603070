#include <catch2/catch_amalgamated.hpp>

#include "ratkon/group_ring.hpp"
#include "ratkon/loc.hpp"
#include "ratkon/series.hpp"

using namespace ratkon;

TEST_CASE("free words reduce, invert and print", "[ring]") {
  FreeWord t1 = FreeWord::gen(1);
  FreeWord t2 = FreeWord::gen(2);

  REQUIRE((t1 * t1.inverse()).is_identity());
  REQUIRE(FreeWord::from_letters({1, -1}).is_identity());
  REQUIRE(FreeWord::from_letters({1, 2, -2, -1}).is_identity());
  REQUIRE(FreeWord::from_letters({1, 2, -2, 1}) == FreeWord::gen(1, 2));

  REQUIRE((t1 * t2).inverse() == t2.inverse() * t1.inverse());
  REQUIRE(FreeWord().str() == "1");
  REQUIRE(FreeWord::gen(1, 2).str() == "t1^2");
  REQUIRE((t1 * t2.inverse()).str() == "t1*t2^-1");
}

TEST_CASE("free word involution is the group inverse", "[ring]") {
  FreeWord w = FreeWord::from_letters({1, -2, 1, 1});
  REQUIRE(w.involute() == w.inverse());
  REQUIRE((w * w.involute()).is_identity());
  REQUIRE(w.involute().involute() == w);
}

TEST_CASE("group ring product expands multilinearly", "[ring]") {
  GroupRingElement t1 = GroupRingElement::gen(1);
  GroupRingElement t2 = GroupRingElement::gen(2);

  // (t1 + t2)(t1 - t2) = t1^2 - t1 t2 + t2 t1 - t2^2
  GroupRingElement got = (t1 + t2) * (t1 - t2);
  GroupRingElement want;
  want.add_term(FreeWord::gen(1, 2), 1);
  want.add_term(FreeWord::gen(1) * FreeWord::gen(2), -1);
  want.add_term(FreeWord::gen(2) * FreeWord::gen(1), 1);
  want.add_term(FreeWord::gen(2, 2), -1);
  REQUIRE(got == want);

  // cancellation through the group law
  GroupRingElement lhs = t1 * GroupRingElement::gen(1, -1);
  REQUIRE(lhs == GroupRingElement(Rat(1)));
}

TEST_CASE("group ring involution is an anti-automorphism", "[ring]") {
  GroupRingElement x = Rat(2) * GroupRingElement::gen(1) -
                       Rat(3, 2) * GroupRingElement(FreeWord::gen(2) * FreeWord::gen(1, -1)) +
                       GroupRingElement(Rat(1));
  GroupRingElement y = GroupRingElement::gen(2) +
                       GroupRingElement(FreeWord::gen(1) * FreeWord::gen(2));

  REQUIRE((x * y).involute() == y.involute() * x.involute());
  REQUIRE((x + y).involute() == x.involute() + y.involute());
  REQUIRE(x.involute().involute() == x);
  REQUIRE(GroupRingElement(Rat(5, 3)).involute() == GroupRingElement(Rat(5, 3)));
}

TEST_CASE("augmentation is a ring homomorphism to the rationals", "[ring]") {
  GroupRingElement x = Rat(2) * GroupRingElement::gen(1) - GroupRingElement(Rat(1, 2));
  GroupRingElement y = GroupRingElement::gen(2, -1) + GroupRingElement::gen(1);

  REQUIRE(x.augment() == Rat(3, 2));
  REQUIRE(y.augment() == Rat(2));
  REQUIRE((x * y).augment() == x.augment() * y.augment());
  REQUIRE((x + y).augment() == x.augment() + y.augment());
  REQUIRE(x.involute().augment() == x.augment());
}

TEST_CASE("declared generator counts cannot be mixed silently", "[ring]") {
  GroupRingElement a = GroupRingElement::one(2);
  GroupRingElement b = GroupRingElement::one(3);
  REQUIRE_THROWS_AS(a + b, mismatched_generators_error);
  REQUIRE_THROWS_AS(a * b, mismatched_generators_error);
}

TEST_CASE("exponential-letter expansion of generators", "[series]") {
  // t1 -> 1 + h1 + h1^2/2, t1^-1 -> 1 - h1 + h1^2/2 at degree two.
  NCSeries got = magnus_expand(GroupRingElement::gen(1), 2);
  NCSeries want(2);
  want.add_term({}, 1);
  want.add_term({1}, 1);
  want.add_term({1, 1}, Rat(1, 2));
  REQUIRE(got == want);

  NCSeries goti = magnus_expand(GroupRingElement::gen(1, -1), 2);
  NCSeries wanti(2);
  wanti.add_term({}, 1);
  wanti.add_term({1}, -1);
  wanti.add_term({1, 1}, Rat(1, 2));
  REQUIRE(goti == wanti);
}

TEST_CASE("expansion is a ring map compatible with truncation", "[series]") {
  GroupRingElement x = Rat(2) * GroupRingElement(FreeWord::from_letters({1, -2})) -
                       GroupRingElement(Rat(3));
  GroupRingElement y = GroupRingElement(FreeWord::from_letters({2, 2, 1})) +
                       Rat(1, 2) * GroupRingElement::gen(1, -1);

  REQUIRE(magnus_expand(x * y, 5) == magnus_expand(x, 5) * magnus_expand(y, 5));
  REQUIRE(magnus_expand(x + y, 5) == magnus_expand(x, 5) + magnus_expand(y, 5));
  REQUIRE(magnus_expand(x, 3) == magnus_expand(x, 5).truncated(3));
  REQUIRE(magnus_expand(x, 4).coeff({}) == x.augment());
  REQUIRE(magnus_expand(x.involute(), 4) == magnus_expand(x, 4).involute());
}

TEST_CASE("series exponential and logarithm invert each other", "[series]") {
  NCSeries x(5);
  x.add_term({1}, 1);
  x.add_term({2, 1}, Rat(1, 3));
  REQUIRE(x.exp().log() == x);

  NCSeries ex = x.exp();
  REQUIRE(ex.coeff({}) == Rat(1));
  REQUIRE(ex.log().exp() == ex);

  NCSeries bad(3);
  bad.add_term({}, 1);  // nonzero constant term cannot be exponentiated
  REQUIRE_THROWS_AS(bad.exp(), error);
  NCSeries badlog(3);   // constant term must be one for log
  REQUIRE_THROWS_AS(badlog.log(), error);
}

TEST_CASE("series involution reverses words and inverts letters", "[series]") {
  NCSeries x(4);
  x.add_term({1, 2}, Rat(2));
  x.add_term({-1}, Rat(1, 3));
  NCSeries xi = x.involute();
  REQUIRE(xi.coeff({-2, -1}) == Rat(2));
  REQUIRE(xi.coeff({1}) == Rat(1, 3));
  REQUIRE(xi.involute() == x);

  // compatible with the group ring involution through expansion
  GroupRingElement w(FreeWord::from_letters({1, 2, -1}));
  REQUIRE(magnus_expand(w.involute(), 4) == magnus_expand(w, 4).involute());
}

TEST_CASE("cyclic series identify words up to rotation", "[series]") {
  CyclicSeries c(4);
  c.add_word({1, 2}, 1);
  c.add_word({2, 1}, -1);
  REQUIRE(c.is_zero());

  CyclicSeries d(4);
  d.add_word({1, 2, 2}, 1);
  REQUIRE(d.coeff({2, 2, 1}) == Rat(1));
  REQUIRE(d.coeff({2, 1, 2}) == Rat(1));
  REQUIRE(d.coeff({1, 2, 1}) == Rat(0));

  NCSeries s(4);
  s.add_term({1, 2}, 1);
  s.add_term({2, 1}, 1);
  REQUIRE(CyclicSeries::from_series(s).coeff({1, 2}) == Rat(2));
}

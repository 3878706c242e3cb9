#include <catch2/catch_amalgamated.hpp>

#include "latticeforge/numfield.hpp"

using namespace latticeforge;

static QPoly P(std::initializer_list<long> v) {
  std::vector<Rat> r;
  for (long x : v) r.emplace_back(x);
  return QPoly(r);
}

TEST_CASE("rational helpers", "[numfield][rational]") {
  CHECK(rat_to_string(parse_rat("-6/4")) == "-3/2");
  CHECK(rat_to_string(Rat(5)) == "5");
  CHECK(parse_rat("7/3") == make_rat(Int(7), Int(3)));
  CHECK_THROWS_AS(parse_rat("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rat("2x"), std::invalid_argument);

  CHECK(rat_floor(Rat(-3, 2)) == -2);
  CHECK(rat_ceil(Rat(-3, 2)) == -1);
  CHECK(rat_round_half_up(Rat(1, 2)) == 1);
  CHECK(rat_round_half_up(Rat(-1, 2)) == 0);
  CHECK(rat_round_half_up(Rat(-3, 2)) == -1);

  CHECK(isqrt_floor(Int(48)) == 6);
  CHECK(is_perfect_square(Int(49)));
  CHECK_FALSE(is_perfect_square(Int(48)));

  auto e = sqrt_enclosure(Rat(2), 30);
  CHECK(e.lo * e.lo <= Rat(2));
  CHECK(e.hi * e.hi >= Rat(2));
  CHECK(e.width() <= make_rat(Int(1), Int(1) << 29));

  CHECK(simplest_rational_in(Rat(7, 10), Rat(8, 10)) == Rat(3, 4));
  CHECK(simplest_rational_in(Rat(-1, 3), Rat(-1, 4)) == Rat(-1, 3));
}

TEST_CASE("real root isolation", "[numfield][sturm]") {
  // (x^2 - 2)(x - 3)(x + 1): two rational roots, two irrational
  QPoly f = P({-2, 0, 1}) * P({-3, 1}) * P({1, 1});
  auto roots = isolate_real_roots(f);
  REQUIRE(roots.size() == 4);
  CHECK_FALSE(roots[0].exact);
  CHECK(roots[1].exact);
  CHECK(roots[1].lo == Rat(-1));
  CHECK(roots[0].lo < Rat(-14142, 10000));
  CHECK(Rat(-14143, 10000) < roots[0].hi);
  CHECK(roots[3].exact);
  CHECK(roots[3].lo == Rat(3));

  CHECK(count_real_roots(P({-2, 0, 1}), Rat(0), Rat(2)) == 1);
  CHECK(count_real_roots(P({1, 0, 1}), Rat(-10), Rat(10)) == 0);
  CHECK(count_real_roots(P({1, -3, 0, 1}), Rat(-2), Rat(2)) == 3);
}

TEST_CASE("resultants and elimination", "[numfield][intpoly]") {
  CHECK(resultant(P({-2, 0, 1}), P({-3, 0, 1})) == Rat(1));
  CHECK(resultant(P({-2, 0, 1}), P({-1, 1})) == Rat(-1));

  // minimal polynomial of sqrt2 + sqrt3 by eliminating y from
  // y^2 - 2 and (x - y)^2 - 3
  QPoly X = QPoly::x();
  std::vector<QPoly> fy = {QPoly(Rat(-2)), QPoly(), QPoly(Rat(1))};
  std::vector<QPoly> gy = {X * X - QPoly(Rat(3)), QPoly(Rat(-2)) * X, QPoly(Rat(1))};
  QPoly mp = resultant_eliminating(fy, gy);
  CHECK(mp.monic() == P({1, 0, -10, 0, 1}));
}

TEST_CASE("irreducibility over Q", "[numfield][intpoly]") {
  CHECK(irreducibility_over_q(P({1, 0, -10, 0, 1})) == Irreducibility::Irreducible);
  CHECK(irreducibility_over_q(P({-2, 0, 1})) == Irreducibility::Irreducible);
  CHECK(irreducibility_over_q(P({-1, 0, 0, 0, 1})) == Irreducibility::Reducible);  // x^4-1
  CHECK(irreducibility_over_q(P({4, 0, 0, 0, 1})) == Irreducibility::Reducible);   // x^4+4
  CHECK(irreducibility_over_q(P({1, 0, 0, 0, 1})) == Irreducibility::Irreducible); // x^4+1
  CHECK(irreducibility_over_q(P({-1, -2, 1, 1})) == Irreducibility::Irreducible);
  CHECK(irreducibility_over_q(P({2, 2, 1})) == Irreducibility::Irreducible);
  CHECK(irreducibility_over_q(P({1, 2, 1})) == Irreducibility::Reducible);

  CHECK(eisenstein_test(P({-2, 0, 0, 0, 1}), Int(2)));
  CHECK_FALSE(eisenstein_test(P({-4, 0, 1}), Int(2)));
  CHECK_THROWS_AS(eisenstein_test(P({1, 1}), Int(4)), std::invalid_argument);

  auto r3 = modp::irreducible(ZCoeffs{Int(1), Int(0), Int(1)}, 3);
  REQUIRE(r3.has_value());
  CHECK(*r3);
  auto r5 = modp::irreducible(ZCoeffs{Int(1), Int(0), Int(1)}, 5);
  REQUIRE(r5.has_value());
  CHECK_FALSE(*r5);
}

TEST_CASE("the rational field", "[numfield]") {
  auto Q = NumberField::rationals();
  CHECK(Q->degree() == 1);
  CHECK(Q->real_place_count() == 1);
  CHECK(Q->complex_place_count() == 0);
  FieldElement half(Q, Rat(1, 2));
  CHECK(half.sign_at(0) == 1);
  CHECK(half.norm() == Rat(1, 2));
  CHECK(half.trace() == Rat(1, 2));
}

TEST_CASE("real quadratic field", "[numfield]") {
  auto F2 = make_field(P({-2, 0, 1}));
  CHECK(F2->real_place_count() == 2);
  CHECK(F2->complex_place_count() == 0);
  auto r2 = FieldElement::generator(F2);
  // places in ascending embedding order: -sqrt2 first
  CHECK(r2.sign_at(0) == -1);
  CHECK(r2.sign_at(1) == 1);
  CHECK(r2.norm() == Rat(-2));
  CHECK(r2.trace() == Rat(0));

  FieldElement u(F2, P({3, 2}));  // fundamental-unit square 3 + 2 sqrt2
  CHECK(u.norm() == Rat(1));
  CHECK(u * u.inverse() == FieldElement::one(F2));

  auto Q = NumberField::rationals();
  auto ext = QuadraticExtension::make(Q, FieldElement(Q, Rat(2)));
  CHECK(ext.nonsquare_certified);
  QExtElem x{FieldElement(Q, Rat(3)), FieldElement(Q, Rat(2))};
  CHECK(relative_norm(ext, x).as_rational() == Rat(1));
  QExtElem s2e{FieldElement(Q, Rat(0)), FieldElement(Q, Rat(1))};
  CHECK(relative_norm(ext, s2e).as_rational() == Rat(-2));
}

TEST_CASE("complex places", "[numfield]") {
  auto Fi = make_field(P({1, 0, 1}));
  CHECK(Fi->real_place_count() == 0);
  CHECK(Fi->complex_place_count() == 1);
  auto [bx, by] = Fi->complex_place_box(0, Rat(1, 1000));
  CHECK(bx.contains(Rat(0)));
  CHECK(by.contains(Rat(1)));

  auto F42 = make_field(P({-2, 0, 0, 0, 1}));
  CHECK(F42->real_place_count() == 2);
  CHECK(F42->complex_place_count() == 1);
  auto [cx, cy] = F42->complex_place_box(2, Rat(1, 1000000));
  CHECK(cx.contains(Rat(0)));
  // imaginary part near 2^(1/4) = 1.18920711...
  CHECK(cy.lo > Rat(118920, 100000));
  CHECK(cy.hi < Rat(118921, 100000));
}

TEST_CASE("biquadratic field of sqrt2 + sqrt3", "[numfield]") {
  auto F = make_field(P({1, 0, -10, 0, 1}));
  REQUIRE(F->real_place_count() == 4);
  auto alpha = FieldElement::generator(F);
  CHECK(alpha.norm() == Rat(1));
  // embedding values sorted ascending: -3.146, -0.318, 0.318, 3.146
  CHECK(alpha.sign_at(0) == -1);
  CHECK(alpha.sign_at(1) == -1);
  CHECK(alpha.sign_at(2) == 1);
  CHECK(alpha.sign_at(3) == 1);
  auto [e0, z0] = alpha.evaluate_at(0, Rat(1, 100000));
  CHECK(z0.is_point());
  CHECK(e0.lo > Rat(-31463, 10000));
  CHECK(e0.hi < Rat(-31462, 10000));
  auto [e3, z3] = alpha.evaluate_at(3, Rat(1, 100000));
  CHECK(e3.lo > Rat(31462, 10000));
  CHECK(e3.hi < Rat(31463, 10000));

  // -alpha is a Galois conjugate; substitution respects the arithmetic
  auto malpha = -alpha;
  auto img = (alpha * alpha + alpha).substitute_generator(malpha);
  CHECK(img == malpha * malpha - alpha);

  // sign is multiplicative at every place
  FieldElement w1(F, P({1, 1}));
  for (std::size_t p = 0; p < 4; ++p)
    CHECK((w1 * alpha).sign_at(p) == w1.sign_at(p) * alpha.sign_at(p));
}

TEST_CASE("fields with prescribed signature", "[numfield]") {
  for (unsigned r = 0; r <= 4; ++r)
    for (unsigned s = 0; s <= 2; ++s) {
      if (r + s == 0 || r + 2 * s > 6) continue;
      auto f = field_with_signature(r, s);
      CHECK(f->real_place_count() == r);
      CHECK(f->complex_place_count() == s);
    }
}

TEST_CASE("field construction rejects bad input", "[numfield]") {
  CHECK_THROWS_AS(make_field(P({-1, 0, 0, 0, 1})), std::invalid_argument);  // reducible
  CHECK_THROWS_AS(make_field(P({1, 0, 2})), std::invalid_argument);         // not monic
}

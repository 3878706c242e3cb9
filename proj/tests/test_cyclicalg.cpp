#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latticeforge/cyclicalg.hpp"
#include "latticeforge/quatalg.hpp"

using namespace latticeforge;

TEST_CASE("real cubic subfield of the 7th cyclotomic field", "[cyclicalg]") {
  CyclicExtPtr ext7 = cyclotomic_real_subfield(7);
  const QPoly& f = ext7->top->min_poly();
  CHECK(f == QPoly({Rat(-1), Rat(-2), Rat(1), Rat(1)}));  // x^3 + x^2 - 2x - 1
  // the Galois action sends theta = 2cos(2pi/7) to theta^2 - 2
  FieldElement want(ext7->top, QPoly({Rat(1), Rat(-1), Rat(-1)}));
  CHECK(ext7->sigma_image == want);
  FieldElement theta = FieldElement::generator(ext7->top);
  CHECK(ext7->apply(theta, 3) == theta);
  CHECK(ext7->apply(theta, 1) != theta);
  CHECK(ext7->apply(theta, 2) != theta);

  CHECK(cyclotomic_real_subfield(13)->top->degree() == 3);
  CHECK_THROWS_AS(cyclotomic_real_subfield(11), std::invalid_argument);  // 11 = 2 mod 3
}

TEST_CASE("degree two matches quaternion algebras", "[cyclicalg]") {
  // dictionary: 1 <-> 1, theta <-> i, sigma <-> j, theta sigma <-> k
  for (auto [b, g] : {std::pair<int, int>{-1, -1}, {2, 3}, {2, -1}, {-5, 7}}) {
    FieldPtr L = make_field(QPoly({Rat(-b), Rat(0), Rat(1)}));
    FieldElement th = FieldElement::generator(L);
    CyclicExtPtr ce = CyclicExtension::make(L, -th);
    CyclicAlgPtr ca = CyclicAlgebra::make(ce, Rat(g));
    QuatPtr D = QuaternionAlgebra::rational(Rat(b), Rat(g));

    auto to_quat = [&](const CyclicElement& x) {
      const auto& c = x.coords();
      FieldPtr Q = NumberField::rationals();
      auto part = [&](const FieldElement& z, int pos) {
        return FieldElement(Q, z.poly().coeff(static_cast<std::size_t>(pos)));
      };
      return QuaternionElement(D, part(c[0], 0), part(c[0], 1), part(c[1], 0), part(c[1], 1));
    };
    std::vector<CyclicElement> basis = {CyclicElement::one(ca), CyclicElement::term(ca, th, 0),
                                        CyclicElement::sigma(ca),
                                        CyclicElement::term(ca, th, 1)};
    for (const auto& x : basis)
      for (const auto& y : basis) CHECK(to_quat(x * y) == to_quat(x) * to_quat(y));
  }

  SECTION("division decisions agree with the quaternion side") {
    for (auto [b, g] :
         {std::pair<int, int>{-1, -1}, {2, 3}, {2, -1}, {3, 5}, {-5, 7}}) {
      FieldPtr L = make_field(QPoly({Rat(-b), Rat(0), Rat(1)}));
      CyclicExtPtr ce = CyclicExtension::make(L, -FieldElement::generator(L));
      auto cv = is_division_cyclic(CyclicAlgebra::make(ce, Rat(g)));
      auto qv = quat_division_certificate(QuaternionAlgebra::rational(Rat(b), Rat(g)));
      CHECK(cv.verdict == qv.verdict);
    }
  }

  SECTION("split certificate over Q(sqrt2) with alpha = -1") {
    FieldPtr L = make_field(QPoly({Rat(-2), Rat(0), Rat(1)}));
    CyclicExtPtr ce = CyclicExtension::make(L, -FieldElement::generator(L));
    auto split = is_division_cyclic(CyclicAlgebra::make(ce, Rat(-1)));
    REQUIRE(split.verdict == AlgVerdict::Split);
    REQUIRE(split.norm_preimage.has_value());
    CHECK(split.norm_preimage->norm() == Rat(-1));
    REQUIRE(split.zero_divisor.has_value());
    REQUIRE(split.cofactor.has_value());
    CHECK((*split.zero_divisor * *split.cofactor).is_zero());

    auto div = is_division_cyclic(CyclicAlgebra::make(ce, Rat(3)));
    CHECK(div.verdict == AlgVerdict::Division);
    CHECK(div.obstruction.has_value());
  }
}

TEST_CASE("multiplicative order criterion", "[cyclicalg]") {
  CHECK(prime_criterion(3, 7).order == 6);
  CHECK(prime_criterion(3, 7).passes);
  CHECK(prime_criterion(5, 7).order == 6);
  CHECK(prime_criterion(5, 7).passes);
  CHECK(prime_criterion(2, 7).order == 3);
  CHECK_FALSE(prime_criterion(2, 7).passes);
  CHECK(prime_criterion(13, 7).order == 2);  // 13 = 6 mod 7, 6^2 = 36 = 1
  CHECK_FALSE(prime_criterion(13, 7).passes);
  CHECK(prime_criterion(17, 7).passes);       // 17 = 3 mod 7
  CHECK_FALSE(prime_criterion(29, 7).passes); // 29 = 1 mod 7
  CHECK_THROWS_AS(prime_criterion(6, 7), std::invalid_argument);
  CHECK_THROWS_AS(prime_criterion(7, 7), std::invalid_argument);
}

TEST_CASE("degree three division decisions", "[cyclicalg][division]") {
  CyclicExtPtr ext7 = cyclotomic_real_subfield(7);

  auto a3 = is_division_cyclic(CyclicAlgebra::make(ext7, Rat(3)));
  REQUIRE(a3.verdict == AlgVerdict::Division);
  REQUIRE(a3.criterion_order.has_value());
  CHECK(*a3.criterion_order == 6);

  CHECK(is_division_cyclic(CyclicAlgebra::make(ext7, Rat(5))).verdict == AlgVerdict::Division);

  auto a13 = is_division_cyclic(CyclicAlgebra::make(ext7, Rat(13)));
  REQUIRE(a13.verdict == AlgVerdict::Split);
  REQUIRE(a13.norm_preimage.has_value());
  Rat n13 = a13.norm_preimage->norm();
  CHECK((n13 == Rat(13) || n13 == Rat(169)));

  auto a1 = is_division_cyclic(CyclicAlgebra::make(ext7, Rat(1)));
  REQUIRE(a1.verdict == AlgVerdict::Split);
  CHECK(a1.norm_preimage->norm() == Rat(1));

  // alpha = 2 fails the order criterion and the norm search alike: the
  // decision is honestly inconclusive rather than guessed
  auto a2 = is_division_cyclic(CyclicAlgebra::make(ext7, Rat(2)));
  CHECK(a2.verdict == AlgVerdict::Inconclusive);
  REQUIRE(a2.search_bound.has_value());
  CHECK(*a2.search_bound == 30);
}

TEST_CASE("matrix embedding over the splitting field", "[cyclicalg]") {
  CyclicExtPtr ext7 = cyclotomic_real_subfield(7);
  CyclicAlgPtr A = CyclicAlgebra::make(ext7, Rat(3));

  Mat<FieldElement> ms = embed_cyclic_matrix(CyclicElement::sigma(A));
  CHECK(ms.at(0, 1) == FieldElement::one(ext7->top));
  CHECK(ms.at(1, 2) == FieldElement::one(ext7->top));
  CHECK(ms.at(2, 0) == FieldElement(ext7->top, Rat(3)));
  CHECK(ms.at(0, 0).is_zero());
  CHECK(ms.at(0, 2).is_zero());

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pick(-4, 4);
  auto rand_el = [&]() {
    std::vector<FieldElement> cs;
    for (int m = 0; m < 3; ++m)
      cs.emplace_back(ext7->top, QPoly({Rat(pick(rng)), Rat(pick(rng)), Rat(pick(rng))}));
    return CyclicElement(A, cs);
  };
  SECTION("multiplicativity") {
    for (int t = 0; t < 40; ++t) {
      CyclicElement x = rand_el(), y = rand_el();
      CHECK(embed_cyclic_matrix(x * y) == embed_cyclic_matrix(x) * embed_cyclic_matrix(y));
    }
  }
  SECTION("determinant of a field scalar is its norm") {
    FieldElement z(ext7->top, QPoly({Rat(2), Rat(1)}));
    Mat<FieldElement> mz = embed_cyclic_matrix(CyclicElement::embed_field(A, z));
    FieldElement det = mat_det(mz, FieldElement::zero(ext7->top));
    REQUIRE(det.is_rational());
    CHECK(det.as_rational() == z.norm());
  }
  SECTION("division algebra elements have invertible images") {
    int nonzero = 0;
    for (int t = 0; t < 80; ++t) {
      CyclicElement x = rand_el();
      if (x.is_zero()) continue;
      ++nonzero;
      FieldElement dd = mat_det(embed_cyclic_matrix(x), FieldElement::zero(ext7->top));
      REQUIRE_FALSE(dd.is_zero());
    }
    CHECK(nonzero > 70);
  }
}

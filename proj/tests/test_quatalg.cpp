#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "latticeforge/quatalg.hpp"

using namespace latticeforge;

static QuaternionElement rand_elem(const QuatPtr& alg, std::mt19937& rng) {
  std::uniform_int_distribution<int> numr(-9, 9);
  std::uniform_int_distribution<int> denr(1, 4);
  std::vector<FieldElement> v;
  for (int t = 0; t < 4; ++t)
    v.push_back(FieldElement(alg->field, make_rat(Int(numr(rng)), Int(denr(rng)))));
  return QuaternionElement::from_coords(alg, v);
}

TEST_CASE("generator relations and conjugation", "[quatalg]") {
  QuatPtr H = QuaternionAlgebra::rational(Rat(-1), Rat(-1));
  auto one = QuaternionElement::one(H), qi = QuaternionElement::unit_i(H),
       qj = QuaternionElement::unit_j(H), qk = QuaternionElement::unit_k(H);
  CHECK(qi * qj == qk);
  CHECK(qj * qi == -qk);
  CHECK(qi * qi == -one);
  CHECK(qj * qj == -one);
  CHECK(qk * qk == -one);

  FieldPtr Q = NumberField::rationals();
  CHECK(reduced_norm(qi) == FieldElement(Q, Rat(1)));
  QuaternionElement s = one + qi + qj + qk;
  CHECK(reduced_norm(s) == FieldElement(Q, Rat(4)));
  CHECK(conjugate(conjugate(s, Tau::C), Tau::C) == s);
  CHECK(conjugate(conjugate(s, Tau::R), Tau::R) == s);
  // tau_r fixes i and k, negates j
  CHECK(conjugate(qj, Tau::R) == -qj);
  CHECK(conjugate(qk, Tau::R) == qk);
  CHECK(conjugate(qi, Tau::R) == qi);

  std::mt19937 rng(20260823);
  for (int t = 0; t < 120; ++t) {
    auto x = rand_elem(H, rng), y = rand_elem(H, rng), z = rand_elem(H, rng);
    CHECK((x * y) * z == x * (y * z));
    CHECK(conjugate(x * y, Tau::C) == conjugate(y, Tau::C) * conjugate(x, Tau::C));
    CHECK(conjugate(x * y, Tau::R) == conjugate(y, Tau::R) * conjugate(x, Tau::R));
    CHECK(conjugate(x, Tau::C) * x == QuaternionElement::scalar(H, reduced_norm(x)));
    CHECK(reduced_norm(x * y) == reduced_norm(x) * reduced_norm(y));
  }
}

TEST_CASE("division versus split", "[quatalg]") {
  QuatPtr H = QuaternionAlgebra::rational(Rat(-1), Rat(-1));
  auto certH = quat_division_certificate(H);
  REQUIRE(certH.verdict == AlgVerdict::Division);
  REQUIRE(certH.obstruction.has_value());
  CHECK(*certH.obstruction == 0);  // definite at the real place

  QuatPtr D23 = QuaternionAlgebra::rational(Rat(2), Rat(3));
  auto cert23 = quat_division_certificate(D23);
  CHECK(cert23.verdict == AlgVerdict::Division);
  CHECK(cert23.obstruction.has_value());

  SECTION("square beta splits with an explicit zero divisor") {
    QuatPtr Dsq = QuaternionAlgebra::rational(Rat(4), Rat(5));
    auto certsq = quat_division_certificate(Dsq);
    REQUIRE(certsq.verdict == AlgVerdict::Split);
    REQUIRE(certsq.zero_divisor.has_value());
    CHECK_FALSE(certsq.zero_divisor->is_zero());
    CHECK(reduced_norm(*certsq.zero_divisor).is_zero());

    // the 2x2 images respect the structure constants generically
    REQUIRE(certsq.mat2_images.has_value());
    const auto& M = *certsq.mat2_images;
    FieldPtr Q = NumberField::rationals();
    std::array<QuaternionElement, 4> gens = {
        QuaternionElement::one(Dsq), QuaternionElement::unit_i(Dsq),
        QuaternionElement::unit_j(Dsq), QuaternionElement::unit_k(Dsq)};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        QuaternionElement prod = gens[a] * gens[b];
        Mat<FieldElement> want(2, 2, FieldElement::zero(Q));
        std::vector<FieldElement> co = prod.coords();
        for (int t = 0; t < 4; ++t)
          for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
              want.at(r, c) = want.at(r, c) + co[t] * M[t].at(r, c);
        CHECK(M[a] * M[b] == want);
      }
  }

  SECTION("decision is a square-class invariant") {
    for (auto [b, g] : {std::pair<int, int>{-1, -1}, {2, 3}, {-1, 3}, {5, -7}}) {
      auto c1 = quat_division_certificate(QuaternionAlgebra::rational(Rat(b), Rat(g)));
      auto c2 = quat_division_certificate(QuaternionAlgebra::rational(Rat(4 * b), Rat(9 * g)));
      CHECK(c1.verdict == c2.verdict);
    }
  }
}

TEST_CASE("splitting at real places over a number field", "[quatalg]") {
  FieldPtr F2 = make_field(QPoly({Rat(-2), Rat(0), Rat(1)}));
  FieldElement alpha = FieldElement::generator(F2);
  QuatPtr DF = QuaternionAlgebra::make(F2, alpha, FieldElement(F2, Rat(-1)));
  // place 0 sends alpha to -sqrt2 < 0: both beta and gamma negative, Hamilton-like
  CHECK_FALSE(splits_at(DF, 0));
  CHECK(splits_at(DF, 1));
}

TEST_CASE("embedding into 2x2 matrices over F(sqrt beta)", "[quatalg]") {
  FieldPtr Q = NumberField::rationals();
  QuatPtr D25 = QuaternionAlgebra::rational(Rat(2), Rat(5));
  auto pj = embed_mat2(QuaternionElement::unit_j(D25));
  CHECK(pj.at(0, 0).u.is_zero());
  CHECK(pj.at(0, 0).v.is_zero());
  CHECK(pj.at(0, 1).u == FieldElement(Q, Rat(1)));
  CHECK(pj.at(1, 0).u == FieldElement(Q, Rat(5)));

  std::mt19937 rng(7);
  for (int t = 0; t < 120; ++t) {
    auto x = rand_elem(D25, rng), y = rand_elem(D25, rng);
    auto px = embed_mat2(x), py = embed_mat2(y), pxy = embed_mat2(x * y);
    auto prod = embed_mul(px, py);
    for (int e = 0; e < 4; ++e) CHECK(prod.e[e] == pxy.e[e]);
    SqrtPair det = embed_det(px);
    CHECK(det.u == reduced_norm(x));
    CHECK(det.v.is_zero());
  }

  SECTION("rational specialization when beta is a square") {
    QuatPtr Dsq = QuaternionAlgebra::rational(Rat(4), Rat(5));
    FieldElement two(Q, Rat(2));
    for (int t = 0; t < 60; ++t) {
      auto x = rand_elem(Dsq, rng), y = rand_elem(Dsq, rng);
      auto mx = embed_mat2_split(x, two), my = embed_mat2_split(y, two);
      CHECK(mx * my == embed_mat2_split(x * y, two));
      FieldElement det = mx.at(0, 0) * mx.at(1, 1) - mx.at(0, 1) * mx.at(1, 0);
      CHECK(det == reduced_norm(x));
    }
  }
}

TEST_CASE("Hermitian diagonalization over a quaternion algebra", "[quatalg][hermitian]") {
  QuatPtr H = QuaternionAlgebra::rational(Rat(-1), Rat(-1));
  QuaternionElement z0 = QuaternionElement::zero(H), o0 = QuaternionElement::one(H);

  auto hd = hermitian_diag_over_D(HermitianFormOverD::make(
      H, Tau::C, Mat<QuaternionElement>::identity(3, z0, o0)));
  REQUIRE(hd.signature.has_value());
  CHECK(hd.signature->first == 3);
  CHECK(hd.signature->second == 0);
  CHECK(hd.group_label == "Sp(3,0)");

  Mat<QuaternionElement> g2 = Mat<QuaternionElement>::identity(2, z0, o0);
  g2.at(1, 1) = -o0;
  auto hd2 = hermitian_diag_over_D(HermitianFormOverD::make(H, Tau::C, g2));
  REQUIRE(hd2.signature.has_value());
  CHECK(hd2.signature->first == 1);
  CHECK(hd2.signature->second == 1);
  CHECK(hd2.group_label == "Sp(1,1)");

  SECTION("dense off-diagonal entries") {
    QuaternionElement x = o0 + QuaternionElement::unit_i(H) + QuaternionElement::unit_j(H);
    Mat<QuaternionElement> g3(2, 2, z0);
    g3.at(0, 0) = o0;
    g3.at(0, 1) = x;
    g3.at(1, 0) = conjugate(x, Tau::C);
    g3.at(1, 1) = o0 + o0;
    auto hd3 = hermitian_diag_over_D(HermitianFormOverD::make(H, Tau::C, g3));
    CHECK(hd3.signature.has_value());
  }

  SECTION("tau_r forms diagonalize without signature claims") {
    QuatPtr Dspl = QuaternionAlgebra::rational(Rat(1), Rat(1));
    QuaternionElement zs = QuaternionElement::zero(Dspl), os = QuaternionElement::one(Dspl);
    Mat<QuaternionElement> J3(3, 3, zs);
    J3.at(0, 2) = os;
    J3.at(1, 1) = os;
    J3.at(2, 0) = os;
    auto hdj = hermitian_diag_over_D(HermitianFormOverD::make(Dspl, Tau::R, J3));
    CHECK(hdj.diagonal.size() == 3);
    CHECK_FALSE(hdj.signature.has_value());
  }
}

TEST_CASE("orientation epsilon at a real place", "[quatalg]") {
  FieldPtr Q = NumberField::rationals();
  QuatPtr D2m1 = QuaternionAlgebra::rational(Rat(2), Rat(-1));
  auto mk = [&](int a, int b, int d) {
    return QuaternionElement(D2m1, FieldElement(Q, Rat(a)), FieldElement(Q, Rat(b)),
                             FieldElement::zero(Q), FieldElement(Q, Rat(d)));
  };
  CHECK(quat_eps(mk(3, 1, 0), 0) == 2);
  CHECK(quat_eps(mk(-3, 1, 0), 0) == 0);
  CHECK(quat_eps(mk(1, 1, 0), 0) == 1);

  QuatPtr D23 = QuaternionAlgebra::rational(Rat(2), Rat(3));
  auto mk2 = [&](int a, int b, int d) {
    return QuaternionElement(D23, FieldElement(Q, Rat(a)), FieldElement(Q, Rat(b)),
                             FieldElement::zero(Q), FieldElement(Q, Rat(d)));
  };
  CHECK(quat_eps(mk2(1, 0, 0), 0) == 1);
  CHECK(quat_eps(mk2(0, 1, 0), 0) == 0);
  CHECK(quat_eps(mk2(0, -1, 0), 0) == 2);
}

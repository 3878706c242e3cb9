#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "latticeforge/latticekit.hpp"

using namespace latticeforge;

TEST_CASE("group tables", "[latticekit][tables]") {
  struct Row {
    const char* label;
    const char* type;
    unsigned rank;
    unsigned dim;
    const char* k;
  };
  const Row rows[] = {
      {"SL(2,R)", "A1", 1, 3, "SO(2)"},
      {"SL(3,R)", "A2", 2, 8, "SO(3)"},
      {"SL(2,C)", "A1", 1, 6, "SU(2)"},
      {"SL(2,H)", "A3", 1, 15, "Sp(2)"},
      {"SL(1,H)", "A1", 0, 3, "Sp(1)"},
      {"SU(2,3)", "A4", 2, 24, "S(U(2) x U(3))"},
      {"SO(2,3)", "B2", 2, 10, "S(O(2) x O(3))"},
      {"SO(3,4)", "B3", 3, 21, "S(O(3) x O(4))"},
      {"SO(2,4)", "D3", 2, 15, "S(O(2) x O(4))"},
      {"SO(5,C)", "B2", 2, 20, "SO(5)"},
      {"SO(6,C)", "D3", 3, 30, "SO(6)"},
      {"SO(3,H)", "D3", 1, 15, "U(3)"},
      {"SO(4,H)", "D4", 2, 28, "U(4)"},
      {"Sp(4,R)", "C2", 2, 10, "U(2)"},
      {"Sp(4,C)", "C2", 2, 20, "Sp(2)"},
      {"Sp(1,1)", "C2", 1, 10, "Sp(1) x Sp(1)"},
      {"Sp(2)", "C2", 0, 10, "Sp(2)"},
      {"SO(3)", "B1", 0, 3, "SO(3)"},
  };
  for (const Row& r : rows) {
    INFO(r.label);
    GroupLabel l = parse_group_label(r.label);
    CHECK(l.str() == r.label);
    CHECK(type_of(l).str() == r.type);
    CHECK(rrank(l) == r.rank);
    CHECK(dim_of(l) == r.dim);
    CHECK(maximal_compact(l) == r.k);
    CHECK(is_compact(l) == (r.rank == 0));
  }
  CHECK(rrank(parse_group_label("SO(3,5)")) == 3);
  CHECK(rrank(parse_group_label("SL(4,H)")) == 3);
  CHECK(rrank(parse_group_label("SO(5,H)")) == 2);
  CHECK(type_of(parse_group_label("SO(4,H)")).str() == "D4");

  auto cx = complexify(parse_group_label("SU(2,3)"));
  REQUIRE(cx.size() == 1);
  CHECK(cx[0] == GroupLabel::sl_c(5));
}

TEST_CASE("complexification is closed and type preserving", "[latticekit][tables]") {
  for (const GroupLabel& l : all_table_labels(8)) {
    INFO(l.str());
    auto cx = complexify(l);
    unsigned total = 0;
    for (const GroupLabel& c : cx) {
      validate_label(c);
      CHECK(type_of(c) == type_of(l));
      total += dim_of(c);
      CHECK(rrank(c) == type_of(c).rank);  // complex groups are quasi-split
    }
    CHECK(total == 2 * dim_of(l));
    CHECK(rrank(l) <= type_of(l).rank);
    CHECK(parse_group_label(l.str()) == l);
  }
}

TEST_CASE("low rank identifications", "[latticekit][tables]") {
  auto iso = is_isotypic(
      {GroupLabel::so(1, 2), GroupLabel::sl_r(2), GroupLabel::su(1, 1), GroupLabel::sp_r(2)});
  CHECK(iso.isotypic);
  CHECK(iso.types[0].str() == "A1");
  auto iso2 = is_isotypic({GroupLabel::so(1, 4), GroupLabel::sp(1, 1)});
  CHECK(iso2.isotypic);
  CHECK(iso2.types[0].str() == "B2");
  CHECK(normalized_type(GroupLabel::so(1, 3)).str() == "A1");
  CHECK(normalized_type(GroupLabel::so(3, 3)).str() == "A3");
  CHECK_THROWS_WITH(normalized_type(GroupLabel::so(2, 2)),
                    Catch::Matchers::ContainsSubstring("SL(2,R) x SL(2,R)"));
  CHECK_THROWS_WITH(is_isotypic({GroupLabel::so_c(4)}),
                    Catch::Matchers::ContainsSubstring("SL(2,C) x SL(2,C)"));
  CHECK_FALSE(is_isotypic({GroupLabel::so(2, 3), GroupLabel::sl_r(3)}).isotypic);  // B2 vs A2
}

TEST_CASE("recipe for prescribed signatures", "[latticekit][recipe]") {
  SECTION("four targets over a biquadratic field") {
    SORecipe rec = irreducible_so_recipe({{2, 3}, {1, 4}, {1, 4}, {0, 5}});
    CHECK(rec.t == 2);
    CHECK((rec.radicands == std::vector<long>{2, 3}));
    REQUIRE(rec.field->degree() == 4);
    CHECK(rec.field->min_poly() == QPoly({Rat(1), Rat(0), Rat(-10), Rat(0), Rat(1)}));
    REQUIRE(rec.verified.size() == 4);
    CHECK(rec.verified[0] == std::make_pair(2u, 3u));
    CHECK(rec.verified[1] == std::make_pair(1u, 4u));
    CHECK(rec.verified[2] == std::make_pair(1u, 4u));
    CHECK(rec.verified[3] == std::make_pair(0u, 5u));
    CHECK(rec.report.compact_places.size() == 1);
    CHECK(rec.report.cocompact == CocompactVerdict::Yes);
    CHECK(rec.report.irreducible);
  }
  SECTION("two targets over a quadratic field") {
    SORecipe rec = irreducible_so_recipe({{1, 2}, {0, 3}});
    CHECK(rec.t == 1);
    CHECK(rec.field->degree() == 2);
    CHECK(rec.verified == std::vector<std::pair<unsigned, unsigned>>{{1, 2}, {0, 3}});
  }
  SECTION("a single definite target stays rational") {
    SORecipe rec = irreducible_so_recipe({{3, 0}});
    CHECK(rec.t == 0);
    CHECK(rec.field->degree() == 1);
    CHECK(rec.verified == std::vector<std::pair<unsigned, unsigned>>{{3, 0}});
  }
  SECTION("random targets, padded with definite places up to 2^t") {
    std::mt19937 rng(20260823);
    for (int trial = 0; trial < 20; ++trial) {
      unsigned n = 3 + rng() % 3;
      unsigned count = 1 + rng() % 4;
      std::vector<std::pair<unsigned, unsigned>> targets;
      for (unsigned i = 0; i < count; ++i) {
        unsigned p = rng() % (n + 1);
        targets.emplace_back(p, n - p);
      }
      SORecipe rec = irreducible_so_recipe(targets);
      std::sort(targets.begin(), targets.end(),
                [](const auto& x, const auto& y) { return x.first > y.first; });
      while (targets.size() < (1u << rec.t)) targets.emplace_back(0u, n);
      std::sort(targets.begin(), targets.end(),
                [](const auto& x, const auto& y) { return x.first > y.first; });
      CHECK(rec.verified == targets);
    }
  }
}

TEST_CASE("orthogonal constructions", "[latticekit][build]") {
  FieldPtr Q = NumberField::rationals();
  FieldPtr q2 = make_field(QPoly({Rat(-2), Rat(0), Rat(1)}));

  SECTION("x^2 + y^2 - sqrt(2) z^2 over Q(sqrt 2)") {
    FieldElement one = FieldElement::one(q2);
    FieldElement rt = FieldElement::generator(q2);
    LatticeDescriptor d;
    d.kind = ConstructionKind::SOForm;
    d.field = q2;
    d.form = QuadraticForm::diagonal(q2, {one, one, -rt});
    LatticeReport rep = build_lattice(d);
    REQUIRE(rep.factors.size() == 2);
    // place 0 sends sqrt2 to its negative embedding, so -sqrt2 becomes positive
    CHECK(rep.factors[0].label == GroupLabel::so(3, 0));
    CHECK(rep.factors[1].label == GroupLabel::so(2, 1));
    CHECK(rep.compact_places == std::vector<std::size_t>{0});
    CHECK(rep.ambient == "SO(2,1)");
    CHECK(rep.cocompact == CocompactVerdict::Yes);
    CHECK(rep.cocompact_reason.find("compact factor") != std::string::npos);
    LatticeReport rep2 = build_lattice(d);
    CHECK(rep2.ambient == rep.ambient);
    CHECK(rep2.cocompact_reason == rep.cocompact_reason);
  }
  SECTION("Id_{2,3} over Q") {
    LatticeDescriptor d;
    d.kind = ConstructionKind::SOForm;
    d.field = Q;
    d.form = QuadraticForm::rational_diagonal({Rat(1), Rat(1), Rat(-1), Rat(-1), Rat(-1)});
    LatticeReport rep = build_lattice(d);
    REQUIRE(rep.factors.size() == 1);
    CHECK(rep.factors[0].label == GroupLabel::so(2, 3));
    CHECK(rep.cocompact == CocompactVerdict::No);
    REQUIRE(rep.isotropic_witness);
    bool nonzero = false;
    for (const FieldElement& c : *rep.isotropic_witness) nonzero = nonzero || !c.is_zero();
    CHECK(nonzero);
    REQUIRE(rep.unipotent_witness);
    QPoly cp = char_poly(*rep.unipotent_witness);
    QPoly xm1({Rat(-1), Rat(1)});
    QPoly expect(Rat(1));
    for (int i = 0; i < 5; ++i) expect = expect * xm1;
    CHECK(cp == expect);
    Mat<Rat> g(5, 5, Rat(0));
    for (int i = 0; i < 5; ++i) g.at(i, i) = i < 2 ? Rat(1) : Rat(-1);
    const Mat<Rat>& u = *rep.unipotent_witness;
    CHECK(u.transpose() * g * u == g);
    REQUIRE(rep.qrank);
    CHECK(*rep.qrank == 2);
  }
  SECTION("anisotropic 7w^2 - x^2 - y^2 - z^2") {
    LatticeDescriptor d;
    d.kind = ConstructionKind::SOForm;
    d.field = Q;
    d.form = QuadraticForm::rational_diagonal({Rat(7), Rat(-1), Rat(-1), Rat(-1)});
    LatticeReport rep = build_lattice(d);
    CHECK(rep.cocompact == CocompactVerdict::Yes);
    CHECK(rep.cocompact_reason.find("anisotropic") != std::string::npos);
    REQUIRE(rep.qrank);
    CHECK(*rep.qrank == 0);
    CHECK_FALSE(rep.irreducible);  // SO(1,3) has type D2, which is not simple
  }
}

TEST_CASE("special linear constructions", "[latticekit][build]") {
  FieldPtr q2 = make_field(QPoly({Rat(-2), Rat(0), Rat(1)}));
  SECTION("SL(2) over Q(sqrt 2)") {
    LatticeDescriptor d;
    d.kind = ConstructionKind::SLField;
    d.field = q2;
    d.sl_n = 2;
    LatticeReport rep = build_lattice(d);
    CHECK(rep.ambient == "SL(2,R) x SL(2,R)");
    CHECK(rep.irreducible);
    CHECK(rep.cocompact == CocompactVerdict::No);
    REQUIRE(rep.unipotent_witness);
    CHECK(char_poly(*rep.unipotent_witness) == QPoly({Rat(1), Rat(-2), Rat(1)}));
    REQUIRE(rep.qrank);
    CHECK(*rep.qrank == 1);
  }
  SECTION("SL(n) over a quaternion algebra") {
    QuatPtr ham = QuaternionAlgebra::rational(Rat(-1), Rat(-1));
    LatticeDescriptor d;
    d.kind = ConstructionKind::SLQuat;
    d.alg = ham;
    d.field = ham->field;
    d.sl_n = 1;
    LatticeReport rep = build_lattice(d);
    CHECK(rep.factors[0].label == GroupLabel::sl_h(1));
    CHECK(rep.cocompact == CocompactVerdict::Yes);

    QuatPtr split = QuaternionAlgebra::rational(Rat(1), Rat(1));
    d.alg = split;
    LatticeReport rep2 = build_lattice(d);
    CHECK(rep2.factors[0].label == GroupLabel::sl_r(2));
    CHECK(rep2.cocompact == CocompactVerdict::No);

    d.alg = ham;
    d.sl_n = 2;
    LatticeReport rep3 = build_lattice(d);
    CHECK(rep3.factors[0].label == GroupLabel::sl_h(2));
    CHECK(rep3.cocompact == CocompactVerdict::No);
  }
}

TEST_CASE("Hermitian constructions over quaternion algebras", "[latticekit][build]") {
  SECTION("conjugation-Hermitian diag(1,-1) over the Hamilton quaternions") {
    QuatPtr ham = QuaternionAlgebra::rational(Rat(-1), Rat(-1));
    Mat<QuaternionElement> g(2, 2, QuaternionElement::zero(ham));
    g.at(0, 0) = QuaternionElement::one(ham);
    g.at(1, 1) = -QuaternionElement::one(ham);
    LatticeDescriptor d;
    d.kind = ConstructionKind::SUQuatC;
    d.alg = ham;
    d.field = ham->field;
    d.herm_d = HermitianFormOverD::make(ham, Tau::C, g);
    LatticeReport rep = build_lattice(d);
    REQUIRE(rep.factors.size() == 1);
    CHECK(rep.factors[0].label == GroupLabel::sp(1, 1));
    CHECK(rep.cocompact == CocompactVerdict::No);
    REQUIRE(rep.isotropic_witness);
    CHECK(rep.isotropic_witness->size() == 8);
  }
  SECTION("conjugation-Hermitian Id_2 over the division algebra D_{2,3}") {
    QuatPtr d23 = QuaternionAlgebra::rational(Rat(2), Rat(3));
    Mat<QuaternionElement> g(2, 2, QuaternionElement::zero(d23));
    g.at(0, 0) = QuaternionElement::one(d23);
    g.at(1, 1) = QuaternionElement::one(d23);
    LatticeDescriptor d;
    d.kind = ConstructionKind::SUQuatC;
    d.alg = d23;
    d.field = d23->field;
    d.herm_d = HermitianFormOverD::make(d23, Tau::C, g);
    LatticeReport rep = build_lattice(d);
    CHECK(rep.factors[0].label == GroupLabel::sp_r(4));
    // the rank-8 norm form <1,-2,-3,6> (doubled) is isotropic over Q
    CHECK(rep.cocompact == CocompactVerdict::No);
  }
  SECTION("reversion-Hermitian forms stay inconclusive") {
    QuatPtr ham = QuaternionAlgebra::rational(Rat(-1), Rat(-1));
    Mat<QuaternionElement> g(2, 2, QuaternionElement::zero(ham));
    g.at(0, 0) = QuaternionElement::one(ham);
    g.at(1, 1) = QuaternionElement::unit_i(ham);
    LatticeDescriptor d;
    d.kind = ConstructionKind::SUQuatR;
    d.alg = ham;
    d.field = ham->field;
    d.herm_d = HermitianFormOverD::make(ham, Tau::R, g);
    LatticeReport rep = build_lattice(d);
    CHECK(rep.factors[0].label == GroupLabel::so_h(2));
    CHECK(rep.cocompact == CocompactVerdict::Inconclusive);
  }
}

TEST_CASE("noncocompact family in SL(3)", "[latticekit][family]") {
  SL3FamilyReport fam = sl3_noncocompact_family(2);
  CHECK(fam.report.ambient == "SL(3,R)");
  REQUIRE(fam.report.factors.size() == 1);
  CHECK(fam.report.factors[0].label == GroupLabel::sl_r(3));
  CHECK(fam.report.cocompact == CocompactVerdict::No);
  REQUIRE(fam.report.qrank);
  CHECK(*fam.report.qrank == 1);
  CHECK(fam.report.isotropic_witness);
  REQUIRE(fam.report.unipotent_witness);
  const Mat<Rat>& u = *fam.report.unipotent_witness;
  CHECK(u.at(0, 1) == Rat(2));
  CHECK(u.at(0, 2) == Rat(-2));
  CHECK(u.at(1, 2) == Rat(-2));
  QPoly xm1({Rat(-1), Rat(1)});
  CHECK(char_poly(u) == xm1 * xm1 * xm1);

  Mat<FieldElement> u2 = sl3_family_unipotent(fam.ext, 2, 2, 2, 4);
  CHECK_FALSE(u2.at(0, 1).is_rational());

  CHECK_THROWS_AS(sl3_noncocompact_family(4), std::invalid_argument);  // 4 is a square mod 7
  CHECK(sl3_noncocompact_family(3).report.cocompact == CocompactVerdict::No);
}

TEST_CASE("cocompact family from cyclic algebras", "[latticekit][family]") {
  SL3CyclicReport r3 = cocompact_sl3_cyclic(7, 3);
  CHECK(r3.criterion.passes);
  CHECK(r3.criterion.order == 6);
  CHECK(r3.algebra.verdict == AlgVerdict::Division);
  CHECK(r3.report.cocompact == CocompactVerdict::Yes);
  REQUIRE(r3.report.qrank);
  CHECK(*r3.report.qrank == 0);
  CHECK(r3.report.ambient == "SL(3,R)");

  CHECK(cocompact_sl3_cyclic(7, 5).report.cocompact == CocompactVerdict::Yes);

  SL3CyclicReport r13 = cocompact_sl3_cyclic(7, 13);
  CHECK_FALSE(r13.criterion.passes);
  CHECK(r13.criterion.order == 2);
  CHECK(r13.algebra.verdict == AlgVerdict::Split);
  CHECK(r13.report.cocompact == CocompactVerdict::No);
  REQUIRE(r13.report.qrank);
  CHECK(*r13.report.qrank == 2);

  SL3CyclicReport r2 = cocompact_sl3_cyclic(7, 2);
  CHECK_FALSE(r2.criterion.passes);
  CHECK(r2.criterion.order == 3);
  CHECK(r2.algebra.verdict == AlgVerdict::Inconclusive);
  CHECK(r2.report.cocompact == CocompactVerdict::Inconclusive);

  CHECK_THROWS_AS(cocompact_sl3_cyclic(7, 7), std::invalid_argument);
}

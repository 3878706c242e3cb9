#pragma once

// Real classical groups and the arithmetic constructions that produce
// lattices in them.
//
// The first half of this header is bookkeeping: a GroupLabel names an
// isogeny class of real classical groups -- SL(n,R), SL(n,C), SL(n,H),
// SU(p,q), SO(p,q), SO(n,C), SO(n,H), Sp(2n,R), Sp(2n,C), Sp(p,q) -- and
// we tabulate type, real rank, dimension, maximal compact subgroup and
// complexification for each family.  Low-rank coincidences (B1 = C1 = A1,
// C2 = B2, D2 degenerate, D3 = A3) are applied only by normalized_type();
// type_of() reports the naive family type so that complexification is
// type-preserving row by row.
//
// The second half evaluates arithmetic data (a quadratic form over a
// number field, a Hermitian form over a quadratic extension or a
// quaternion algebra, SL_n over a field or a quaternion algebra) place by
// place, producing a LatticeReport: the archimedean factor at each place,
// which factors are compact, and a cocompactness verdict that is either
// certified (definite place, anisotropy obstruction, explicit isotropic
// vector or unipotent element) or honestly inconclusive.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cyclicalg.hpp"
#include "matrix.hpp"
#include "numfield.hpp"
#include "quadform.hpp"
#include "quatalg.hpp"
#include "rational.hpp"

namespace latticeforge {

// ---------------------------------------------------------------------------
// Group labels.

enum class Family {
  SL_R,   // SL(n, R), n >= 2
  SL_C,   // SL(n, C), n >= 2
  SL_H,   // SL(n, H), n >= 1
  SU,     // SU(p, q), p + q >= 2
  SO,     // SO(p, q), p + q >= 3
  SO_C,   // SO(n, C), n >= 3
  SO_H,   // SO(n, H), n >= 2
  Sp_R,   // Sp(2n, R); the stored parameter is the matrix size 2n
  Sp_C,   // Sp(2n, C); same convention
  Sp_pq,  // Sp(p, q), p + q >= 1 (quaternionic unitary groups)
};

struct GroupLabel {
  Family family = Family::SL_R;
  unsigned a = 0;  // n, or p for two-parameter families
  unsigned b = 0;  // q for two-parameter families, else 0

  bool operator==(const GroupLabel&) const = default;

  static GroupLabel sl_r(unsigned n) { return {Family::SL_R, n, 0}; }
  static GroupLabel sl_c(unsigned n) { return {Family::SL_C, n, 0}; }
  static GroupLabel sl_h(unsigned n) { return {Family::SL_H, n, 0}; }
  static GroupLabel su(unsigned p, unsigned q) { return {Family::SU, p, q}; }
  static GroupLabel so(unsigned p, unsigned q) { return {Family::SO, p, q}; }
  static GroupLabel so_c(unsigned n) { return {Family::SO_C, n, 0}; }
  static GroupLabel so_h(unsigned n) { return {Family::SO_H, n, 0}; }
  static GroupLabel sp_r(unsigned two_n) { return {Family::Sp_R, two_n, 0}; }
  static GroupLabel sp_c(unsigned two_n) { return {Family::Sp_C, two_n, 0}; }
  static GroupLabel sp(unsigned p, unsigned q) { return {Family::Sp_pq, p, q}; }

  // "SO(2,3)", "SL(4,H)", "Sp(4,R)".  Two-parameter labels with one side
  // zero collapse to the compact form: SO(5,0) prints as "SO(5)".
  std::string str() const {
    std::ostringstream os;
    auto two_param = [&](const char* name) {
      if (b == 0)
        os << name << '(' << a << ')';
      else if (a == 0)
        os << name << '(' << b << ')';
      else
        os << name << '(' << a << ',' << b << ')';
    };
    switch (family) {
      case Family::SL_R: os << "SL(" << a << ",R)"; break;
      case Family::SL_C: os << "SL(" << a << ",C)"; break;
      case Family::SL_H: os << "SL(" << a << ",H)"; break;
      case Family::SU: two_param("SU"); break;
      case Family::SO: two_param("SO"); break;
      case Family::SO_C: os << "SO(" << a << ",C)"; break;
      case Family::SO_H: os << "SO(" << a << ",H)"; break;
      case Family::Sp_R: os << "Sp(" << a << ",R)"; break;
      case Family::Sp_C: os << "Sp(" << a << ",C)"; break;
      case Family::Sp_pq: two_param("Sp"); break;
    }
    return os.str();
  }
};

// A simple Lie type, e.g. {B, 2}.
struct LieType {
  char letter = 'A';
  unsigned rank = 0;

  bool operator==(const LieType&) const = default;
  std::string str() const { return std::string(1, letter) + std::to_string(rank); }
};

// Throws std::invalid_argument for labels that do not name a (semi)simple
// group: trivial and abelian degenerations are rejected here.  Non-simple
// type-D2 labels such as SO(2,2) are accepted -- they occur naturally as
// archimedean factors -- but see is_simple() below.
inline void validate_label(const GroupLabel& l) {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument(l.str() + ": " + why);
  };
  switch (l.family) {
    case Family::SL_R:
    case Family::SL_C:
      if (l.b != 0) fail("SL takes a single parameter");
      if (l.a < 2) fail("SL(1) is trivial");
      break;
    case Family::SL_H:
      if (l.b != 0) fail("SL takes a single parameter");
      if (l.a < 1) fail("empty parameter");
      break;
    case Family::SU:
      if (l.a + l.b < 2) fail("SU(1) is trivial");
      break;
    case Family::SO:
      if (l.a + l.b < 3) fail("SO in fewer than 3 variables is abelian");
      break;
    case Family::SO_C:
      if (l.b != 0) fail("SO(n,C) takes a single parameter");
      if (l.a < 3) fail("SO(n,C) with n < 3 is abelian");
      break;
    case Family::SO_H:
      if (l.b != 0) fail("SO(n,H) takes a single parameter");
      if (l.a < 2) fail("SO(1,H) is abelian");
      break;
    case Family::Sp_R:
    case Family::Sp_C:
      if (l.b != 0) fail("Sp over R or C takes a single parameter");
      if (l.a < 2 || l.a % 2 != 0) fail("the symplectic parameter is the matrix size, an even number >= 2");
      break;
    case Family::Sp_pq:
      if (l.a + l.b < 1) fail("empty parameter");
      break;
  }
}

// Naive family type, before low-rank identifications.  SO in total
// dimension m has type B_{(m-1)/2} (m odd) or D_{m/2} (m even); the given
// label must pass validate_label.
inline LieType type_of(const GroupLabel& l) {
  validate_label(l);
  switch (l.family) {
    case Family::SL_R:
    case Family::SL_C:
      return {'A', l.a - 1};
    case Family::SL_H:
      return {'A', 2 * l.a - 1};
    case Family::SU:
      return {'A', l.a + l.b - 1};
    case Family::SO: {
      unsigned m = l.a + l.b;
      return m % 2 ? LieType{'B', (m - 1) / 2} : LieType{'D', m / 2};
    }
    case Family::SO_C:
      return l.a % 2 ? LieType{'B', (l.a - 1) / 2} : LieType{'D', l.a / 2};
    case Family::SO_H:
      return {'D', l.a};
    case Family::Sp_R:
    case Family::Sp_C:
      return {'C', l.a / 2};
    case Family::Sp_pq:
      return {'C', l.a + l.b};
  }
  throw std::logic_error("type_of: unreachable");
}

// The type-D2 labels split into a genuinely simple case (SO(1,3), which is
// SL(2,C) viewed as a real group) and products of two rank-one groups.
inline bool is_simple(const GroupLabel& l) {
  validate_label(l);
  LieType t = type_of(l);
  if (!(t.letter == 'D' && t.rank == 2)) return true;
  if (l.family == Family::SO) return std::min(l.a, l.b) == 1;
  return false;  // SO(4,C), SO(2,H)
}

// Explains why a type-D2 label fails to be simple.
inline std::string nonsimple_explanation(const GroupLabel& l) {
  if (is_simple(l)) throw std::logic_error("nonsimple_explanation: label is simple");
  if (l.family == Family::SO) {
    if (std::min(l.a, l.b) == 0) return l.str() + " is isogenous to SU(2) x SU(2), hence not simple";
    return l.str() + " is isogenous to SL(2,R) x SL(2,R), hence not simple";
  }
  if (l.family == Family::SO_C) return l.str() + " is isogenous to SL(2,C) x SL(2,C), hence not simple";
  return l.str() + " is isogenous to SL(2,R) x SU(2), hence not simple";
}

inline unsigned rrank(const GroupLabel& l) {
  validate_label(l);
  switch (l.family) {
    case Family::SL_R:
    case Family::SL_C:
      return l.a - 1;
    case Family::SL_H:
      return l.a - 1;
    case Family::SU:
    case Family::SO:
    case Family::Sp_pq:
      return std::min(l.a, l.b);
    case Family::SO_C:
    case Family::SO_H:
      return l.a / 2;
    case Family::Sp_R:
    case Family::Sp_C:
      return l.a / 2;
  }
  throw std::logic_error("rrank: unreachable");
}

inline bool is_compact(const GroupLabel& l) { return rrank(l) == 0; }

// Dimension as a real Lie group.
inline unsigned dim_of(const GroupLabel& l) {
  validate_label(l);
  unsigned m = 0;
  switch (l.family) {
    case Family::SL_R: return l.a * l.a - 1;
    case Family::SL_C: return 2 * (l.a * l.a - 1);
    case Family::SL_H: return 4 * l.a * l.a - 1;
    case Family::SU: m = l.a + l.b; return m * m - 1;
    case Family::SO: m = l.a + l.b; return m * (m - 1) / 2;
    case Family::SO_C: return l.a * (l.a - 1);
    case Family::SO_H: return l.a * (2 * l.a - 1);
    case Family::Sp_R: return l.a * (l.a + 1) / 2;
    case Family::Sp_C: return l.a * (l.a + 1);
    case Family::Sp_pq: m = l.a + l.b; return m * (2 * m + 1);
  }
  throw std::logic_error("dim_of: unreachable");
}

// Maximal compact subgroup, as a display string.
inline std::string maximal_compact(const GroupLabel& l) {
  validate_label(l);
  std::ostringstream os;
  switch (l.family) {
    case Family::SL_R: os << "SO(" << l.a << ')'; break;
    case Family::SL_C: os << "SU(" << l.a << ')'; break;
    case Family::SL_H: os << "Sp(" << l.a << ')'; break;
    case Family::SU:
      if (l.a == 0 || l.b == 0)
        os << "SU(" << (l.a + l.b) << ')';
      else
        os << "S(U(" << l.a << ") x U(" << l.b << "))";
      break;
    case Family::SO:
      if (l.a == 0 || l.b == 0)
        os << "SO(" << (l.a + l.b) << ')';
      else
        os << "S(O(" << l.a << ") x O(" << l.b << "))";
      break;
    case Family::SO_C: os << "SO(" << l.a << ')'; break;
    case Family::SO_H: os << "U(" << l.a << ')'; break;
    case Family::Sp_R: os << "U(" << l.a / 2 << ')'; break;
    case Family::Sp_C: os << "Sp(" << l.a / 2 << ')'; break;
    case Family::Sp_pq:
      if (l.a == 0 || l.b == 0)
        os << "Sp(" << (l.a + l.b) << ')';
      else
        os << "Sp(" << l.a << ") x Sp(" << l.b << ')';
      break;
  }
  return os.str();
}

// Complexification.  Groups that are already complex double up; everything
// else lands in the complex family of the same type.
inline std::vector<GroupLabel> complexify(const GroupLabel& l) {
  validate_label(l);
  switch (l.family) {
    case Family::SL_R: return {GroupLabel::sl_c(l.a)};
    case Family::SL_C: return {GroupLabel::sl_c(l.a), GroupLabel::sl_c(l.a)};
    case Family::SL_H: return {GroupLabel::sl_c(2 * l.a)};
    case Family::SU: return {GroupLabel::sl_c(l.a + l.b)};
    case Family::SO: return {GroupLabel::so_c(l.a + l.b)};
    case Family::SO_C: return {GroupLabel::so_c(l.a), GroupLabel::so_c(l.a)};
    case Family::SO_H: return {GroupLabel::so_c(2 * l.a)};
    case Family::Sp_R: return {GroupLabel::sp_c(l.a)};
    case Family::Sp_C: return {GroupLabel::sp_c(l.a), GroupLabel::sp_c(l.a)};
    case Family::Sp_pq: return {GroupLabel::sp_c(2 * (l.a + l.b))};
  }
  throw std::logic_error("complexify: unreachable");
}

// Type after the low-rank identifications: B1 and C1 become A1, C2 becomes
// B2, D3 becomes A3, and the one simple D2 group (SO(1,3), i.e. SL(2,C)
// as a real group) becomes A1.  Only defined for simple labels.
inline LieType normalized_type(const GroupLabel& l) {
  if (!is_simple(l)) throw std::invalid_argument(nonsimple_explanation(l));
  LieType t = type_of(l);
  if (t.rank == 1) return {'A', 1};                       // B1, C1 (and A1 itself)
  if (t.letter == 'C' && t.rank == 2) return {'B', 2};
  if (t.letter == 'D' && t.rank == 2) return {'A', 1};    // SO(1,3)
  if (t.letter == 'D' && t.rank == 3) return {'A', 3};
  return t;
}

struct IsotypicResult {
  bool isotypic = false;
  std::vector<LieType> types;  // normalized type of each input label
};

// Do the given simple groups all have the same normalized type?  Non-simple
// labels are rejected with the isogeny explanation.
inline IsotypicResult is_isotypic(const std::vector<GroupLabel>& labels) {
  if (labels.empty()) throw std::invalid_argument("is_isotypic: no labels given");
  IsotypicResult r;
  for (const GroupLabel& l : labels) r.types.push_back(normalized_type(l));
  r.isotypic = std::all_of(r.types.begin(), r.types.end(),
                           [&](const LieType& t) { return t == r.types.front(); });
  return r;
}

// Every valid label whose parameters total at most max_param, in a fixed
// deterministic order.  Used by the table-consistency checks.
inline std::vector<GroupLabel> all_table_labels(unsigned max_param = 8) {
  std::vector<GroupLabel> out;
  auto keep = [&](GroupLabel l) {
    try {
      validate_label(l);
    } catch (const std::invalid_argument&) {
      return;
    }
    out.push_back(l);
  };
  for (unsigned n = 2; n <= max_param; ++n) keep(GroupLabel::sl_r(n));
  for (unsigned n = 2; n <= max_param; ++n) keep(GroupLabel::sl_c(n));
  for (unsigned n = 1; n <= max_param; ++n) keep(GroupLabel::sl_h(n));
  for (unsigned p = 0; p <= max_param; ++p)
    for (unsigned q = 0; q <= p && p + q <= max_param; ++q) keep(GroupLabel::su(p, q));
  for (unsigned p = 0; p <= max_param; ++p)
    for (unsigned q = 0; q <= p && p + q <= max_param; ++q) keep(GroupLabel::so(p, q));
  for (unsigned n = 3; n <= max_param; ++n) keep(GroupLabel::so_c(n));
  for (unsigned n = 2; n <= max_param; ++n) keep(GroupLabel::so_h(n));
  for (unsigned n = 2; n <= max_param; n += 2) keep(GroupLabel::sp_r(n));
  for (unsigned n = 2; n <= max_param; n += 2) keep(GroupLabel::sp_c(n));
  for (unsigned p = 0; p <= max_param; ++p)
    for (unsigned q = 0; q <= p && p + q <= max_param; ++q) keep(GroupLabel::sp(p, q));
  return out;
}

// Parses the display syntax back into a label: "SO(3,5)", "SL(2,H)",
// "Sp(4,R)", "SU(2)", "SO(7,C)".  The result is validated.
inline GroupLabel parse_group_label(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  auto fail = [&]() -> GroupLabel {
    throw std::invalid_argument("unrecognized group label: " + text);
  };
  std::size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')') return fail();
  std::string name = s.substr(0, open);
  std::string args = s.substr(open + 1, s.size() - open - 2);
  std::size_t comma = args.find(',');
  std::string first = comma == std::string::npos ? args : args.substr(0, comma);
  std::string second = comma == std::string::npos ? "" : args.substr(comma + 1);
  auto numeric = [](const std::string& t) {
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (!numeric(first)) return fail();
  unsigned p = static_cast<unsigned>(std::stoul(first));
  std::optional<unsigned> q;
  if (numeric(second)) q = static_cast<unsigned>(std::stoul(second));

  GroupLabel l;
  if (name == "SL") {
    if (second == "R") l = GroupLabel::sl_r(p);
    else if (second == "C") l = GroupLabel::sl_c(p);
    else if (second == "H") l = GroupLabel::sl_h(p);
    else return fail();
  } else if (name == "SU") {
    if (second.empty()) l = GroupLabel::su(p, 0);
    else if (q) l = GroupLabel::su(p, *q);
    else return fail();
  } else if (name == "SO") {
    if (second.empty()) l = GroupLabel::so(p, 0);
    else if (q) l = GroupLabel::so(p, *q);
    else if (second == "C") l = GroupLabel::so_c(p);
    else if (second == "H") l = GroupLabel::so_h(p);
    else return fail();
  } else if (name == "Sp") {
    if (second.empty()) l = GroupLabel::sp(p, 0);
    else if (q) l = GroupLabel::sp(p, *q);
    else if (second == "R") l = GroupLabel::sp_r(p);
    else if (second == "C") l = GroupLabel::sp_c(p);
    else return fail();
  } else {
    return fail();
  }
  validate_label(l);
  return l;
}

// ---------------------------------------------------------------------------
// Arithmetic constructions.

enum class ConstructionKind {
  SOForm,       // SO(B; O_F) for a quadratic form B over F
  SUQuadratic,  // SU(B; O_L, sigma) for L = F(sqrt(beta)) quadratic over F
  SUQuatC,      // SU(B; O_D, tau_c) for a quaternion algebra D over F
  SUQuatR,      // SU(B; O_D, tau_r)
  SLField,      // SL(n, O_F)
  SLQuat,       // SL(n, O_D)
};

struct LatticeDescriptor {
  ConstructionKind kind = ConstructionKind::SOForm;
  FieldPtr field;  // the base field F (for quaternion constructions, D->field)

  std::optional<QuadraticForm> form;  // SOForm

  // SUQuadratic: L = F(sqrt(beta)); the Hermitian matrix must have entries
  // in F itself (its sqrt(beta) part must vanish), which covers diagonal
  // Hermitian forms and the antidiagonal forms J_n.
  std::optional<FieldElement> ext_beta;
  std::optional<Mat<FieldElement>> herm_gram;

  QuatPtr alg;                                 // SUQuat*, SLQuat
  std::optional<HermitianFormOverD> herm_d;    // SUQuat*

  unsigned sl_n = 0;  // SLField, SLQuat
};

enum class CocompactVerdict { Yes, No, Inconclusive };

inline const char* to_string(CocompactVerdict v) {
  switch (v) {
    case CocompactVerdict::Yes: return "yes";
    case CocompactVerdict::No: return "no";
    case CocompactVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct PlaceFactor {
  std::size_t place = 0;  // place index in the base field
  bool real = true;
  GroupLabel label;
  bool compact = false;
};

struct LatticeReport {
  std::string construction;
  std::vector<PlaceFactor> factors;
  std::vector<std::size_t> compact_places;
  std::string ambient;  // product of the noncompact factors
  bool irreducible = false;
  CocompactVerdict cocompact = CocompactVerdict::Inconclusive;
  std::string cocompact_reason;

  // Certificates, where available.  The isotropic witness is a nonzero
  // vector with B(w,w) = 0 for the relevant form; unipotent witnesses are
  // group elements with characteristic polynomial (x-1)^n.
  std::optional<std::vector<FieldElement>> isotropic_witness;
  std::optional<Mat<Rat>> unipotent_witness;
  std::optional<Mat<FieldElement>> unipotent_witness_field;
  std::optional<long> qrank;
  std::string notes;
};

namespace detail {

inline std::string field_blurb(const FieldPtr& f) {
  if (f->degree() == 1) return "Q";
  std::ostringstream os;
  os << "a degree-" << f->degree() << " field with " << f->real_place_count() << " real and "
     << f->complex_place_count() << " complex places";
  return os.str();
}

inline std::string ambient_string(const std::vector<PlaceFactor>& factors) {
  std::string out;
  for (const PlaceFactor& pf : factors) {
    if (pf.compact) continue;
    if (!out.empty()) out += " x ";
    out += pf.label.str();
  }
  if (out.empty()) out = "(compact)";
  return out;
}

inline std::vector<FieldElement> mat_apply(const Mat<FieldElement>& m,
                                           const std::vector<FieldElement>& v,
                                           const FieldElement& zero) {
  if (m.cols() != v.size()) throw std::logic_error("mat_apply: size mismatch");
  std::vector<FieldElement> out(m.rows(), zero);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] = out[i] + m.at(i, j) * v[j];
  return out;
}

inline FieldElement form_value(const QuadraticForm& form, const std::vector<FieldElement>& v) {
  FieldElement acc = FieldElement::zero(form.field);
  for (std::size_t i = 0; i < form.dim(); ++i)
    for (std::size_t j = 0; j < form.dim(); ++j) acc = acc + v[i] * form.gram.at(i, j) * v[j];
  return acc;
}

// The transvection attached to an isotropic u and a companion v with
// B(u,v) = 0, v independent of u:
//   E(x) = x + B(x,u) v - B(x,v) u - (1/2) B(v,v) B(x,u) u.
// It preserves B, fixes the isotropic line, and (E - 1)^3 = 0, so it is a
// nontrivial unipotent element of SO(B).
inline Mat<FieldElement> isotropic_transvection(const QuadraticForm& form,
                                                const std::vector<FieldElement>& u) {
  const FieldPtr& F = form.field;
  const std::size_t n = form.dim();
  const FieldElement fz = FieldElement::zero(F), fo = FieldElement::one(F);
  if (n < 3) throw std::invalid_argument("transvection: need rank >= 3");

  // Row vector B(u, .) and its kernel.
  Mat<FieldElement> brow(1, n, fz);
  for (std::size_t j = 0; j < n; ++j) {
    FieldElement s = fz;
    for (std::size_t i = 0; i < n; ++i) s = s + u[i] * form.gram.at(i, j);
    brow.at(0, j) = s;
  }
  std::vector<std::vector<FieldElement>> ker = mat_kernel(brow, fz, fo);
  std::optional<std::vector<FieldElement>> companion;
  for (const std::vector<FieldElement>& k : ker) {
    Mat<FieldElement> pair_rows = Mat<FieldElement>::from_rows({u, k});
    if (mat_kernel(pair_rows.transpose(), fz, fo).empty()) {
      companion = k;
      break;
    }
  }
  if (!companion) throw std::logic_error("transvection: no companion vector (degenerate form?)");
  const std::vector<FieldElement>& v = *companion;

  auto bform = [&](const std::vector<FieldElement>& x, const std::vector<FieldElement>& y) {
    FieldElement s = fz;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s = s + x[i] * form.gram.at(i, j) * y[j];
    return s;
  };
  FieldElement qv = bform(v, v);
  FieldElement half = FieldElement(F, make_rat(Int(1), Int(2)));

  Mat<FieldElement> e = Mat<FieldElement>::identity(n, fz, fo);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<FieldElement> x(n, fz);
    x[col] = fo;
    FieldElement bu = bform(x, u), bv = bform(x, v);
    for (std::size_t i = 0; i < n; ++i)
      e.at(i, col) = e.at(i, col) + bu * v[i] - bv * u[i] - half * qv * bu * u[i];
  }

  // Exact certification: E^T G E = G and (E - I)^3 = 0.
  Mat<FieldElement> lhs = e.transpose() * form.gram * e;
  if (!(lhs == form.gram)) throw std::logic_error("transvection: does not preserve the form");
  Mat<FieldElement> nmat = e;
  for (std::size_t i = 0; i < n; ++i) nmat.at(i, i) = nmat.at(i, i) - fo;
  Mat<FieldElement> n3 = nmat * nmat * nmat;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!n3.at(i, j).is_zero()) throw std::logic_error("transvection: not unipotent");
  return e;
}

inline std::optional<Mat<Rat>> rational_matrix(const Mat<FieldElement>& m) {
  Mat<Rat> out(m.rows(), m.cols(), Rat(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m.at(i, j).is_rational()) return std::nullopt;
      out.at(i, j) = m.at(i, j).as_rational();
    }
  return out;
}

// I + E_{12}: the elementary unipotent witness for SL(n, O).
inline Mat<Rat> elementary_unipotent(std::size_t n) {
  Mat<Rat> u = Mat<Rat>::identity(n, Rat(0), Rat(1));
  u.at(0, 1) = Rat(1);
  return u;
}

}  // namespace detail

// Evaluates the descriptor at every archimedean place of the base field and
// assembles the lattice report.  All verdict-bearing fields are certified:
// "yes" rests on a compact factor or an anisotropy certificate, "no" on an
// isotropic or unipotent witness stored in the report, and anything weaker
// is reported as inconclusive.
inline LatticeReport build_lattice(const LatticeDescriptor& desc) {
  LatticeReport rep;
  const FieldPtr& F = desc.field ? desc.field
                                 : (desc.alg ? desc.alg->field : throw std::invalid_argument("build_lattice: no base field"));
  const std::size_t places = F->place_count();
  std::ostringstream cons;

  // --- per-place labels -------------------------------------------------
  std::optional<HermDiagResult> hd;  // cached Hermitian diagonalisation
  auto labels_for = [&](std::size_t v) -> GroupLabel {
    const bool real = F->place_is_real(v);
    switch (desc.kind) {
      case ConstructionKind::SOForm: {
        const QuadraticForm& B = *desc.form;
        if (!real) return GroupLabel::so_c(static_cast<unsigned>(B.dim()));
        auto sig = signature_at(B, v);
        return GroupLabel::so(sig.first, sig.second);
      }
      case ConstructionKind::SUQuadratic: {
        const unsigned n = static_cast<unsigned>(desc.herm_gram->rows());
        if (!real) return GroupLabel::sl_c(n);
        if (desc.ext_beta->sign_at(v) > 0) return GroupLabel::sl_r(n);
        QuadraticForm P = QuadraticForm::make(F, *desc.herm_gram);
        auto sig = signature_at(P, v);
        return GroupLabel::su(sig.first, sig.second);
      }
      case ConstructionKind::SUQuatC: {
        const unsigned n = static_cast<unsigned>(desc.herm_d->dim());
        if (!real) return GroupLabel::sp_c(2 * n);
        if (splits_at(desc.alg, v)) return GroupLabel::sp_r(2 * n);
        unsigned pos = 0, neg = 0;
        for (const QuaternionElement& h : hd->diagonal)
          (h.a().sign_at(v) > 0 ? pos : neg) += 1;
        return GroupLabel::sp(pos, neg);
      }
      case ConstructionKind::SUQuatR: {
        const unsigned n = static_cast<unsigned>(desc.herm_d->dim());
        if (!real) return GroupLabel::so_c(2 * n);
        if (!splits_at(desc.alg, v)) return GroupLabel::so_h(n);
        unsigned p = 0;
        for (const QuaternionElement& h : hd->diagonal) p += quat_eps(h, v);
        return GroupLabel::so(p, 2 * n - p);
      }
      case ConstructionKind::SLField:
        return real ? GroupLabel::sl_r(desc.sl_n) : GroupLabel::sl_c(desc.sl_n);
      case ConstructionKind::SLQuat: {
        if (!real) return GroupLabel::sl_c(2 * desc.sl_n);
        if (splits_at(desc.alg, v)) return GroupLabel::sl_r(2 * desc.sl_n);
        return GroupLabel::sl_h(desc.sl_n);
      }
    }
    throw std::logic_error("build_lattice: unreachable");
  };

  // --- validation + construction string --------------------------------
  bool simple_group = true;
  switch (desc.kind) {
    case ConstructionKind::SOForm: {
      if (!desc.form) throw std::invalid_argument("build_lattice: SO construction needs a form");
      const QuadraticForm& B = *desc.form;
      if (B.field != F) throw std::invalid_argument("build_lattice: form is over a different field");
      if (B.dim() < 3) throw std::invalid_argument("build_lattice: SO forms of rank < 3 are abelian");
      if (B.degenerate()) throw std::invalid_argument("build_lattice: degenerate form");
      simple_group = (B.dim() != 4);
      cons << "SO(B; O_F), rank " << B.dim() << ", F = " << detail::field_blurb(F);
      break;
    }
    case ConstructionKind::SUQuadratic: {
      if (!desc.ext_beta || !desc.herm_gram)
        throw std::invalid_argument("build_lattice: SU/quadratic construction needs beta and a gram matrix");
      if (desc.ext_beta->is_zero()) throw std::invalid_argument("build_lattice: beta = 0");
      if (desc.ext_beta->is_rational() && rat_sqrt_exact(desc.ext_beta->as_rational()))
        throw std::invalid_argument("build_lattice: beta is a square, L is not a field");
      const Mat<FieldElement>& P = *desc.herm_gram;
      if (P.rows() != P.cols() || P.rows() < 2)
        throw std::invalid_argument("build_lattice: Hermitian gram must be square of size >= 2");
      QuadraticForm pform = QuadraticForm::make(F, P);  // validates symmetry
      if (pform.degenerate()) throw std::invalid_argument("build_lattice: degenerate Hermitian form");
      cons << "SU(B; O_L, sigma), rank " << P.rows() << ", L = F(sqrt(beta)), F = "
           << detail::field_blurb(F);
      break;
    }
    case ConstructionKind::SUQuatC:
    case ConstructionKind::SUQuatR: {
      if (!desc.alg || !desc.herm_d)
        throw std::invalid_argument("build_lattice: SU/quaternion construction needs an algebra and a form");
      Tau expect = desc.kind == ConstructionKind::SUQuatC ? Tau::C : Tau::R;
      if (desc.herm_d->tau != expect)
        throw std::invalid_argument("build_lattice: Hermitian form has the wrong involution");
      if (desc.kind == ConstructionKind::SUQuatR && desc.herm_d->dim() < 2)
        throw std::invalid_argument("build_lattice: tau_r forms of rank 1 give abelian groups");
      hd = hermitian_diag_over_D(*desc.herm_d);
      for (const QuaternionElement& h : hd->diagonal)
        if (h.is_zero()) throw std::invalid_argument("build_lattice: degenerate Hermitian form");
      cons << "SU(B; O_D, tau_" << (expect == Tau::C ? 'c' : 'r') << "), rank " << desc.herm_d->dim()
           << ", D = quaternion algebra over " << detail::field_blurb(F);
      break;
    }
    case ConstructionKind::SLField:
      if (desc.sl_n < 2) throw std::invalid_argument("build_lattice: SL(n, O_F) needs n >= 2");
      cons << "SL(" << desc.sl_n << ", O_F), F = " << detail::field_blurb(F);
      break;
    case ConstructionKind::SLQuat:
      if (!desc.alg) throw std::invalid_argument("build_lattice: SL over D needs the algebra");
      if (desc.sl_n < 1) throw std::invalid_argument("build_lattice: SL(n, O_D) needs n >= 1");
      cons << "SL(" << desc.sl_n << ", O_D), D = quaternion algebra over " << detail::field_blurb(F);
      break;
  }
  rep.construction = cons.str();

  for (std::size_t v = 0; v < places; ++v) {
    PlaceFactor pf;
    pf.place = v;
    pf.real = F->place_is_real(v);
    pf.label = labels_for(v);
    pf.compact = is_compact(pf.label);
    if (pf.compact) rep.compact_places.push_back(v);
    rep.factors.push_back(pf);
  }
  rep.ambient = detail::ambient_string(rep.factors);
  rep.irreducible = simple_group && places > 1;
  if (!simple_group)
    rep.notes += "the group is semisimple but not simple (type D2); irreducibility is not claimed. ";

  // --- cocompactness ----------------------------------------------------
  const std::size_t compact_count = rep.compact_places.size();
  if (compact_count == places) {
    rep.cocompact = CocompactVerdict::Yes;
    rep.cocompact_reason = "every archimedean factor is compact, so the quotient is a finite set";
    rep.qrank = 0;
    return rep;
  }
  if (compact_count > 0) {
    std::ostringstream os;
    os << "compact factor " << rep.factors[rep.compact_places.front()].label.str() << " at place "
       << rep.compact_places.front()
       << ": a lattice with a compact archimedean factor is cocompact";
    rep.cocompact = CocompactVerdict::Yes;
    rep.cocompact_reason = os.str();
    rep.qrank = 0;
    if (desc.kind == ConstructionKind::SOForm && F->degree() == 1) rep.qrank = static_cast<long>(qrank_so(*desc.form));
    return rep;
  }

  switch (desc.kind) {
    case ConstructionKind::SOForm: {
      const QuadraticForm& B = *desc.form;
      IsotropyCertificate iso = is_isotropic_over_field(B);
      if (iso.verdict == IsoVerdict::Anisotropic) {
        rep.cocompact = CocompactVerdict::Yes;
        std::ostringstream os;
        os << "the form is anisotropic over the base field";
        if (iso.obstruction)
          os << " (local obstruction at " << (*iso.obstruction == 0 ? std::string("the real place")
                                                                    : iso.obstruction->get_str())
             << ")";
        os << "; anisotropic forms give cocompact lattices";
        rep.cocompact_reason = os.str();
        rep.qrank = 0;
      } else if (iso.verdict == IsoVerdict::Isotropic) {
        if (detail::form_value(B, iso.witness) != FieldElement::zero(F))
          throw std::logic_error("build_lattice: isotropy witness failed re-verification");
        rep.cocompact = CocompactVerdict::No;
        rep.cocompact_reason =
            "isotropic vector found: the transvection it determines is a nontrivial unipotent "
            "element, and lattices with unipotents are not cocompact";
        rep.isotropic_witness = iso.witness;
        Mat<FieldElement> e = detail::isotropic_transvection(B, iso.witness);
        rep.unipotent_witness_field = e;
        rep.unipotent_witness = detail::rational_matrix(e);
      } else {
        rep.cocompact = CocompactVerdict::Inconclusive;
        rep.cocompact_reason = "isotropy of the form was not decided: " + iso.note;
      }
      if (F->degree() == 1) rep.qrank = static_cast<long>(qrank_so(B));
      break;
    }
    case ConstructionKind::SUQuadratic: {
      // F-rational vectors are sigma-fixed, so an isotropic vector of the
      // underlying F-quadratic form is already Hermitian-isotropic.
      QuadraticForm P = QuadraticForm::make(F, *desc.herm_gram);
      IsotropyCertificate iso = is_isotropic_over_field(P);
      if (iso.verdict == IsoVerdict::Isotropic) {
        if (detail::form_value(P, iso.witness) != FieldElement::zero(F))
          throw std::logic_error("build_lattice: isotropy witness failed re-verification");
        rep.cocompact = CocompactVerdict::No;
        rep.cocompact_reason =
            "the Hermitian form vanishes on an F-rational vector; the stabilizer of that "
            "isotropic line contains nontrivial unipotent elements";
        rep.isotropic_witness = iso.witness;
      } else {
        rep.cocompact = CocompactVerdict::Inconclusive;
        rep.cocompact_reason =
            "no F-rational isotropic vector was found, and full Hermitian isotropy testing "
            "over the quadratic extension is not implemented";
      }
      break;
    }
    case ConstructionKind::SUQuatC: {
      // B(x,x) = sum_i a_i Nrd(x_i) for the diagonalised form, a scalar
      // quadratic form in 4n field variables: decide its isotropy.
      const FieldElement& beta = desc.alg->beta;
      const FieldElement& gamma = desc.alg->gamma;
      std::vector<FieldElement> diag;
      for (const QuaternionElement& h : hd->diagonal) {
        const FieldElement& ai = h.a();
        diag.push_back(ai);
        diag.push_back(-(beta * ai));
        diag.push_back(-(gamma * ai));
        diag.push_back(beta * gamma * ai);
      }
      QuadraticForm norm_form = QuadraticForm::diagonal(F, diag);
      IsotropyCertificate iso = is_isotropic_over_field(norm_form);
      if (iso.verdict == IsoVerdict::Anisotropic) {
        rep.cocompact = CocompactVerdict::Yes;
        rep.cocompact_reason =
            "the norm form of the Hermitian lattice is anisotropic over the base field, so the "
            "form has no isotropic vectors and the lattice is cocompact";
        rep.qrank = 0;
      } else if (iso.verdict == IsoVerdict::Isotropic) {
        // Repackage the 4n coordinates as quaternions in the diagonal basis,
        // transport back through the basis change, and re-verify.
        const std::size_t n = hd->diagonal.size();
        std::vector<QuaternionElement> xd;
        for (std::size_t i = 0; i < n; ++i)
          xd.push_back(QuaternionElement::from_coords(
              desc.alg, {iso.witness[4 * i], iso.witness[4 * i + 1], iso.witness[4 * i + 2],
                         iso.witness[4 * i + 3]}));
        std::vector<QuaternionElement> x(n, QuaternionElement::zero(desc.alg));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) x[i] = x[i] + hd->basis_change.at(i, j) * xd[j];
        QuaternionElement val = QuaternionElement::zero(desc.alg);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            val = val + conjugate(x[i], Tau::C) * desc.herm_d->gram.at(i, j) * x[j];
        if (!val.is_zero())
          throw std::logic_error("build_lattice: Hermitian isotropy witness failed re-verification");
        rep.cocompact = CocompactVerdict::No;
        rep.cocompact_reason =
            "the Hermitian form has an isotropic vector over the quaternion algebra; its "
            "stabilizer contains nontrivial unipotent elements";
        std::vector<FieldElement> flat;
        for (const QuaternionElement& xi : x)
          for (const FieldElement& c : xi.coords()) flat.push_back(c);
        rep.isotropic_witness = flat;  // 4 coordinates per quaternion entry
        rep.notes += "isotropic witness is stored as 4 field coordinates per quaternion entry. ";
      } else {
        rep.cocompact = CocompactVerdict::Inconclusive;
        rep.cocompact_reason = "isotropy of the norm form was not decided: " + iso.note;
      }
      break;
    }
    case ConstructionKind::SUQuatR: {
      rep.cocompact = CocompactVerdict::Inconclusive;
      rep.cocompact_reason =
          "no compact factor was found, and isotropy testing for tau_r-Hermitian forms is not "
          "implemented";
      break;
    }
    case ConstructionKind::SLField: {
      rep.cocompact = CocompactVerdict::No;
      rep.cocompact_reason =
          "SL(n, O_F) contains the elementary unipotent I + E_12, and lattices with unipotents "
          "are not cocompact";
      rep.unipotent_witness = detail::elementary_unipotent(desc.sl_n);
      rep.qrank = static_cast<long>(desc.sl_n) - 1;
      if (F->degree() > 1)
        rep.notes += "qrank is the rank of the diagonal split torus, which is defined over Q. ";
      break;
    }
    case ConstructionKind::SLQuat: {
      if (desc.sl_n >= 2) {
        rep.cocompact = CocompactVerdict::No;
        rep.cocompact_reason =
            "SL(n, O_D) with n >= 2 contains I + E_12 (entry 1 in a maximal order), a "
            "nontrivial unipotent";
        rep.unipotent_witness = detail::elementary_unipotent(desc.sl_n);
        rep.notes += "the unipotent witness is written in the n x n matrix picture over D. ";
      } else {
        QuatDivisionCertificate cert = quat_division_certificate(desc.alg);
        if (cert.verdict == AlgVerdict::Division) {
          rep.cocompact = CocompactVerdict::Yes;
          std::ostringstream os;
          os << "D is a division algebra";
          if (cert.obstruction)
            os << " (local obstruction at "
               << (*cert.obstruction == 0 ? std::string("the real place") : cert.obstruction->get_str())
               << ")";
          os << ", so SL(1, O_D) has no nontrivial unipotent elements and is cocompact";
          rep.cocompact_reason = os.str();
          rep.qrank = 0;
        } else if (cert.verdict == AlgVerdict::Split) {
          rep.cocompact = CocompactVerdict::No;
          rep.cocompact_reason =
              "D splits: SL(1, D) is isogenous to SL(2) over the base field, which has unipotent "
              "elements";
        } else {
          rep.cocompact = CocompactVerdict::Inconclusive;
          rep.cocompact_reason = "division-or-split was not decided for D: " + cert.note;
        }
      }
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Irreducible lattices with prescribed SO(p,q) factors.

struct SORecipe {
  std::vector<std::pair<unsigned, unsigned>> targets;  // sorted, padded input
  unsigned t = 0;                                      // number of square roots adjoined
  std::vector<long> radicands;                         // 2, 3, 5, ...
  FieldPtr field;                                      // Q(alpha)
  FieldElement alpha;                                  // sum of the square roots
  std::vector<std::size_t> place_order;                // places sorted by sigma(alpha), descending
  std::vector<Rat> shifts;                             // a_1, ..., a_n
  QuadraticForm form;                                  // diag(alpha - a_1, ..., alpha - a_n)
  std::vector<std::pair<unsigned, unsigned>> verified;  // recomputed signatures, in place_order
  LatticeReport report;
};

namespace detail {

// Minimal polynomial of theta + sqrt(m) over Q, given the minimal
// polynomial f of theta: eliminate y from f(x - y) and y^2 - m.
inline QPoly adjoin_sqrt_minpoly(const QPoly& f, long m) {
  const std::size_t d = f.degree();
  std::vector<QPoly> shifted(d + 1);  // coefficients of y^j in f(x - y)
  for (std::size_t j = 0; j <= d; ++j) {
    std::vector<Rat> c(d - j + 1, Rat(0));
    // f(x - y) = sum_k f_k sum_j C(k,j) (-1)^j y^j x^{k-j}
    for (std::size_t k = j; k <= d; ++k) {
      Rat binom(1);
      for (std::size_t i = 0; i < j; ++i) binom = binom * Rat(Int(k - i)) / Rat(Int(i + 1));
      c[k - j] = c[k - j] + f.coeff(k) * binom * Rat(j % 2 ? -1 : 1);
    }
    shifted[j] = QPoly(c);
  }
  std::vector<QPoly> quad = {QPoly(Rat(-m)), QPoly(), QPoly(Rat(1))};  // y^2 - m
  QPoly res = resultant_eliminating(shifted, quad);
  // Normalise to a monic polynomial.
  Rat lead = res.coeff(res.degree());
  std::vector<Rat> c;
  for (std::size_t i = 0; i <= res.degree(); ++i) c.push_back(res.coeff(i) / lead);
  return QPoly(c);
}

// First t pairwise coprime square-free integers >= 2.
inline std::vector<long> coprime_squarefrees(unsigned t) {
  std::vector<long> out;
  for (long m = 2; out.size() < t; ++m) {
    FactorList fl = trial_factor(Int(m));
    bool ok = fl.complete;
    for (const auto& [p, e] : fl.factors)
      if (e > 1) ok = false;
    for (long prev : out)
      if (std::gcd(prev, m) != 1) ok = false;
    if (ok) out.push_back(m);
  }
  return out;
}

}  // namespace detail

// Builds a totally real field F = Q(sqrt(m_1), ..., sqrt(m_t)) and a
// diagonal form diag(alpha - a_l) over F whose archimedean signatures are
// exactly the requested (p_l, q_l) list.  Targets are sorted by descending
// p and padded with definite factors (0, n) up to a power of two; the
// report's place ordering is by descending sigma(alpha), matching the
// sorted targets.  Every claimed signature is recomputed exactly.
inline SORecipe irreducible_so_recipe(std::vector<std::pair<unsigned, unsigned>> targets) {
  if (targets.empty()) throw std::invalid_argument("irreducible_so_recipe: no targets");
  const unsigned n = targets.front().first + targets.front().second;
  if (n < 3) throw std::invalid_argument("irreducible_so_recipe: need forms of rank >= 3");
  for (const auto& [p, q] : targets)
    if (p + q != n)
      throw std::invalid_argument("irreducible_so_recipe: all targets must have the same rank");

  SORecipe rec;
  unsigned t = 0;
  while ((1u << t) < targets.size()) ++t;
  rec.t = t;
  while (targets.size() < (1u << t)) targets.emplace_back(0, n);
  std::sort(targets.begin(), targets.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  rec.targets = targets;
  const std::size_t P = targets.size();

  // The field and alpha.
  rec.radicands = detail::coprime_squarefrees(t);
  QPoly minpoly(std::vector<Rat>{Rat(0), Rat(1)});  // x, for t = 0
  if (t > 0) {
    minpoly = QPoly(std::vector<Rat>{Rat(-rec.radicands[0]), Rat(0), Rat(1)});
    for (unsigned i = 1; i < t; ++i) minpoly = detail::adjoin_sqrt_minpoly(minpoly, rec.radicands[i]);
  }
  rec.field = t == 0 ? NumberField::rationals() : make_field(minpoly);
  if (rec.field->place_count() != P || rec.field->real_place_count() != P)
    throw std::logic_error("irreducible_so_recipe: field is not totally real of the right degree");
  rec.alpha = FieldElement::generator(rec.field);

  // Places carry the ascending real roots of the minimal polynomial, and
  // alpha is the generator, so descending sigma(alpha) is just the reverse
  // ordering.  Refine the root enclosures until they are pairwise disjoint
  // and use them as rational bounds.
  for (std::size_t j = 0; j < P; ++j) rec.place_order.push_back(P - 1 - j);
  std::vector<RatInterval> enc(P);
  Rat width(1);
  for (bool disjoint = false; !disjoint;) {
    for (std::size_t j = 0; j < P; ++j) enc[j] = rec.field->real_place_interval(j, width);
    disjoint = true;
    for (std::size_t j = 0; j + 1 < P; ++j)
      if (!(enc[j].hi < enc[j + 1].lo)) disjoint = false;
    width = width / Rat(4);
  }

  // Bounds for a_l: strictly above every sigma(alpha) with target p < l,
  // strictly below every sigma(alpha) with target p >= l.
  for (unsigned l = 1; l <= n; ++l) {
    std::optional<Rat> lower, upper;
    for (std::size_t j = 0; j < P; ++j) {
      const RatInterval& box = enc[rec.place_order[j]];
      if (targets[j].first >= l) {
        if (!upper || box.lo < *upper) upper = box.lo;
      } else {
        if (!lower || box.hi > *lower) lower = box.hi;
      }
    }
    Rat a;
    if (t == 0) {
      // sigma(alpha) = 0 exactly; sit on whichever side is required.
      a = upper ? Rat(-1) : Rat(1);
    } else if (lower && upper) {
      if (!(*lower < *upper))
        throw std::logic_error("irreducible_so_recipe: infeasible bounds after refinement");
      // Smallest integer in absolute value inside the bounds, else the
      // simplest rational (smallest denominator, then numerator).
      Int lo_int = rat_ceil(*lower), hi_int = rat_floor(*upper);
      if (lo_int <= hi_int) {
        Int k = lo_int > 0 ? lo_int : (hi_int < 0 ? hi_int : Int(0));
        a = Rat(k);
      } else {
        a = simplest_rational_in(*lower, *upper);
      }
    } else if (lower) {
      a = sign_of(*lower) <= 0 ? Rat(0) : Rat(rat_ceil(*lower));
    } else {
      a = sign_of(*upper) >= 0 ? Rat(0) : Rat(rat_floor(*upper));
    }
    rec.shifts.push_back(a);
  }

  std::vector<FieldElement> diag;
  for (const Rat& a : rec.shifts) diag.push_back(rec.alpha - FieldElement(rec.field, a));
  rec.form = QuadraticForm::diagonal(rec.field, diag);

  for (std::size_t j = 0; j < P; ++j) {
    auto sig = signature_at(rec.form, rec.place_order[j]);
    rec.verified.push_back(sig);
    if (sig != targets[j])
      throw std::logic_error("irreducible_so_recipe: signature verification failed");
  }

  LatticeDescriptor desc;
  desc.kind = ConstructionKind::SOForm;
  desc.field = rec.field;
  desc.form = rec.form;
  rec.report = build_lattice(desc);
  return rec;
}

// ---------------------------------------------------------------------------
// Two concrete SL(3,R) families.

struct SL3FamilyReport {
  long r = 0;
  FieldPtr ext;                  // L = Q(sqrt(r))
  Mat<Rat> j3;                   // the antidiagonal form
  Mat<FieldElement> unipotent;   // u(2, 0, 0), entries in L (here rational)
  LatticeReport report;
};

// An explicit element of the unipotent subgroup of SU(J_3; O_L, sigma):
//   u(a,b,c) = [ 1  a+b sqrt(r)  -(a^2 - r b^2)/2 + c sqrt(r) ]
//              [ 0      1              -a + b sqrt(r)         ]
//              [ 0      0                    1                ]
// with a, b, c even integers.  The returned matrix is certified to satisfy
// sigma(u)^T J_3 u = J_3 exactly.
inline Mat<FieldElement> sl3_family_unipotent(const FieldPtr& L, long r, long a, long b, long c) {
  if (a % 2 || b % 2 || c % 2)
    throw std::invalid_argument("sl3_family_unipotent: a, b, c must be even");
  const FieldElement fz = FieldElement::zero(L), fo = FieldElement::one(L);
  const FieldElement sqrt_r = FieldElement::generator(L);
  Mat<FieldElement> u = Mat<FieldElement>::identity(3, fz, fo);
  u.at(0, 1) = FieldElement(L, Rat(a)) + FieldElement(L, Rat(b)) * sqrt_r;
  u.at(0, 2) = FieldElement(L, make_rat(Int(-(a * a - r * b * b)), Int(2))) +
               FieldElement(L, Rat(c)) * sqrt_r;
  u.at(1, 2) = FieldElement(L, Rat(-a)) + FieldElement(L, Rat(b)) * sqrt_r;

  // sigma negates the generator; apply entrywise to u^T and check the
  // unitarity identity against J_3.
  FieldElement neg_gen = -FieldElement::generator(L);
  Mat<FieldElement> ut = u.transpose();
  Mat<FieldElement> sut(3, 3, fz);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) sut.at(i, j) = ut.at(i, j).substitute_generator(neg_gen);
  Mat<FieldElement> J(3, 3, fz);
  J.at(0, 2) = fo;
  J.at(1, 1) = fo;
  J.at(2, 0) = fo;
  if (!(sut * J * u == J)) throw std::logic_error("sl3_family_unipotent: unitarity check failed");
  return u;
}

// The family SU(J_3; O_L, sigma) for L = Q(sqrt(r)): a noncocompact
// lattice in SL(3,R) with an explicit unipotent element and qrank 1.
inline SL3FamilyReport sl3_noncocompact_family(long r) {
  if (r < 2) throw std::invalid_argument("sl3_noncocompact_family: need r >= 2");
  FactorList fl = trial_factor(Int(r));
  if (!fl.complete) throw std::invalid_argument("sl3_noncocompact_family: r too large to certify square-free");
  for (const auto& [p, e] : fl.factors)
    if (e > 1) throw std::invalid_argument("sl3_noncocompact_family: r must be square-free");

  SL3FamilyReport fam;
  fam.r = r;
  fam.ext = make_field(QPoly(std::vector<Rat>{Rat(-r), Rat(0), Rat(1)}));

  FieldPtr Q = NumberField::rationals();
  Mat<FieldElement> J(3, 3, FieldElement::zero(Q));
  J.at(0, 2) = FieldElement::one(Q);
  J.at(1, 1) = FieldElement::one(Q);
  J.at(2, 0) = FieldElement::one(Q);

  LatticeDescriptor desc;
  desc.kind = ConstructionKind::SUQuadratic;
  desc.field = Q;
  desc.ext_beta = FieldElement(Q, Rat(r));
  desc.herm_gram = J;
  fam.report = build_lattice(desc);

  fam.j3 = Mat<Rat>(3, 3, Rat(0));
  fam.j3.at(0, 2) = Rat(1);
  fam.j3.at(1, 1) = Rat(1);
  fam.j3.at(2, 0) = Rat(1);

  fam.unipotent = sl3_family_unipotent(fam.ext, r, 2, 0, 0);
  std::optional<Mat<Rat>> ru = detail::rational_matrix(fam.unipotent);
  if (!ru) throw std::logic_error("sl3_noncocompact_family: u(2,0,0) should be rational");
  fam.report.unipotent_witness = *ru;
  fam.report.cocompact = CocompactVerdict::No;
  fam.report.cocompact_reason =
      "the lattice contains the explicit unipotent u(2,0,0) with characteristic polynomial "
      "(x-1)^3, so it is not cocompact";
  fam.report.qrank = 1;
  fam.report.notes +=
      "qrank 1: the form is nondegenerate of rank 3, so isotropic subspaces have dimension "
      "at most 1, and an isotropic line exists. ";
  return fam;
}

struct SL3CyclicReport {
  long q = 0;
  long p = 0;
  PrimeCriterionResult criterion;
  CyclicDivisionCertificate algebra;
  LatticeReport report;
};

// SL(1, A) for the degree-3 cyclic algebra A = (L_q / Q, sigma, p), where
// L_q is the real cubic subfield of the q-th cyclotomic field.  Division
// algebras give cocompact lattices in SL(3,R); split algebras do not.
inline SL3CyclicReport cocompact_sl3_cyclic(long q, long p) {
  SL3CyclicReport out;
  out.q = q;
  out.p = p;
  if (p < 2 || !is_prime_int(Int(p)))
    throw std::invalid_argument("cocompact_sl3_cyclic: p must be a prime");
  CyclicExtPtr ext = cyclotomic_real_subfield(q);
  out.criterion = prime_criterion(Int(p), Int(q));
  CyclicAlgPtr alg = CyclicAlgebra::make(ext, Rat(p));
  out.algebra = is_division_cyclic(alg);

  LatticeReport& rep = out.report;
  std::ostringstream cons;
  cons << "SL(1, A) for the cyclic algebra A = (L/Q, sigma, " << p
       << "), L the real cubic subfield of the cyclotomic field of conductor " << q;
  rep.construction = cons.str();
  PlaceFactor pf;
  pf.place = 0;
  pf.real = true;
  pf.label = GroupLabel::sl_r(3);
  pf.compact = false;
  rep.factors.push_back(pf);
  rep.ambient = "SL(3,R)";
  rep.irreducible = false;
  rep.notes += "degree-3 algebras always split at the real place, so the ambient group is SL(3,R). ";

  if (out.algebra.verdict == AlgVerdict::Division) {
    rep.cocompact = CocompactVerdict::Yes;
    std::ostringstream os;
    os << "A is a division algebra";
    if (out.criterion.passes)
      os << " (the order of " << p << " mod " << q << " is " << out.criterion.order << " = " << q - 1
         << ", so no power of " << p << " is a norm from L)";
    os << "; reduced-norm-one groups of division algebras have no unipotents and give cocompact "
          "lattices";
    rep.cocompact_reason = os.str();
    rep.qrank = 0;
  } else if (out.algebra.verdict == AlgVerdict::Split) {
    rep.cocompact = CocompactVerdict::No;
    rep.cocompact_reason =
        "A is split (a norm preimage of a power of the defining scalar was found), so SL(1, A) is "
        "isogenous to SL(3) over Q and contains unipotents";
    rep.qrank = 2;
    rep.notes += "split case: the lattice is commensurable with a conjugate of SL(3,Z). ";
  } else {
    rep.cocompact = CocompactVerdict::Inconclusive;
    rep.cocompact_reason = "division-or-split was not decided: " + out.algebra.note;
  }
  return out;
}

}  // namespace latticeforge

#pragma once

// Number fields Q(alpha) in the power basis, with their archimedean places
// isolated exactly.  A real place is an isolating interval for one real root
// of the minimal polynomial; a complex place is an isolating rectangle in the
// upper half-plane for one conjugate pair.  Everything downstream — signatures
// of forms, splitting of algebras, compactness certificates — reduces to sign
// decisions of field elements at real places, so those have to be total and
// exact.
//
// Q itself is the degree-1 field with minimal polynomial x; treating it as
// just another NumberField keeps every caller uniform.

#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latticeforge/intpoly.hpp"
#include "latticeforge/rational.hpp"

namespace latticeforge {

// Count of distinct real roots in the half-open interval (a, b].
inline int count_real_roots(const QPoly& f, const Rat& a, const Rat& b) {
  if (f.degree() <= 0) return 0;
  QPoly sf = squarefree_part(f);
  return sturm_count(sturm_chain(sf), a, b);
}

inline bool is_prime_int(const Int& p) {
  return mpz_probab_prime_p(p.get_mpz_t(), 40) != 0;
}

// Eisenstein's criterion at p.  true certifies irreducibility over Q; false
// says nothing.
inline bool eisenstein_test(const QPoly& poly, const Int& p) {
  if (!is_prime_int(p)) throw std::invalid_argument("eisenstein_test: p is not prime");
  if (poly.degree() < 1) throw std::invalid_argument("eisenstein_test: degree must be >= 1");
  auto [z, content] = primitive_parts(poly);
  (void)content;
  return eisenstein_applies(z, p);
}

// Rectangular complex interval evaluation of g at X + iY.
inline std::pair<RatInterval, RatInterval> complex_interval_eval(const QPoly& g,
                                                                 const RatInterval& X,
                                                                 const RatInterval& Y) {
  RatInterval re, im;
  const auto& c = g.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) {
    RatInterval nre = re * X - im * Y + c[i];
    RatInterval nim = re * Y + im * X;
    re = std::move(nre);
    im = std::move(nim);
  }
  return {re, im};
}

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

class NumberField {
 public:
  struct PlaceRef {
    bool real;
    std::size_t index;  // position in the full ordered place list
  };

  // min_poly must be monic with integer coefficients, degree >= 1.  Throws if
  // a factorization is found; fields whose irreducibility could not be
  // settled are returned with assumed_irreducible() == true.
  static FieldPtr make(const QPoly& min_poly) {
    auto f = std::shared_ptr<NumberField>(new NumberField(min_poly));
    return f;
  }

  static FieldPtr rationals() {
    static FieldPtr q = make(QPoly::x());
    return q;
  }

  const QPoly& min_poly() const { return min_poly_; }
  long degree() const { return min_poly_.degree(); }
  bool assumed_irreducible() const { return assumed_; }
  bool is_rationals() const { return degree() == 1; }

  std::size_t real_place_count() const { return real_roots_.size(); }
  std::size_t complex_place_count() const { return complex_places_.size(); }
  std::size_t place_count() const { return real_place_count() + complex_place_count(); }

  bool place_is_real(std::size_t index) const {
    if (index >= place_count()) throw std::invalid_argument("place index out of range");
    return index < real_place_count();
  }

  // Isolating interval for real place #index (global index), refined under
  // the lock until its width is below max_width (ignored if <= 0).
  RatInterval real_place_interval(std::size_t index, const Rat& max_width = Rat(0)) const {
    if (index >= real_place_count()) throw std::invalid_argument("not a real place");
    std::lock_guard<std::mutex> lk(mu_);
    RealRoot& r = real_roots_[index];
    if (sign_of(max_width) > 0) refine_below(min_poly_, r, max_width);
    return r.interval();
  }

  // Isolating rectangle (re-interval, im-interval) for complex place #index
  // (global index, so index >= real_place_count()).
  std::pair<RatInterval, RatInterval> complex_place_box(std::size_t index,
                                                        const Rat& max_width = Rat(0)) const {
    if (index < real_place_count() || index >= place_count())
      throw std::invalid_argument("not a complex place");
    std::lock_guard<std::mutex> lk(mu_);
    ComplexPlace& cp = complex_places_[index - real_place_count()];
    if (sign_of(max_width) > 0) {
      refine_below(ry_sf_, cp.x, max_width);
      refine_below(rx_sf_, cp.y, max_width);
    }
    return {cp.x.interval(), cp.y.interval()};
  }

  // One bisection step on a real place's interval (used by sign loops).
  RatInterval real_place_refine_step(std::size_t index) const {
    if (index >= real_place_count()) throw std::invalid_argument("not a real place");
    std::lock_guard<std::mutex> lk(mu_);
    refine_step(min_poly_, real_roots_[index]);
    return real_roots_[index].interval();
  }

 private:
  explicit NumberField(const QPoly& min_poly) : min_poly_(min_poly) {
    if (min_poly.degree() < 1) throw std::invalid_argument("make_field: degree must be >= 1");
    for (const Rat& c : min_poly.coeffs())
      if (den(c) != 1) throw std::invalid_argument("make_field: coefficients must be integers");
    if (min_poly.lead() != 1) throw std::invalid_argument("make_field: polynomial must be monic");
    switch (irreducibility_over_q(min_poly)) {
      case Irreducibility::Reducible:
        throw std::invalid_argument("make_field: polynomial is reducible over Q");
      case Irreducibility::Irreducible:
        assumed_ = false;
        break;
      case Irreducibility::Assumed:
        assumed_ = true;
        break;
    }
    isolate_places();
  }

  struct ComplexPlace {
    RealRoot x;  // isolates the real part, as a root of ry_sf_
    RealRoot y;  // isolates the imaginary part (> 0), as a root of rx_sf_
  };

  void isolate_places() {
    real_roots_ = isolate_real_roots(min_poly_);
    long n = degree();
    long s2 = n - static_cast<long>(real_roots_.size());
    if (s2 % 2 != 0) throw std::logic_error("place isolation: parity of nonreal roots broken");
    std::size_t s = static_cast<std::size_t>(s2 / 2);
    if (s == 0) return;

    // Split f(x + iy) = A(x, u) + i y B(x, u) with u = y^2, by a Horner pass:
    // multiplying (A, B) by (x + iy) sends it to (xA - uB, A + xB).
    std::vector<QPoly> A, B;  // coefficients by powers of u, entries in Q[x]
    const QPoly X = QPoly::x();
    auto trim_u = [](std::vector<QPoly>& v) {
      while (!v.empty() && v.back().is_zero()) v.pop_back();
    };
    A.push_back(QPoly(min_poly_.lead()));
    for (long k = n - 1; k >= 0; --k) {
      std::vector<QPoly> nA(std::max(A.size(), B.size() + 1));
      std::vector<QPoly> nB(std::max(A.size(), B.size()));
      for (std::size_t j = 0; j < nA.size(); ++j) {
        QPoly t = j < A.size() ? X * A[j] : QPoly();
        if (j >= 1 && j - 1 < B.size()) t = t - B[j - 1];
        nA[j] = std::move(t);
      }
      nA[0] = nA[0] + QPoly(min_poly_.coeff(static_cast<std::size_t>(k)));
      for (std::size_t j = 0; j < nB.size(); ++j) {
        QPoly t = j < B.size() ? X * B[j] : QPoly();
        if (j < A.size()) t = t + A[j];
        nB[j] = std::move(t);
      }
      A = std::move(nA);
      B = std::move(nB);
      trim_u(A);
      trim_u(B);
    }

    // Eliminate u to trap the real parts, and x to trap u = y^2.  Both
    // resultants are nonzero for squarefree input: any common factor would
    // pair a linear factor of f across conjugation, and B(x, 0) = f'(x)
    // keeps the u = 0 line out of the second one.
    QPoly ry = resultant_eliminating(A, B);
    std::size_t max_x = 0;
    for (const QPoly& q : A) max_x = std::max(max_x, static_cast<std::size_t>(q.degree() + 1));
    for (const QPoly& q : B) max_x = std::max(max_x, static_cast<std::size_t>(q.degree() + 1));
    auto transpose = [&](const std::vector<QPoly>& byu) {
      std::vector<std::vector<Rat>> grid(max_x);
      for (auto& row : grid) row.assign(byu.size(), Rat(0));
      for (std::size_t j = 0; j < byu.size(); ++j)
        for (std::size_t i = 0; i < static_cast<std::size_t>(byu[j].degree() + 1); ++i)
          grid[i][j] = byu[j].coeff(i);
      std::vector<QPoly> byx;
      byx.reserve(max_x);
      for (auto& row : grid) byx.push_back(QPoly(std::move(row)));
      return byx;
    };
    QPoly rim = resultant_eliminating(transpose(A), transpose(B));
    if (ry.is_zero() || rim.is_zero())
      throw std::logic_error("place isolation: resultant curve collapsed");
    // r_x(y) = rim(y^2)
    std::vector<Rat> rx_coeffs(2 * rim.coeffs().size() - 1, Rat(0));
    for (std::size_t i = 0; i < rim.coeffs().size(); ++i) rx_coeffs[2 * i] = rim.coeff(i);
    QPoly rx = QPoly(std::move(rx_coeffs));

    ry_sf_ = squarefree_part(ry).monic();
    rx_sf_ = squarefree_part(rx).monic();
    std::vector<RealRoot> xroots = isolate_real_roots(ry);
    std::vector<RealRoot> yroots_all = isolate_real_roots(rx);
    // Imaginary parts are positive by the half-plane convention; 0 is never a
    // root here because rim(0) = Res(f, f') != 0.
    std::vector<RealRoot> yroots;
    for (RealRoot& r : yroots_all) {
      while (!r.exact && r.interval().contains_zero()) refine_step(rx_sf_, r);
      if (sign_of(r.lo) > 0) yroots.push_back(r);
    }

    // Candidate boxes: (x-root) x (y-root).  Shrink everything until interval
    // evaluation of f has rejected all but the s boxes that hold a conjugate
    // pair.  Rejection is permanent: boxes only shrink.
    struct Cand {
      std::size_t i, j;
      bool alive = true;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < xroots.size(); ++i)
      for (std::size_t j = 0; j < yroots.size(); ++j) cands.push_back({i, j});
    std::size_t alive = cands.size();
    for (int round = 0; alive != s; ++round) {
      if (round > 300 || alive < s)
        throw std::logic_error("place isolation: exclusion did not converge");
      for (Cand& c : cands) {
        if (!c.alive) continue;
        auto [re, im] = complex_interval_eval(min_poly_, xroots[c.i].interval(),
                                              yroots[c.j].interval());
        if (re.sign() != 0 || im.sign() != 0) {
          c.alive = false;
          --alive;
        }
      }
      if (alive == s) break;
      for (RealRoot& r : xroots) refine_step(ry_sf_, r);
      for (RealRoot& r : yroots) refine_step(rx_sf_, r);
    }
    for (const Cand& c : cands)
      if (c.alive) complex_places_.push_back({xroots[c.i], yroots[c.j]});
    // cands were generated in lexicographic (i, j) order, which is exactly
    // "by real part, then by imaginary part".
  }

  QPoly min_poly_;
  bool assumed_ = false;
  mutable std::mutex mu_;
  mutable std::vector<RealRoot> real_roots_;
  mutable std::vector<ComplexPlace> complex_places_;
  QPoly ry_sf_, rx_sf_;
};

inline FieldPtr make_field(const QPoly& min_poly) { return NumberField::make(min_poly); }

inline bool same_field(const NumberField& a, const NumberField& b) {
  return &a == &b || a.min_poly() == b.min_poly();
}

// ---------------------------------------------------------------------------
// Elements.

class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr field, QPoly coords) : field_(std::move(field)) {
    coords_ = std::move(coords).divmod(field_->min_poly()).second;
  }
  FieldElement(FieldPtr field, const Rat& value)
      : FieldElement(std::move(field), QPoly(value)) {}

  static FieldElement zero(FieldPtr field) { return FieldElement(std::move(field), QPoly()); }
  static FieldElement one(FieldPtr field) { return FieldElement(std::move(field), QPoly(Rat(1))); }
  // alpha, the distinguished root of the minimal polynomial
  static FieldElement generator(FieldPtr field) {
    return FieldElement(std::move(field), QPoly::x());
  }

  const FieldPtr& field() const { return field_; }
  const QPoly& poly() const { return coords_; }
  bool is_zero() const { return coords_.is_zero(); }
  bool is_rational() const { return coords_.degree() <= 0; }
  Rat as_rational() const {
    if (!is_rational()) throw std::invalid_argument("element is not rational");
    return coords_.coeff(0);
  }

  std::vector<Rat> coords() const {
    std::vector<Rat> v(static_cast<std::size_t>(field_->degree()), Rat(0));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = coords_.coeff(i);
    return v;
  }

  bool operator==(const FieldElement& o) const {
    check_same(o);
    return coords_ == o.coords_;
  }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  FieldElement operator-() const { return with(-coords_); }
  FieldElement operator+(const FieldElement& o) const {
    check_same(o);
    return with(coords_ + o.coords_);
  }
  FieldElement operator-(const FieldElement& o) const {
    check_same(o);
    return with(coords_ - o.coords_);
  }
  FieldElement operator*(const FieldElement& o) const {
    check_same(o);
    return with(coords_ * o.coords_);
  }
  FieldElement operator*(const Rat& s) const { return with(coords_ * s); }
  FieldElement operator+(const Rat& s) const { return with(coords_ + QPoly(s)); }
  FieldElement operator-(const Rat& s) const { return with(coords_ - QPoly(s)); }

  // Extended Euclid against the minimal polynomial.  In an honestly
  // irreducible field this cannot fail for nonzero input; in an assumed one
  // it can, and the error says exactly that.
  FieldElement inverse() const {
    if (is_zero()) throw std::invalid_argument("field element: division by zero");
    QPoly old_r = coords_, r = field_->min_poly();
    QPoly old_s(Rat(1)), s;
    while (!r.is_zero()) {
      auto [q, rem] = old_r.divmod(r);
      old_r = std::exchange(r, rem);
      QPoly ns = old_s - q * s;
      old_s = std::exchange(s, std::move(ns));
    }
    if (old_r.degree() > 0)
      throw std::runtime_error(
          "field element is a zero divisor: the assumed-irreducible minimal polynomial "
          "has a nontrivial factor " +
          old_r.monic().coeffs_string());
    return with(old_s / old_r.coeff(0));
  }
  FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }

  // Product of the images under all embeddings; for monic f this is the
  // resultant Res(f, g).
  Rat norm() const { return resultant(field_->min_poly(), coords_); }

  Rat trace() const {
    long n = field_->degree();
    Rat t(0);
    QPoly b = coords_;
    for (long j = 0; j < n; ++j) {
      t += b.coeff(static_cast<std::size_t>(j));
      b = (b * QPoly::x()).divmod(field_->min_poly()).second;
    }
    return t;
  }

  // Certified enclosure of the image at a place.  Real places get (interval,
  // [0,0]); complex places a rectangle.  Both components have width <=
  // requested.
  std::pair<RatInterval, RatInterval> evaluate_at(std::size_t place, const Rat& width) const {
    if (sign_of(width) <= 0) throw std::invalid_argument("evaluate_at: width must be positive");
    if (is_zero()) return {RatInterval(Rat(0)), RatInterval(Rat(0))};
    Rat w = width;
    for (int round = 0; round < 100000; ++round) {
      if (field_->place_is_real(place)) {
        RatInterval box = field_->real_place_interval(place, w);
        RatInterval img = coords_.eval(box);
        if (img.width() <= width) return {img, RatInterval(Rat(0))};
      } else {
        auto [bx, by] = field_->complex_place_box(place, w);
        auto [re, im] = complex_interval_eval(coords_, bx, by);
        if (re.width() <= width && im.width() <= width) return {re, im};
      }
      w /= 2;
    }
    throw std::logic_error("evaluate_at: refinement failed to converge");
  }

  // Exact sign at a real place: -1, 0, +1.  Total even for assumed fields —
  // zero is decided by a gcd with the minimal polynomial, not by refinement.
  int sign_at(std::size_t place) const {
    if (!field_->place_is_real(place)) throw std::invalid_argument("sign_at: complex place");
    if (is_zero()) return 0;
    if (field_->degree() == 1) return sign_of(coords_.coeff(0));
    QPoly h = gcd_monic(coords_, field_->min_poly());
    if (h.degree() > 0) {
      // Possible only for assumed fields.  Does this place's root divide h?
      RatInterval box = field_->real_place_interval(place);
      if (sturm_count(sturm_chain(h), box.lo, box.hi) > 0) return 0;
    }
    for (int round = 0; round < 100000; ++round) {
      RatInterval box = field_->real_place_interval(place);
      if (box.is_point()) return sign_of(coords_.eval(box.lo));  // rational embedding
      int s = coords_.eval(box).sign();
      if (s != 0) return s;
      field_->real_place_refine_step(place);
    }
    throw std::logic_error("sign_at: refinement failed to converge");
  }

  // g(alpha) -> g(image), i.e. push the element through the map alpha |->
  // image.  When image is a Galois conjugate of alpha this is a field
  // automorphism.
  FieldElement substitute_generator(const FieldElement& image) const {
    check_same(image);
    FieldElement acc = zero(field_);
    for (std::size_t i = coords_.coeffs().size(); i-- > 0;)
      acc = acc * image + coords_.coeff(i);
    return acc;
  }

 private:
  FieldElement with(QPoly p) const { return FieldElement(field_, std::move(p)); }
  void check_same(const FieldElement& o) const {
    if (!field_ || !o.field_ || !same_field(*field_, *o.field_))
      throw std::invalid_argument("field elements from different fields");
  }

  FieldPtr field_;
  QPoly coords_;
};

inline FieldElement operator*(const Rat& s, const FieldElement& e) { return e * s; }

// ---------------------------------------------------------------------------
// Quadratic extensions L = F(sqrt(beta)), elements as a + b*sqrt(beta).

struct QuadraticExtension {
  FieldPtr base;
  FieldElement beta;
  // Whether beta was certified to be a non-square in F (rational beta is
  // decided exactly; otherwise a negative sign at some real place certifies).
  bool nonsquare_certified = false;

  static QuadraticExtension make(FieldPtr base_field, FieldElement b) {
    QuadraticExtension ext;
    ext.base = std::move(base_field);
    ext.beta = std::move(b);
    if (ext.beta.is_zero()) throw std::invalid_argument("quadratic extension: beta = 0");
    if (ext.beta.is_rational()) {
      if (rat_sqrt_exact(ext.beta.as_rational()))
        throw std::invalid_argument("quadratic extension: beta is a square");
      ext.nonsquare_certified = true;
    } else {
      for (std::size_t p = 0; p < ext.base->real_place_count(); ++p)
        if (ext.beta.sign_at(p) < 0) {
          ext.nonsquare_certified = true;
          break;
        }
    }
    return ext;
  }
};

struct QExtElem {
  FieldElement a, b;  // a + b * sqrt(beta)

  bool is_zero() const { return a.is_zero() && b.is_zero(); }
};

inline QExtElem qext_add(const QExtElem& x, const QExtElem& y) { return {x.a + y.a, x.b + y.b}; }
inline QExtElem qext_sub(const QExtElem& x, const QExtElem& y) { return {x.a - y.a, x.b - y.b}; }
inline QExtElem qext_neg(const QExtElem& x) { return {-x.a, -x.b}; }

inline QExtElem qext_mul(const QuadraticExtension& ext, const QExtElem& x, const QExtElem& y) {
  return {x.a * y.a + ext.beta * (x.b * y.b), x.a * y.b + x.b * y.a};
}

inline QExtElem qext_conj(const QExtElem& x) { return {x.a, -x.b}; }

// N_{L/F}(a + b sqrt(beta)) = a^2 - beta b^2.
inline FieldElement relative_norm(const QuadraticExtension& ext, const QExtElem& x) {
  return x.a * x.a - ext.beta * (x.b * x.b);
}

inline QExtElem qext_inverse(const QuadraticExtension& ext, const QExtElem& x) {
  if (x.is_zero()) throw std::invalid_argument("quadratic extension: division by zero");
  FieldElement n = relative_norm(ext, x);
  if (n.is_zero())
    throw std::runtime_error("quadratic extension: norm vanished; beta is a square in F");
  FieldElement ninv = n.inverse();
  return {x.a * ninv, (-x.b) * ninv};
}

// ---------------------------------------------------------------------------
// A field with a prescribed archimedean signature (r real, s complex places).
// Construction: pick g with the right root pattern, rescale so Eisenstein
// applies at p, and certify the real-root count by Sturm; bump p until the
// count survives the perturbation.

inline FieldPtr field_with_signature(unsigned r, unsigned s) {
  if (r + s == 0) throw std::invalid_argument("field_with_signature: need r + s >= 1");
  if (r == 1 && s == 0) return NumberField::rationals();
  if (r == 0 && s == 1)
    return make_field(QPoly(std::vector<Rat>{Rat(1), Rat(0), Rat(1)}));  // x^2 + 1
  unsigned n = r + 2 * s;

  QPoly g(Rat(1));
  Int a = 0;
  for (unsigned i = 0; i < r; ++i) {
    g = g * QPoly(std::vector<Rat>{Rat(-a), Rat(1)});
    a = sign_of(a) > 0 ? Int(-a) : Int(-a + 1);  // 0, 1, -1, 2, -2, ...
  }
  if (s > 0) {
    QPoly cyc = QPoly::monomial(2 * s) + QPoly(Rat(1));  // x^{2s} + 1
    g = g * cyc;
  }

  Int p = 5;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Rat k(p * p);
    QPoly f = scale_argument_down(g, k) - QPoly(Rat(p));
    if (!eisenstein_test(f, p))
      throw std::logic_error("field_with_signature: rescaled polynomial lost Eisenstein");
    FieldPtr field = make_field(f);
    if (field->real_place_count() == r && field->complex_place_count() == s) return field;
    mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
  }
  throw std::logic_error("field_with_signature: no prime in range produced the signature");
}

}  // namespace latticeforge

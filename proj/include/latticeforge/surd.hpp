#pragma once

// Exact arithmetic in real quadratic extensions: a Surd holds a + b*sqrt(m)
// with rational a, b and a nonnegative integer radicand, normalized so that
// m = 0 exactly when the value is rational (square parts of the radicand are
// folded into b by split_square). Every comparison is an exact sign decision,
// which is what lets fundamental-domain membership and circle-order tests be
// proofs instead of float guesses.
//
// Binary operations require compatible radicands — equal, or one operand
// rational. Mixing sqrt(2) with sqrt(3) throws; the one consumer that really
// has to compare values from two different quadratic fields (ordering the
// fixed points of two hyperbolic matrices around the projective circle) goes
// through biquad_sign below, which decides
//     sign(A + B*sqrt(m) + C*sqrt(k) + D*sqrt(m*k))
// by grouping into two single-radicand halves and comparing squares.

#include <stdexcept>
#include <string>
#include <utility>

#include "latticeforge/rational.hpp"

namespace latticeforge {

class Surd {
 public:
  Surd() : a_(0), b_(0), m_(0) {}
  Surd(const Rat& r) : a_(r), b_(0), m_(0) {}  // NOLINT: rationals embed implicitly
  Surd(long v) : a_(v), b_(0), m_(0) {}        // NOLINT
  Surd(int v) : a_(v), b_(0), m_(0) {}         // NOLINT

  Surd(Rat a, Rat b, Int m) : a_(std::move(a)), b_(std::move(b)), m_(std::move(m)) {
    if (sign_of(m_) < 0) throw std::invalid_argument("Surd: negative radicand (real values only)");
    if (sign_of(b_) == 0) {
      m_ = 0;
      return;
    }
    if (sign_of(m_) == 0) {
      b_ = 0;
      return;
    }
    Int sq, sf;
    split_square(m_, sq, sf);
    if (sf == 1) {  // perfect square: the value is rational after all
      a_ += b_ * Rat(sq);
      b_ = 0;
      m_ = 0;
    } else {
      b_ *= Rat(sq);
      m_ = sf;
    }
  }

  static Surd sqrt_int(const Int& m) { return Surd(Rat(0), Rat(1), m); }

  const Rat& a() const { return a_; }
  const Rat& b() const { return b_; }
  const Int& m() const { return m_; }

  bool is_rational() const { return sign_of(m_) == 0; }
  const Rat& rational_value() const {
    if (!is_rational()) throw std::logic_error("Surd: irrational value where a rational was required");
    return a_;
  }

  bool is_zero() const { return sign_of(a_) == 0 && sign_of(b_) == 0; }

  int sign() const {
    int sa = sign_of(a_), sb = sign_of(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: the larger magnitude wins; compare a^2 against b^2 m.
    int cmp2 = sign_of(Rat(a_ * a_ - b_ * b_ * Rat(m_)));
    if (cmp2 == 0) return 0;  // cannot happen for squarefree m > 1
    return cmp2 > 0 ? sa : sb;
  }

  Surd operator-() const { return raw(-a_, -b_, m_); }

  Surd operator+(const Surd& o) const {
    Int m = joint(*this, o);
    return raw(a_ + o.a_, b_ + o.b_, m);
  }
  Surd operator-(const Surd& o) const { return *this + (-o); }

  Surd operator*(const Surd& o) const {
    Int m = joint(*this, o);
    return raw(a_ * o.a_ + b_ * o.b_ * Rat(m), a_ * o.b_ + b_ * o.a_, m);
  }

  Surd conj() const { return raw(a_, -b_, m_); }

  // a^2 - b^2 m: the field norm to Q, zero exactly when the value is zero.
  Rat norm() const { return a_ * a_ - b_ * b_ * Rat(m_); }

  Surd inverse() const {
    Rat n = norm();
    if (sign_of(n) == 0) {
      if (is_zero()) throw std::domain_error("Surd: division by zero");
      throw std::logic_error("Surd: zero norm with nonzero parts (non-squarefree radicand?)");
    }
    return raw(a_ / n, -b_ / n, m_);
  }

  Surd operator/(const Surd& o) const { return *this * o.inverse(); }

  bool operator==(const Surd& o) const { return (*this - o).is_zero(); }
  bool operator!=(const Surd& o) const { return !(*this == o); }
  bool operator<(const Surd& o) const { return (*this - o).sign() < 0; }
  bool operator<=(const Surd& o) const { return (*this - o).sign() <= 0; }
  bool operator>(const Surd& o) const { return (*this - o).sign() > 0; }
  bool operator>=(const Surd& o) const { return (*this - o).sign() >= 0; }

  Int floor() const {
    if (is_rational()) return rat_floor(a_);
    for (unsigned bits = 16; bits <= 4096; bits *= 2) {
      RatInterval e = enclosure(bits);
      Int lo = rat_floor(e.lo), hi = rat_floor(e.hi);
      if (lo == hi) return lo;
    }
    throw std::logic_error("Surd::floor: enclosure refused to converge");
  }
  Int ceil() const { return -((-*this).floor()); }

  RatInterval enclosure(unsigned bits) const {
    if (is_rational()) return RatInterval(a_, a_);
    RatInterval root = sqrt_enclosure(Rat(m_), bits);
    RatInterval scaled = root * b_;
    return RatInterval(scaled.lo + a_, scaled.hi + a_);
  }

  std::string str() const {
    if (is_rational()) return rat_to_string(a_);
    std::string root = "sqrt(" + m_.get_str() + ")";
    std::string bs;
    if (b_ == 1)
      bs = root;
    else if (b_ == -1)
      bs = "-" + root;
    else
      bs = rat_to_string(b_) + "*" + root;
    if (sign_of(a_) == 0) return bs;
    return rat_to_string(a_) + (bs[0] == '-' ? "" : "+") + bs;
  }

 private:
  Rat a_, b_;
  Int m_;

  // Trusted components: m already normalized; only the b == 0 collapse needed.
  static Surd raw(Rat a, Rat b, Int m) {
    Surd s;
    bool rational = sign_of(b) == 0;
    s.a_ = std::move(a);
    s.b_ = std::move(b);
    s.m_ = rational ? Int(0) : std::move(m);
    return s;
  }

  static Int joint(const Surd& x, const Surd& y) {
    if (sign_of(x.m_) == 0) return y.m_;
    if (sign_of(y.m_) == 0 || y.m_ == x.m_) return x.m_;
    throw std::invalid_argument("Surd: incompatible radicands sqrt(" + x.m_.get_str() +
                                ") vs sqrt(" + y.m_.get_str() + ")");
  }
};

// sqrt of a nonnegative rational as a Surd: sqrt(p/q) = sqrt(p q)/q.
inline Surd surd_sqrt(const Rat& r) {
  if (sign_of(r) < 0) throw std::invalid_argument("surd_sqrt: negative input");
  if (sign_of(r) == 0) return Surd();
  return Surd(Rat(0), make_rat(Int(1), den(r)), num(r) * den(r));
}

// sign(A + B*sqrt(m) + C*sqrt(k) + D*sqrt(m*k)) with m, k >= 0 normalized
// radicands (0 meaning the corresponding radical is absent). Write the value
// as P + sqrt(k)*Q with P = A + B*sqrt(m) and Q = C + D*sqrt(m), both in
// Q(sqrt(m)); when P and Q disagree in sign the larger magnitude is found by
// comparing P^2 with k*Q^2, again inside Q(sqrt(m)).
inline int biquad_sign(const Rat& A, const Rat& B, const Int& m, const Rat& C, const Rat& D,
                       const Int& k) {
  if (sign_of(k) == 0) return Surd(A, B, m).sign();
  if (sign_of(m) == 0) return Surd(A, C, k).sign();
  if (m == k) return Surd(A + D * Rat(m), B + C, m).sign();
  Surd P(A, B, m), Q(C, D, m);
  int sq = Q.sign();
  if (sq == 0) return P.sign();
  int sp = P.sign();
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  int st = (P * P - Surd(Rat(k)) * Q * Q).sign();
  if (st == 0) return 0;
  return st > 0 ? sp : sq;
}

// ---------------------------------------------------------------------------
// The compositum Q(sqrt(m), sqrt(k)): values a + b*sqrt(m) + c*sqrt(k) +
// d*sqrt(m k) over one fixed radicand pair (k = 0 collapses to a single
// field, both 0 to the rationals). Reduced words in two quadratic-surd
// matrices multiply out inside this ring, which is why it exists: a product
// of a Q(sqrt 5)-matrix and a Q(sqrt 2)-matrix has entries nowhere smaller.
// For distinct squarefree radicands {1, sqrt m, sqrt k, sqrt(mk)} are
// linearly independent over Q, so zero testing is componentwise and sign
// testing is biquad_sign.

struct Biquad {
  Rat a, b, c, d;
  Int m, k;

  Biquad() : a(0), b(0), c(0), d(0), m(0), k(0) {}
  Biquad(Rat a_, Rat b_, Rat c_, Rat d_, Int m_, Int k_)
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)),
        m(std::move(m_)), k(std::move(k_)) {}

  // Embeds a single-field value into the pair (m, k). The surd's radicand
  // must be 0, m, or k.
  static Biquad lift(const Surd& s, const Int& m, const Int& k) {
    if (s.is_rational()) return Biquad(s.a(), Rat(0), Rat(0), Rat(0), m, k);
    if (s.m() == m) return Biquad(s.a(), s.b(), Rat(0), Rat(0), m, k);
    if (s.m() == k) return Biquad(s.a(), Rat(0), s.b(), Rat(0), m, k);
    throw std::invalid_argument("Biquad::lift: radicand sqrt(" + s.m().get_str() +
                                ") fits neither slot");
  }

  bool is_zero() const {
    return sign_of(a) == 0 && sign_of(b) == 0 && sign_of(c) == 0 && sign_of(d) == 0;
  }
  int sign() const { return biquad_sign(a, b, m, c, d, k); }

  Biquad operator-() const { return Biquad(-a, -b, -c, -d, m, k); }
  Biquad operator+(const Biquad& o) const {
    check_pair(o);
    return Biquad(a + o.a, b + o.b, c + o.c, d + o.d, m, k);
  }
  Biquad operator-(const Biquad& o) const { return *this + (-o); }

  Biquad operator*(const Biquad& o) const {
    check_pair(o);
    Rat M(m), K(k);
    return Biquad(a * o.a + b * o.b * M + c * o.c * K + d * o.d * M * K,
                  a * o.b + b * o.a + (c * o.d + d * o.c) * K,
                  a * o.c + c * o.a + (b * o.d + d * o.b) * M,
                  a * o.d + d * o.a + b * o.c + c * o.b, m, k);
  }

  bool operator==(const Biquad& o) const { return (*this - o).is_zero(); }
  bool operator!=(const Biquad& o) const { return !(*this == o); }

  std::string str() const {
    std::string out = rat_to_string(a);
    auto app = [&out](const Rat& coef, const std::string& root) {
      if (sign_of(coef) == 0) return;
      std::string cs = rat_to_string(coef);
      out += (cs[0] == '-' ? "" : "+") + cs + "*" + root;
    };
    app(b, "sqrt(" + m.get_str() + ")");
    app(c, "sqrt(" + k.get_str() + ")");
    app(d, "sqrt(" + Int(m * k).get_str() + ")");
    return out;
  }

 private:
  void check_pair(const Biquad& o) const {
    if (m != o.m || k != o.k)
      throw std::invalid_argument("Biquad: mixed radicand pairs");
  }
};

}  // namespace latticeforge

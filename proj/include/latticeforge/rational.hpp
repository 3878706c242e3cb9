#pragma once

// Exact scalar layer. Everything downstream computes over these types;
// no floating point ever participates in a verdict.
//
// Int / Rat are GMP's canonicalizing classes: a Rat is always reduced with
// positive denominator, which is exactly the representation contract the
// rest of the library assumes.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace latticeforge {

using Int = mpz_class;
using Rat = mpq_class;

inline int sign_of(const Int& x) { return mpz_sgn(x.get_mpz_t()); }
inline int sign_of(const Rat& x) { return mpq_sgn(x.get_mpq_t()); }

inline Int int_abs(const Int& x) { return sign_of(x) < 0 ? Int(-x) : x; }
inline Rat rat_abs(const Rat& x) { return sign_of(x) < 0 ? Rat(-x) : x; }

inline Int num(const Rat& q) { return q.get_num(); }
inline Int den(const Rat& q) { return q.get_den(); }

// floor(p/q) for a rational, exact.
inline Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// Nearest integer with round-half-up: floor(q + 1/2). This is the "T-power"
// recentring step of the modular reduction loop, so it must be exact.
inline Int rat_round_half_up(const Rat& q) { return rat_floor(q + Rat(1, 2)); }

// mpq_class's two-argument constructor does not reduce; this does.
inline Rat make_rat(const Int& n, const Int& d) {
  Rat q(n, d);
  q.canonicalize();
  return q;
}

inline Int int_gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int int_pow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rat rat_pow(const Rat& base, unsigned long e) {
  Rat r = 1;
  Rat b = base;
  unsigned long k = e;
  while (k) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

// floor(sqrt(n)) for n >= 0.
inline Int isqrt_floor(const Int& n) {
  if (sign_of(n) < 0) throw std::invalid_argument("isqrt_floor: negative input");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline bool is_perfect_square(const Int& n, Int* root = nullptr) {
  if (sign_of(n) < 0) return false;
  if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
  if (root) *root = isqrt_floor(n);
  return true;
}

// Exact square root of a rational if it is the square of a rational.
inline std::optional<Rat> rat_sqrt_exact(const Rat& q) {
  if (sign_of(q) < 0) return std::nullopt;
  Int rn, rd;
  if (!is_perfect_square(num(q), &rn)) return std::nullopt;
  if (!is_perfect_square(den(q), &rd)) return std::nullopt;
  return Rat(rn, rd);
}

// Strip the largest square divisor: n = square * squarefree. Small-trial
// factoring is enough for every input this library generates itself; callers
// with cryptographic-size integers get a partial split, which is still sound
// (the "squarefree" part may retain a large square we failed to see — the
// uses below only need soundness of the equation n = s^2 * m).
inline void split_square(const Int& n_in, Int& square_root_part, Int& squarefree_part,
                         unsigned long trial_bound = 100000) {
  Int n = n_in;
  square_root_part = 1;
  squarefree_part = 1;
  if (sign_of(n) == 0) {
    squarefree_part = 0;
    return;
  }
  if (sign_of(n) < 0) {
    squarefree_part = -1;
    n = -n;
  }
  for (unsigned long p = 2; p * p <= n && p <= trial_bound; p += (p == 2 ? 1 : 2)) {
    if (!mpz_divisible_ui_p(n.get_mpz_t(), p)) continue;
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    if (e / 2) square_root_part *= int_pow(Int(p), e / 2);
    if (e % 2) squarefree_part *= p;
  }
  // Leftover cofactor: perfect square, or treated as squarefree.
  Int r;
  if (is_perfect_square(n, &r))
    square_root_part *= r;
  else
    squarefree_part *= n;
}

// ---------------------------------------------------------------------------
// Closed rational intervals [lo, hi]. The workhorse of certified evaluation:
// sign decisions are made only when the interval excludes zero.

struct RatInterval {
  Rat lo, hi;

  RatInterval() : lo(0), hi(0) {}
  RatInterval(Rat point) : lo(point), hi(std::move(point)) {}
  RatInterval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::logic_error("RatInterval: lo > hi");
  }

  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
  bool is_point() const { return lo == hi; }
  bool contains_zero() const { return sign_of(lo) <= 0 && sign_of(hi) >= 0; }
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }

  // -1, +1 when certain; 0 when the interval straddles zero.
  int sign() const {
    if (sign_of(lo) > 0) return 1;
    if (sign_of(hi) < 0) return -1;
    return 0;
  }

  RatInterval operator-() const { return RatInterval(-hi, -lo); }
  RatInterval operator+(const RatInterval& o) const { return RatInterval(lo + o.lo, hi + o.hi); }
  RatInterval operator-(const RatInterval& o) const { return RatInterval(lo - o.hi, hi - o.lo); }

  RatInterval operator*(const RatInterval& o) const {
    Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    Rat mn = a, mx = a;
    for (const Rat* v : {&b, &c, &d}) {
      if (*v < mn) mn = *v;
      if (*v > mx) mx = *v;
    }
    return RatInterval(mn, mx);
  }

  RatInterval operator+(const Rat& c) const { return RatInterval(lo + c, hi + c); }
  RatInterval operator*(const Rat& c) const {
    return sign_of(c) >= 0 ? RatInterval(lo * c, hi * c) : RatInterval(hi * c, lo * c);
  }
};

// Certified enclosure of sqrt(x) for x >= 0 with width <= 2^-bits (roughly;
// the bound is honored by construction: s <= sqrt(x * 4^bits) < s+1).
inline RatInterval sqrt_enclosure(const Rat& x, unsigned bits) {
  if (sign_of(x) < 0) throw std::invalid_argument("sqrt_enclosure: negative input");
  if (sign_of(x) == 0) return RatInterval(Rat(0), Rat(0));
  // sqrt(p/q) = sqrt(p*q)/q; scale by 4^bits so the integer sqrt carries
  // the requested precision.
  Int scaled = num(x) * den(x);
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * bits);
  Int s = isqrt_floor(scaled);
  Int denom = den(x);
  mpz_mul_2exp(denom.get_mpz_t(), denom.get_mpz_t(), bits);
  return RatInterval(make_rat(s, denom), make_rat(s + 1, denom));
}

// ---------------------------------------------------------------------------
// Parsing / printing. Wire format is "p/q" (or "p" for integers), reduced.

inline std::string rat_to_string(const Rat& q) {
  if (den(q) == 1) return num(q).get_str();
  return num(q).get_str() + "/" + den(q).get_str();
}

inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rat: empty string");
  Rat q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("parse_rat: bad rational '" + s + "'");
  // mpq_canonicalize is undefined on a zero denominator, so reject first
  if (sign_of(den(q)) == 0) throw std::invalid_argument("parse_rat: zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------------------
// Simplest rational in a closed interval (smallest denominator; among those,
// smallest numerator in absolute value). Textbook Stern–Brocot descent.

inline Rat simplest_rational_in(const Rat& lo, const Rat& hi) {
  if (lo > hi) throw std::invalid_argument("simplest_rational_in: empty interval");
  if (sign_of(lo) <= 0 && sign_of(hi) >= 0) return Rat(0);
  if (sign_of(hi) < 0) return -simplest_rational_in(-hi, -lo);
  // Now 0 < lo <= hi.
  Int a = rat_ceil(lo);
  if (Rat(a) <= hi) return Rat(a);
  Int fl = rat_floor(lo);
  // Recurse on the fractional parts: x = fl + 1/(y), y in [1/(hi-fl), 1/(lo-fl)].
  Rat inner = simplest_rational_in(Rat(1) / (hi - Rat(fl)), Rat(1) / (lo - Rat(fl)));
  return Rat(fl) + Rat(1) / inner;
}

// Smallest-absolute-value integer strictly inside (lo, hi), if any;
// ties broken toward the positive one. Used by the signature recipe to
// reproduce human-looking constants.
inline std::optional<Int> smallest_integer_strictly_inside(const Rat& lo, const Rat& hi) {
  Int first = rat_floor(lo) + 1;           // least integer > lo
  Int last = rat_ceil(hi) - 1;             // greatest integer < hi
  if (Rat(first) <= lo) first += 1;        // guard exact endpoints
  if (Rat(last) >= hi) last -= 1;
  if (first > last) return std::nullopt;
  if (sign_of(first) >= 0) return first;
  if (sign_of(last) <= 0) return last;
  // Interval straddles zero: zero is inside.
  return Int(0);
}

// Checked narrowing for fast int64 kernels.
inline std::optional<long> to_long(const Int& x) {
  if (!x.fits_slong_p()) return std::nullopt;
  return x.get_si();
}

}  // namespace latticeforge

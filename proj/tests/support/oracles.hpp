#pragma once

// Independent oracles for the test suites.  Everything in this header is
// computed from first principles on top of the scalar layer only, so that
// agreement with the library is evidence rather than tautology: a different
// formula, a different search, or a closed form from elsewhere.

#include <array>
#include <optional>

#include "latticeforge/rational.hpp"

namespace lf_oracles {

using latticeforge::Int;
using latticeforge::Rat;
using latticeforge::RatInterval;
using latticeforge::den;
using latticeforge::make_rat;
using latticeforge::num;

// Enclosure of pi via Machin's identity pi = 16 atan(1/5) - 4 atan(1/239).
// The arctangent series at 1/x alternates with decreasing terms, so the
// partial sum is within one further term of the limit.
inline RatInterval machin_pi(unsigned terms = 12) {
  auto atan_inv = [&](long x) {
    Rat sum(0);
    Rat xx = make_rat(Int(1), Int(x) * x);
    Rat power = make_rat(Int(1), Int(x));
    for (unsigned k = 0; k < terms; ++k) {
      Rat term = power / Rat(2 * static_cast<long>(k) + 1);
      sum += (k % 2 == 0) ? term : -term;
      power *= xx;
    }
    Rat tail = power / Rat(2 * static_cast<long>(terms) + 1);
    return RatInterval(sum - tail, sum + tail);
  };
  RatInterval a = atan_inv(5), b = atan_inv(239);
  return RatInterval(Rat(16) * a.lo - Rat(4) * b.hi, Rat(16) * a.hi - Rat(4) * b.lo);
}

// Legendre symbol by exhaustive square search mod an odd prime.
inline int legendre_oracle(const Int& a_in, const Int& p) {
  Int a = a_in % p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  for (Int x = 1; x < p; ++x)
    if ((x * x - a) % p == 0) return 1;
  return -1;
}

// p-adic valuation of a nonzero rational, and the p-unit residue of its
// unit part modulo m (m a power of p).
inline long vp_of(const Rat& q, const Int& p, Int& unit_mod_m, const Int& m) {
  Int n = num(q), d = den(q);
  long v = 0;
  while (n % p == 0) { n /= p; ++v; }
  while (d % p == 0) { d /= p; --v; }
  Int dinv;
  if (mpz_invert(dinv.get_mpz_t(), Int(d % m).get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::logic_error("vp_of: denominator not a unit");
  unit_mod_m = (n % m) * dinv % m;
  if (unit_mod_m < 0) unit_mod_m += m;
  return v;
}

// Hilbert symbol (a,b)_v by the classical local formulas, coded separately
// from the library.  v = 0 means the real place.
inline int hilbert_oracle(const Rat& a, const Rat& b, const Int& v) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert_oracle: zero argument");
  if (v == 0) return (a < 0 && b < 0) ? -1 : 1;
  if (v == 2) {
    Int u, w;
    long alpha = vp_of(a, Int(2), u, Int(8));
    long beta = vp_of(b, Int(2), w, Int(8));
    auto eps = [](const Int& x) { return ((x - 1) / 2) % 2 != 0; };   // x odd mod 4
    auto omega = [](const Int& x) { return ((x * x - 1) / 8) % 2 != 0; };  // x odd mod 8
    bool minus = (eps(u) && eps(w)) ^ ((alpha % 2 != 0) && omega(w)) ^
                 ((beta % 2 != 0) && omega(u));
    return minus ? -1 : 1;
  }
  Int u, w;
  long alpha = vp_of(a, v, u, v);
  long beta = vp_of(b, v, w, v);
  int s = 1;
  if (alpha % 2 != 0 && beta % 2 != 0 && ((v - 1) / 2) % 2 != 0) s = -s;
  if (beta % 2 != 0) s *= legendre_oracle(u, v);
  if (alpha % 2 != 0) s *= legendre_oracle(w, v);
  return s;
}

// |SL(2, Z/n)| = n^3 prod_{p | n} (1 - p^-2), exact.
inline unsigned long long sl2_order_oracle(long n) {
  Int total = Int(n) * n * n;
  long m = n;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    total = total / (Int(p) * p) * (Int(p) * p - 1);
  }
  if (m > 1) total = total / (Int(m) * m) * (Int(m) * m - 1);
  return static_cast<unsigned long long>(total.get_ui());
}

// Exhaustive search for a nontrivial zero of a x^2 + b y^2 + c z^2 with
// 0 <= x, y, z <= height.  Signs are immaterial for a diagonal form, so this
// decides solvability over the full box [-height, height]^3.
inline std::optional<std::array<long, 3>> search_isotropic3(long a, long b, long c,
                                                            long height) {
  for (long x = 0; x <= height; ++x)
    for (long y = 0; y <= height; ++y) {
      long s = a * x * x + b * y * y;
      if (c == 0) {
        if (s == 0 && (x != 0 || y != 0)) return std::array<long, 3>{x, y, 0};
        continue;
      }
      if (s % c != 0) continue;
      long t = -s / c;
      if (t < 0) continue;
      long z = static_cast<long>(latticeforge::isqrt_floor(Int(t)).get_si());
      if (z * z == t && z <= height && (x != 0 || y != 0 || z != 0))
        return std::array<long, 3>{x, y, z};
    }
  return std::nullopt;
}

}  // namespace lf_oracles

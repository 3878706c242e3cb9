#pragma once

// The modular group. Everything here is exact: points of the upper half-plane
// carry rational or quadratic-surd coordinates (with a certified-interval
// fallback for inputs that are neither), so membership in the fundamental
// domain
//     F = { z : |z| >= 1, -1/2 <= Re z <= 1/2 }
// is decided, never guessed. The hyperbolic metric is normalized so that the
// area element is dx dy / (4 y^2); under that normalization F has area pi/12,
// which the quadrature here encloses with a rigorous rational error bound.
//
// The congruence-subgroup half of the module (membership, |SL(2,Z/n)|,
// torsion analysis) backs the classical facts that the level-n principal
// congruence subgroup is torsion free for n >= 3 while level 2 keeps -Id.
// mahler_min realizes the compactness-side inequality: an integral
// anisotropic form takes no values in (-1, 1) except at 0, and an exhaustive
// short-vector search reports the attained minimum with its argmin.

#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latticeforge/matrix.hpp"
#include "latticeforge/quadform.hpp"
#include "latticeforge/rational.hpp"
#include "latticeforge/surd.hpp"
#include "latticeforge/threads.hpp"

namespace latticeforge {

// ---------------------------------------------------------------------------
// 2x2 integer matrices of determinant one.

struct ModularMatrix {
  Int a{1}, b{0}, c{0}, d{1};

  static ModularMatrix make(Int a, Int b, Int c, Int d) {
    if (a * d - b * c != 1)
      throw std::invalid_argument("ModularMatrix: determinant must be 1");
    return ModularMatrix{std::move(a), std::move(b), std::move(c), std::move(d)};
  }
  static ModularMatrix identity() { return ModularMatrix{}; }
  static ModularMatrix T() { return ModularMatrix{1, 1, 0, 1}; }
  static ModularMatrix S() { return ModularMatrix{0, -1, 1, 0}; }
  static ModularMatrix T_pow(const Int& k) { return ModularMatrix{1, k, 0, 1}; }

  ModularMatrix operator*(const ModularMatrix& o) const {
    return ModularMatrix{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
                         c * o.b + d * o.d};
  }
  ModularMatrix inverse() const { return ModularMatrix{d, -b, -c, a}; }

  ModularMatrix pow(long e) const {
    ModularMatrix base = e < 0 ? inverse() : *this;
    unsigned long n = e < 0 ? static_cast<unsigned long>(-(e + 1)) + 1UL
                            : static_cast<unsigned long>(e);
    ModularMatrix acc = identity();
    while (n) {
      if (n & 1UL) acc = acc * base;
      base = base * base;
      n >>= 1;
    }
    return acc;
  }

  Int trace() const { return a + d; }
  bool operator==(const ModularMatrix& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  bool operator!=(const ModularMatrix& o) const { return !(*this == o); }

  std::string str() const {
    return "[[" + a.get_str() + "," + b.get_str() + "],[" + c.get_str() + "," + d.get_str() +
           "]]";
  }
};

// ---------------------------------------------------------------------------
// Points of the upper half-plane.

struct UpperHalfPoint {
  bool exact = true;
  Surd re, im;                  // valid when exact
  RatInterval re_box, im_box;   // fallback enclosure otherwise

  static UpperHalfPoint make(Surd real_part, Surd imag_part) {
    (void)(real_part + imag_part);  // compatibility probe: throws on mixed radicands
    if (imag_part.sign() <= 0)
      throw std::invalid_argument("UpperHalfPoint: imaginary part must be positive");
    UpperHalfPoint p;
    p.exact = true;
    p.re = std::move(real_part);
    p.im = std::move(imag_part);
    return p;
  }
  static UpperHalfPoint rational(const Rat& x, const Rat& y) { return make(Surd(x), Surd(y)); }

  static UpperHalfPoint boxed(RatInterval x, RatInterval y) {
    if (y.sign() <= 0)
      throw std::invalid_argument("UpperHalfPoint: interval point must have Im certainly > 0");
    UpperHalfPoint p;
    p.exact = false;
    p.re_box = std::move(x);
    p.im_box = std::move(y);
    return p;
  }

  bool operator==(const UpperHalfPoint& o) const {
    if (!exact || !o.exact)
      throw std::logic_error("UpperHalfPoint: equality is only decidable on exact points");
    return re == o.re && im == o.im;
  }

  std::string str() const {
    if (exact) return re.str() + " + (" + im.str() + ")i";
    return "[" + rat_to_string(re_box.lo) + "," + rat_to_string(re_box.hi) + "] + [" +
           rat_to_string(im_box.lo) + "," + rat_to_string(im_box.hi) + "]i";
  }
};

namespace detail_sl2z {

inline RatInterval iv_sq(const RatInterval& v) {
  Rat a = v.lo * v.lo, b = v.hi * v.hi;
  Rat hi = a > b ? a : b;
  Rat lo = v.contains_zero() ? Rat(0) : (a < b ? a : b);
  return RatInterval(std::move(lo), std::move(hi));
}

inline RatInterval iv_div(const RatInterval& x, const RatInterval& d) {
  if (sign_of(d.lo) <= 0)
    throw std::runtime_error("interval division needs a certainly-positive denominator");
  Rat c1 = x.lo / d.lo, c2 = x.lo / d.hi, c3 = x.hi / d.lo, c4 = x.hi / d.hi;
  Rat lo = c1, hi = c1;
  for (const Rat* v : {&c2, &c3, &c4}) {
    if (*v < lo) lo = *v;
    if (*v > hi) hi = *v;
  }
  return RatInterval(std::move(lo), std::move(hi));
}

}  // namespace detail_sl2z

// The action z -> (az + b)/(cz + d). With x + iy and determinant one the
// image is ((ax+b)(cx+d) + a c y^2)/D + i y/D, D = (cx+d)^2 + (cy)^2.
inline UpperHalfPoint mobius_transform(const ModularMatrix& g, const UpperHalfPoint& z) {
  Rat A(g.a), B(g.b), C(g.c), D(g.d);
  if (z.exact) {
    const Surd& x = z.re;
    const Surd& y = z.im;
    Surd cxd = x * Surd(C) + Surd(D);
    Surd y2 = y * y;
    Surd den = cxd * cxd + y2 * Surd(C * C);
    Surd xr = ((x * Surd(A) + Surd(B)) * cxd + y2 * Surd(A * C)) / den;
    Surd yr = y / den;
    return UpperHalfPoint::make(std::move(xr), std::move(yr));
  }
  using detail_sl2z::iv_div;
  using detail_sl2z::iv_sq;
  const RatInterval& x = z.re_box;
  const RatInterval& y = z.im_box;
  RatInterval cxd = x * C + D;
  RatInterval y2 = iv_sq(y);
  RatInterval den = iv_sq(cxd) + y2 * (C * C);
  RatInterval num_x = (x * A + B) * cxd + y2 * (A * C);
  return UpperHalfPoint::boxed(iv_div(num_x, den), iv_div(y, den));
}

// Closed membership test for F. Interval points must decide both defining
// inequalities with certainty; a straddling enclosure is refused rather than
// misclassified.
inline bool in_fundamental_domain(const UpperHalfPoint& z) {
  Surd half(Rat(1, 2));
  if (z.exact) {
    if (z.re > half || z.re < -half) return false;
    return z.re * z.re + z.im * z.im >= Surd(1);
  }
  const RatInterval& x = z.re_box;
  RatInterval r2 = detail_sl2z::iv_sq(x) + detail_sl2z::iv_sq(z.im_box);
  Rat h(1, 2);
  bool re_in = x.lo >= -h && x.hi <= h;
  bool re_out = x.hi < -h || x.lo > h;
  bool abs_in = r2.lo >= 1;
  bool abs_out = r2.hi < 1;
  if (re_out || abs_out) return false;
  if (re_in && abs_in) return true;
  throw std::runtime_error(
      "fundamental-domain membership not certifiable at this enclosure width");
}

// ---------------------------------------------------------------------------
// Reduction into F.

struct ReductionTrace {
  // Steps in application order: ('T', k) means z -> z + k, ('S', 1) means
  // z -> -1/z. product is their composition (leftmost factor = last step).
  std::vector<std::pair<char, Int>> word;
  ModularMatrix product;
  UpperHalfPoint result;
};

inline ReductionTrace reduce_to_fundamental(const UpperHalfPoint& z) {
  ReductionTrace tr;
  tr.product = ModularMatrix::identity();
  UpperHalfPoint cur = z;
  const Surd half(Rat(1, 2));
  const Surd one(Rat(1));

  // Each S-step strictly increases Im, and above any height bound only
  // finitely many translates of an exact point exist, so the loop terminates;
  // the iteration cap turns that argument into a hard guard.
  for (int iter = 0; iter < 100000; ++iter) {
    // Translate Re into [-1/2, 1/2]; points already in range are left alone,
    // so boundary representatives (Re = 1/2) are preserved.
    Int k(0);
    if (cur.exact) {
      if (cur.re > half || cur.re < -half) k = (cur.re - half).ceil();
    } else {
      const RatInterval& x = cur.re_box;
      Rat h(1, 2);
      if (!(x.lo >= -h && x.hi <= h)) {
        k = rat_round_half_up(x.mid());
        RatInterval shifted(x.lo - Rat(k), x.hi - Rat(k));
        if (!(shifted.lo >= -h && shifted.hi <= h))
          throw std::runtime_error(
              "reduction not certifiable: Re enclosure straddles a translation boundary");
      }
    }
    if (sign_of(k) != 0) {
      tr.word.emplace_back('T', -k);
      tr.product = ModularMatrix::T_pow(-k) * tr.product;
      if (cur.exact)
        cur.re = cur.re - Surd(Rat(k));
      else
        cur.re_box = RatInterval(cur.re_box.lo - Rat(k), cur.re_box.hi - Rat(k));
    }

    // Invert if |z| < 1.
    bool apply_s;
    if (cur.exact) {
      apply_s = cur.re * cur.re + cur.im * cur.im < one;
    } else {
      RatInterval r2 = detail_sl2z::iv_sq(cur.re_box) + detail_sl2z::iv_sq(cur.im_box);
      if (r2.lo >= 1)
        apply_s = false;
      else if (r2.hi < 1)
        apply_s = true;
      else
        throw std::runtime_error(
            "reduction not certifiable: |z| enclosure straddles the unit circle");
    }
    if (!apply_s) break;
    tr.word.emplace_back('S', Int(1));
    tr.product = ModularMatrix::S() * tr.product;
    cur = mobius_transform(ModularMatrix::S(), cur);
  }

  tr.result = cur;
  if (!in_fundamental_domain(tr.result))
    throw std::logic_error("reduce_to_fundamental: result escaped F (internal error)");
  if (z.exact) {
    UpperHalfPoint replay = mobius_transform(tr.product, z);
    if (!(replay == tr.result))
      throw std::logic_error("reduce_to_fundamental: recorded word does not reproduce result");
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Hyperbolic area of F under dA = dx dy / (4 y^2).
//
// Integrating out y gives area = 2 * Int_0^{1/2} dx / (4 sqrt(1 - x^2)), an
// increasing integrand, so left/right Riemann sums bracket the integral.
// Each evaluation uses a certified rational sqrt enclosure and every partial
// sum is rounded outward to 96-bit dyadics to keep denominators bounded.

inline RatInterval fundamental_area(const Rat& tolerance) {
  if (sign_of(tolerance) <= 0)
    throw std::invalid_argument("fundamental_area: tolerance must be positive");

  long panels = 64;
  {
    // Width scales like (f(1/2) - f(0)) / (2 n) < 1/(25 n); start near target.
    Rat want = Rat(1, 25) / tolerance;
    Int n0 = rat_ceil(want);
    if (auto l = to_long(n0); l && *l > panels) panels = *l;
    if (panels > (1L << 26)) panels = 1L << 26;
  }

  const unsigned kSqrtBits = 64;
  const unsigned kDyadicBits = 96;
  Int scale(1);
  mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), kDyadicBits);

  for (int attempt = 0; attempt < 24; ++attempt) {
    Int lo_acc(0), hi_acc(0);
    Rat n2(2 * panels);
    for (long i = 0; i < panels; ++i) {
      Rat xl = Rat(i) / n2;
      Rat xr = Rat(i + 1) / n2;
      RatInterval sl = sqrt_enclosure(Rat(1) - xl * xl, kSqrtBits);
      RatInterval sr = sqrt_enclosure(Rat(1) - xr * xr, kSqrtBits);
      Rat f_lo = Rat(1) / (Rat(4) * sl.hi);  // f increasing: left endpoint minorizes
      Rat f_hi = Rat(1) / (Rat(4) * sr.lo);
      lo_acc += rat_floor(f_lo * Rat(scale));
      hi_acc += rat_ceil(f_hi * Rat(scale));
    }
    // area = 2 * h * sum, h = 1/(2 panels).
    Rat area_lo = make_rat(lo_acc, scale * panels);
    Rat area_hi = make_rat(hi_acc, scale * panels);
    if (area_hi - area_lo <= tolerance) {
      if (sign_of(area_lo) <= 0)
        throw std::logic_error("fundamental_area: lower bound failed positivity");
      // Upper bound from the height estimate Im >= sqrt(3)/2: area < 1/(2 sqrt 3),
      // i.e. 12 * area^2 < 1.
      if (!(Rat(12) * area_hi * area_hi < 1))
        throw std::logic_error("fundamental_area: enclosure exceeded the 1/(2 sqrt 3) bound");
      return RatInterval(std::move(area_lo), std::move(area_hi));
    }
    panels *= 2;
  }
  throw std::logic_error("fundamental_area: quadrature failed to meet tolerance");
}

// ---------------------------------------------------------------------------
// Principal congruence subgroups.

inline bool congruence_member(const ModularMatrix& g, const Int& n) {
  if (sign_of(n) <= 0) throw std::invalid_argument("congruence_member: level must be >= 1");
  auto ok = [&n](const Int& x, long target) {
    Int r = (x - target) % n;
    return sign_of(r) == 0;
  };
  return ok(g.a, 1) && ok(g.b, 0) && ok(g.c, 0) && ok(g.d, 1);
}

// |SL(2, Z/n)| by honest enumeration of all n^4 residue matrices, sharded on
// the top-left entry with an order-independent sum.
inline unsigned long long sl2_mod_order(long n, long enumeration_bound = 60) {
  if (n < 1) throw std::invalid_argument("sl2_mod_order: level must be >= 1");
  if (n > enumeration_bound)
    throw std::invalid_argument("sl2_mod_order: level exceeds the enumeration bound");
  if (n == 1) return 1;
  unsigned long un = static_cast<unsigned long>(n);
  std::vector<unsigned long long> per_shard(un, 0);
  run_sharded(static_cast<unsigned>(un), [&](unsigned shard) {
    unsigned long a = shard;
    unsigned long long count = 0;
    for (unsigned long b = 0; b < un; ++b)
      for (unsigned long c = 0; c < un; ++c)
        for (unsigned long d = 0; d < un; ++d)
          if (((a * d) % un + un - (b * c) % un) % un == 1UL) ++count;
    per_shard[shard] = count;
  });
  unsigned long long total = 0;
  for (unsigned long long c : per_shard) total += c;
  return total;
}

// ---------------------------------------------------------------------------
// Torsion.

// Exact order of g in SL(2,Z): +-Id directly; |trace| >= 2 otherwise means
// parabolic or hyperbolic, hence infinite order; elliptic traces {-1, 0, 1}
// give order 3, 4 or 6, confirmed by exact matrix powers.
inline std::optional<unsigned> finite_order(const ModularMatrix& g) {
  ModularMatrix id = ModularMatrix::identity();
  if (g == id) return 1u;
  if (g == ModularMatrix{-1, 0, 0, -1}) return 2u;
  if (int_abs(g.trace()) >= 2) return std::nullopt;
  for (unsigned k : {3u, 4u, 6u})
    if (g.pow(static_cast<long>(k)) == id) return k;
  throw std::logic_error("finite_order: elliptic element with no order in {3,4,6}");
}

struct TorsionReport {
  long level = 0;
  unsigned long samples_requested = 0;
  unsigned long nonidentity_checked = 0;
  bool torsion_found = false;
  std::optional<ModularMatrix> witness;
  std::optional<unsigned> witness_order;
  std::string note;
};

// Samples random products of conjugates of T^n — all members of the level-n
// principal congruence subgroup — and checks each nonidentity sample has
// infinite order. For n < 3 the classical torsion witnesses are exhibited
// instead of sampled.
inline TorsionReport torsion_free_check(long n, unsigned long samples,
                                        unsigned long seed = 20260823UL) {
  if (n < 1) throw std::invalid_argument("torsion_free_check: level must be >= 1");
  TorsionReport rep;
  rep.level = n;
  rep.samples_requested = samples;
  if (n == 1) {
    rep.torsion_found = true;
    rep.witness = ModularMatrix::S();
    rep.witness_order = finite_order(*rep.witness);
    rep.note = "level 1 is all of SL(2,Z); S has finite order";
    return rep;
  }
  if (n == 2) {
    rep.torsion_found = true;
    rep.witness = ModularMatrix{-1, 0, 0, -1};
    rep.witness_order = 2;
    rep.note = "-Id is congruent to Id mod 2, so level 2 retains 2-torsion";
    return rep;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> factor_count(1, 3);
  std::uniform_int_distribution<int> word_len(0, 6);
  std::uniform_int_distribution<int> letter(0, 2);
  std::uniform_int_distribution<int> tpow(1, 3);
  std::uniform_int_distribution<int> flip(0, 1);

  for (unsigned long s = 0; s < samples; ++s) {
    ModularMatrix sample = ModularMatrix::identity();
    int factors = factor_count(rng);
    for (int f = 0; f < factors; ++f) {
      ModularMatrix conj = ModularMatrix::identity();
      int len = word_len(rng);
      for (int l = 0; l < len; ++l) {
        switch (letter(rng)) {
          case 0: conj = conj * ModularMatrix::T(); break;
          case 1: conj = conj * ModularMatrix::T().inverse(); break;
          default: conj = conj * ModularMatrix::S(); break;
        }
      }
      long k = tpow(rng) * (flip(rng) ? 1 : -1);
      ModularMatrix core = ModularMatrix::T_pow(Int(n) * k);
      sample = sample * (conj * core * conj.inverse());
    }
    if (!congruence_member(sample, Int(n)))
      throw std::logic_error("torsion_free_check: sampler left the congruence subgroup");
    if (sample == ModularMatrix::identity()) continue;
    ++rep.nonidentity_checked;
    if (auto ord = finite_order(sample)) {
      rep.torsion_found = true;
      rep.witness = sample;
      rep.witness_order = ord;
      rep.note = "finite-order element found at level >= 3 (unexpected)";
      return rep;
    }
  }
  rep.note = "all sampled nonidentity members have infinite order";
  return rep;
}

// ---------------------------------------------------------------------------
// Unipotence: the characteristic polynomial is exactly (x - 1)^dim.

inline bool is_unipotent(const Mat<Rat>& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("is_unipotent: matrix must be square");
  QPoly cp = char_poly(g);
  QPoly expected({Rat(1)});
  QPoly factor({Rat(-1), Rat(1)});
  for (std::size_t i = 0; i < g.rows(); ++i) expected = expected * factor;
  return cp == expected;
}

// ---------------------------------------------------------------------------
// Short-vector minima of integral anisotropic forms.

struct MahlerReport {
  Int minimum;                      // min |q(v)| over primitive v, sup-norm <= height
  std::vector<Int> argmin;          // lexicographically least attaining vector
  long height = 0;
  unsigned long long primitive_checked = 0;
  IsotropyCertificate gate;         // the anisotropy certificate that admitted the form
};

namespace detail_sl2z {

struct MahlerShardState {
  bool found = false;
  Int best;
  std::vector<Int> argmin;
  unsigned long long checked = 0;
};

// Lexicographic scan of the canonical (first nonzero coordinate positive)
// box with gcd-primitivity filter. Coordinates are longs; values accumulate
// in Int, so no overflow regardless of the gram entries.
inline void mahler_scan(const Mat<Rat>& gram, long height, std::vector<long>& v,
                        std::size_t pos, bool seen_nonzero, MahlerShardState& st) {
  std::size_t n = gram.rows();
  if (pos == n) {
    if (!seen_nonzero) return;
    long g = 0;
    for (long c : v) g = std::gcd(g, c < 0 ? -c : c);
    if (g != 1) return;
    Rat q(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] == 0) continue;
        q += gram.at(i, j) * Rat(v[i]) * Rat(v[j]);
      }
    }
    Int val = int_abs(num(q));  // integral gram: den == 1
    ++st.checked;
    if (!st.found || val < st.best) {
      st.found = true;
      st.best = val;
      st.argmin.assign(v.begin(), v.end());
    }
    return;
  }
  long lo = seen_nonzero ? -height : 0;
  for (long c = lo; c <= height; ++c) {
    v[pos] = c;
    mahler_scan(gram, height, v, pos + 1, seen_nonzero || c != 0, st);
  }
  v[pos] = 0;
}

}  // namespace detail_sl2z

inline MahlerReport mahler_min(const QuadraticForm& form, long height = 30) {
  if (height < 1) throw std::invalid_argument("mahler_min: height must be >= 1");
  if (!form.over_rationals())
    throw std::invalid_argument("mahler_min: integral forms over Q only");
  std::size_t n = form.dim();
  Mat<Rat> gram(n, n, Rat(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat e = form.gram.at(i, j).as_rational();
      if (den(e) != 1)
        throw std::invalid_argument("mahler_min: gram matrix must have integer entries");
      gram.at(i, j) = e;
    }

  MahlerReport rep;
  rep.height = height;
  rep.gate = is_isotropic_over_q(form);
  if (rep.gate.verdict != IsoVerdict::Anisotropic)
    throw std::invalid_argument(
        "mahler_min: form is isotropic over Q — the anisotropy gate rejects it");

  // Shard on the first coordinate (0..height); within a shard the scan is
  // lexicographic, and shards are merged in ascending order, so the reported
  // argmin is the lexicographically least canonical attaining vector.
  unsigned shards = static_cast<unsigned>(height + 1);
  std::vector<detail_sl2z::MahlerShardState> states(shards);
  run_sharded(shards, [&](unsigned shard) {
    detail_sl2z::MahlerShardState& st = states[shard];
    std::vector<long> v(n, 0);
    v[0] = static_cast<long>(shard);
    if (n == 1) {
      if (shard == 1) {
        st.found = true;
        st.best = int_abs(num(gram.at(0, 0)));
        st.argmin = {Int(1)};
        st.checked = 1;
      }
      return;
    }
    detail_sl2z::mahler_scan(gram, height, v, 1, shard != 0, st);
  });

  bool found = false;
  for (const auto& st : states) {
    rep.primitive_checked += st.checked;
    if (!st.found) continue;
    if (!found || st.best < rep.minimum) {
      found = true;
      rep.minimum = st.best;
      rep.argmin = st.argmin;
    }
  }
  if (!found) throw std::logic_error("mahler_min: empty search (height < 1?)");
  if (rep.minimum < 1)
    throw std::logic_error("mahler_min: minimum below 1 contradicts anisotropy");
  return rep;
}

}  // namespace latticeforge

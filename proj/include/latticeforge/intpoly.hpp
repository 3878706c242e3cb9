#pragma once

// Univariate polynomials over Q, plus the integer-coefficient services built
// on them: Sturm chains, real root isolation, resultants (including the
// coefficient-polynomial variant used for eliminating a variable), and an
// irreducibility pipeline that reports exactly how much it proved.
//
// Coefficients are stored lowest-degree first.  The zero polynomial is the
// empty vector; otherwise the top coefficient is nonzero.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latticeforge/rational.hpp"

namespace latticeforge {

class QPoly {
 public:
  QPoly() = default;
  explicit QPoly(Rat constant) {
    if (sign_of(constant) != 0) c_.push_back(std::move(constant));
  }
  explicit QPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

  static QPoly x() { return QPoly(std::vector<Rat>{Rat(0), Rat(1)}); }
  static QPoly monomial(std::size_t k, Rat coeff = Rat(1)) {
    std::vector<Rat> v(k + 1, Rat(0));
    v[k] = std::move(coeff);
    return QPoly(std::move(v));
  }

  const std::vector<Rat>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  // degree of the zero polynomial is -1 by convention
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const Rat& lead() const {
    if (c_.empty()) throw std::logic_error("QPoly::lead on zero polynomial");
    return c_.back();
  }
  Rat coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rat(0); }

  bool operator==(const QPoly& o) const { return c_ == o.c_; }
  bool operator!=(const QPoly& o) const { return c_ != o.c_; }

  QPoly operator-() const {
    QPoly r(*this);
    for (auto& a : r.c_) a = -a;
    return r;
  }

  QPoly operator+(const QPoly& o) const {
    std::vector<Rat> v(std::max(c_.size(), o.c_.size()), Rat(0));
    for (std::size_t i = 0; i < c_.size(); ++i) v[i] += c_[i];
    for (std::size_t i = 0; i < o.c_.size(); ++i) v[i] += o.c_[i];
    return QPoly(std::move(v));
  }
  QPoly operator-(const QPoly& o) const { return *this + (-o); }

  QPoly operator*(const QPoly& o) const {
    if (is_zero() || o.is_zero()) return QPoly();
    std::vector<Rat> v(c_.size() + o.c_.size() - 1, Rat(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) v[i + j] += c_[i] * o.c_[j];
    return QPoly(std::move(v));
  }

  QPoly operator*(const Rat& s) const {
    if (sign_of(s) == 0) return QPoly();
    QPoly r(*this);
    for (auto& a : r.c_) a *= s;
    return r;
  }
  QPoly operator/(const Rat& s) const {
    if (sign_of(s) == 0) throw std::invalid_argument("QPoly: division by zero scalar");
    QPoly r(*this);
    for (auto& a : r.c_) a /= s;
    return r;
  }

  // Euclidean division: *this = q * g + r with deg r < deg g.
  std::pair<QPoly, QPoly> divmod(const QPoly& g) const {
    if (g.is_zero()) throw std::invalid_argument("QPoly::divmod by zero");
    QPoly r(*this);
    std::vector<Rat> q;
    long dq = degree() - g.degree();
    if (dq < 0) return {QPoly(), r};
    q.assign(static_cast<std::size_t>(dq) + 1, Rat(0));
    while (!r.is_zero() && r.degree() >= g.degree()) {
      Rat f = r.lead() / g.lead();
      std::size_t shift = static_cast<std::size_t>(r.degree() - g.degree());
      q[shift] = f;
      // r -= f * x^shift * g, done in place
      for (std::size_t i = 0; i < g.c_.size(); ++i) r.c_[i + shift] -= f * g.c_[i];
      r.trim();
    }
    return {QPoly(std::move(q)), r};
  }

  QPoly exact_div(const QPoly& g) const {
    auto [q, r] = divmod(g);
    if (!r.is_zero()) throw std::logic_error("QPoly::exact_div: division was not exact");
    return q;
  }

  QPoly derivative() const {
    if (c_.size() <= 1) return QPoly();
    std::vector<Rat> v(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * Rat(static_cast<long>(i));
    return QPoly(std::move(v));
  }

  Rat eval(const Rat& x) const {
    Rat acc(0);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  RatInterval eval(const RatInterval& x) const {
    RatInterval acc;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  QPoly monic() const {
    if (is_zero()) return *this;
    return *this / lead();
  }

  std::string coeffs_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ", ";
      s += rat_to_string(c_[i]);
    }
    return s + "]";
  }

 private:
  void trim() {
    while (!c_.empty() && sign_of(c_.back()) == 0) c_.pop_back();
  }
  std::vector<Rat> c_;
};

inline QPoly operator*(const Rat& s, const QPoly& f) { return f * s; }

inline QPoly gcd_monic(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

inline QPoly squarefree_part(const QPoly& f) {
  if (f.degree() <= 0) return f;
  QPoly g = gcd_monic(f, f.derivative());
  return f.exact_div(g);
}

// f(x) -> k^deg(f) * f(x/k): coefficient i picks up k^(deg-i).  Keeps integer
// coefficients integer when k is an integer, which is the point.
inline QPoly scale_argument_down(const QPoly& f, const Rat& k) {
  if (f.is_zero()) return f;
  std::vector<Rat> v(f.coeffs());
  std::size_t n = v.size() - 1;
  Rat pw(1);
  for (std::size_t i = n + 1; i-- > 0;) {
    v[i] *= pw;
    pw *= k;
  }
  return QPoly(std::move(v));
}

// ---------------------------------------------------------------------------
// Integer-coefficient view.  content * primitive == f, primitive has positive
// leading coefficient and coprime integer coefficients.

using ZCoeffs = std::vector<Int>;

inline long zdegree(const ZCoeffs& f) { return static_cast<long>(f.size()) - 1; }

inline std::pair<ZCoeffs, Rat> primitive_parts(const QPoly& f) {
  if (f.is_zero()) return {ZCoeffs{}, Rat(0)};
  Int l(1);
  for (const Rat& c : f.coeffs()) {
    Int g = int_gcd(l, den(c));
    l = l / g * den(c);  // lcm of denominators
  }
  Int g(0);
  std::vector<Int> z;
  z.reserve(f.coeffs().size());
  for (const Rat& c : f.coeffs()) {
    Rat scaled = c * Rat(l);
    z.push_back(num(scaled));  // denominator is 1 now
    g = int_gcd(g, z.back());
  }
  if (sign_of(z.back()) < 0) g = -g;
  for (Int& zi : z) zi /= g;
  return {std::move(z), make_rat(g, l)};
}

inline QPoly to_qpoly(const ZCoeffs& z) {
  std::vector<Rat> v;
  v.reserve(z.size());
  for (const Int& a : z) v.emplace_back(a);
  return QPoly(std::move(v));
}

// ---------------------------------------------------------------------------
// Sturm machinery.  Convention used throughout (and relied on by callers):
// with V(t) = number of sign changes in the chain at t after dropping zeros,
// and f squarefree, V(a) - V(b) counts the roots in the half-open (a, b].

inline std::vector<QPoly> sturm_chain(const QPoly& f) {
  std::vector<QPoly> chain;
  if (f.is_zero()) return chain;
  chain.push_back(f);
  QPoly d = f.derivative();
  if (d.is_zero()) return chain;
  chain.push_back(d);
  while (true) {
    const QPoly& a = chain[chain.size() - 2];
    const QPoly& b = chain[chain.size() - 1];
    QPoly r = a.divmod(b).second;
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  return chain;
}

inline int sign_changes_at(const std::vector<QPoly>& chain, const Rat& t) {
  int changes = 0, prev = 0;
  for (const QPoly& p : chain) {
    int s = sign_of(p.eval(t));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

inline int sturm_count(const std::vector<QPoly>& chain, const Rat& a, const Rat& b) {
  if (a >= b) return 0;
  return sign_changes_at(chain, a) - sign_changes_at(chain, b);
}

// Strict bound: every real root x of f satisfies |x| < bound.
inline Rat root_bound(const QPoly& f) {
  if (f.degree() <= 0) return Rat(1);
  Rat m(0);
  Rat l = rat_abs(f.lead());
  for (std::size_t i = 0; i + 1 < f.coeffs().size(); ++i) {
    Rat q = rat_abs(f.coeffs()[i]) / l;
    if (q > m) m = q;
  }
  return m + 2;
}

// One isolated real root.  For exact roots lo == hi == the root.  Otherwise
// f(lo) and f(hi) are nonzero with opposite signs and (lo, hi) holds exactly
// one root of the (squarefree) polynomial the root was isolated from.
struct RealRoot {
  bool exact = false;
  Rat lo, hi;

  Rat mid() const { return exact ? lo : (lo + hi) / 2; }
  Rat width() const { return hi - lo; }
  RatInterval interval() const { return RatInterval(lo, hi); }
};

// One bisection step; no-op for exact roots.
inline void refine_step(const QPoly& f, RealRoot& r) {
  if (r.exact) return;
  Rat m = (r.lo + r.hi) / 2;
  int sm = sign_of(f.eval(m));
  if (sm == 0) {
    r.exact = true;
    r.lo = r.hi = m;
    return;
  }
  if (sm == sign_of(f.eval(r.lo)))
    r.lo = m;
  else
    r.hi = m;
}

inline void refine_below(const QPoly& f, RealRoot& r, const Rat& width) {
  while (!r.exact && r.width() >= width) refine_step(f, r);
}

namespace detail {
// Shrink intervals until no two overlap and no bracket contains an exact
// root's value.  Terminates because the underlying roots are distinct.
inline void separate_roots(const QPoly& f, std::vector<RealRoot>& roots) {
  bool dirty = true;
  while (dirty) {
    dirty = false;
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        RealRoot &a = roots[i], &b = roots[j];
        bool overlap = !(a.hi < b.lo || b.hi < a.lo);
        if (a.exact && b.exact) continue;  // distinct values, never overlap
        if (overlap) {
          if (!a.exact) refine_step(f, a);
          if (!b.exact) refine_step(f, b);
          dirty = true;
        }
      }
  }
}
}  // namespace detail

// Distinct real roots of f (any multiplicities), sorted increasing, with
// pairwise disjoint isolating intervals.
inline std::vector<RealRoot> isolate_real_roots(const QPoly& f_in) {
  if (f_in.degree() < 0) throw std::invalid_argument("isolate_real_roots: zero polynomial");
  std::vector<RealRoot> out;
  if (f_in.degree() == 0) return out;
  QPoly f = squarefree_part(f_in).monic();

  // Exact rational hits during bisection are deflated out of f so the Sturm
  // chain of what remains never sees a root at an interval endpoint.
  bool restart = true;
  while (restart) {
    restart = false;
    // Remove brackets from a previous pass; they are re-derived.
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const RealRoot& r) { return !r.exact; }),
              out.end());
    if (f.degree() <= 0) break;
    std::vector<QPoly> chain = sturm_chain(f);
    Rat bound = root_bound(f);
    struct Seg {
      Rat a, b;
      int count;
    };
    std::vector<Seg> stack;
    int total = sturm_count(chain, -bound, bound);
    stack.push_back({-bound, bound, total});
    while (!stack.empty()) {
      Seg s = stack.back();
      stack.pop_back();
      if (s.count == 0) continue;
      if (s.count == 1) {
        // Endpoints are never roots here, so the signs bracket the root.
        RealRoot r;
        r.exact = false;
        r.lo = s.a;
        r.hi = s.b;
        if (sign_of(f.eval(r.lo)) * sign_of(f.eval(r.hi)) >= 0)
          throw std::logic_error("isolate_real_roots: bracket lost its sign change");
        out.push_back(std::move(r));
        continue;
      }
      Rat m = (s.a + s.b) / 2;
      if (sign_of(f.eval(m)) == 0) {
        RealRoot r;
        r.exact = true;
        r.lo = r.hi = m;
        out.push_back(std::move(r));
        f = f.exact_div(QPoly(std::vector<Rat>{-m, Rat(1)}));
        restart = true;
        break;
      }
      int left = sturm_count(chain, s.a, m);
      stack.push_back({s.a, m, left});
      stack.push_back({m, s.b, s.count - left});
    }
  }

  detail::separate_roots(f, out);
  // Intervals are pairwise disjoint now, so ordering by lo orders the roots.
  std::sort(out.begin(), out.end(),
            [](const RealRoot& a, const RealRoot& b) { return a.lo < b.lo; });
  return out;
}

// ---------------------------------------------------------------------------
// Resultants.

// Generic fraction-free determinant (Bareiss).  Works over any integral
// domain given an exact division; row swaps only.
inline Rat bareiss_exact_div(const Rat& a, const Rat& b) { return a / b; }
inline QPoly bareiss_exact_div(const QPoly& a, const QPoly& b) { return a.exact_div(b); }
inline bool bareiss_is_zero(const Rat& a) { return sign_of(a) == 0; }
inline bool bareiss_is_zero(const QPoly& a) { return a.is_zero(); }

template <typename R>
R bareiss_det(std::vector<std::vector<R>> m) {
  const std::size_t n = m.size();
  if (n == 0) return R(Rat(1));
  int sign = 1;
  R prev{Rat(1)};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t piv = k;
    while (piv < n && bareiss_is_zero(m[piv][k])) ++piv;
    if (piv == n) return R{};
    if (piv != k) {
      std::swap(m[piv], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = bareiss_exact_div(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
      m[i][k] = R{};
    }
    prev = m[k][k];
  }
  R det = m[n - 1][n - 1];
  return sign < 0 ? R{} - det : det;
}

// Sylvester-matrix resultant of univariate f, g over Q.
inline Rat resultant(const QPoly& f, const QPoly& g) {
  long m = f.degree(), n = g.degree();
  if (m < 0 || n < 0) return Rat(0);
  if (m == 0 && n == 0) return Rat(1);
  if (m == 0) return rat_pow(f.lead(), static_cast<unsigned long>(n));
  if (n == 0) return rat_pow(g.lead(), static_cast<unsigned long>(m));
  std::size_t dim = static_cast<std::size_t>(m + n);
  std::vector<std::vector<Rat>> M(dim, std::vector<Rat>(dim, Rat(0)));
  for (long r = 0; r < n; ++r)
    for (long k = 0; k <= m; ++k) M[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = f.coeff(static_cast<std::size_t>(m - k));
  for (long r = 0; r < m; ++r)
    for (long k = 0; k <= n; ++k) M[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + k)] = g.coeff(static_cast<std::size_t>(n - k));
  return bareiss_det(std::move(M));
}

// Resultant in the *outer* variable of two polynomials whose coefficients are
// themselves polynomials (in the surviving variable).  Input vectors are
// lowest-degree-first in the eliminated variable and must have nonzero top
// entries.  Result is a polynomial in the surviving variable.
inline QPoly resultant_eliminating(std::vector<QPoly> f, std::vector<QPoly> g) {
  auto trim = [](std::vector<QPoly>& v) {
    while (!v.empty() && v.back().is_zero()) v.pop_back();
  };
  trim(f);
  trim(g);
  if (f.empty() || g.empty()) return QPoly();
  long m = static_cast<long>(f.size()) - 1, n = static_cast<long>(g.size()) - 1;
  if (m == 0 && n == 0) return QPoly(Rat(1));
  auto poly_pow = [](const QPoly& b, long e) {
    QPoly r(Rat(1));
    for (long i = 0; i < e; ++i) r = r * b;
    return r;
  };
  if (m == 0) return poly_pow(f[0], n);
  if (n == 0) return poly_pow(g[0], m);
  std::size_t dim = static_cast<std::size_t>(m + n);
  std::vector<std::vector<QPoly>> M(dim, std::vector<QPoly>(dim));
  for (long r = 0; r < n; ++r)
    for (long k = 0; k <= m; ++k) M[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = f[static_cast<std::size_t>(m - k)];
  for (long r = 0; r < m; ++r)
    for (long k = 0; k <= n; ++k) M[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + k)] = g[static_cast<std::size_t>(n - k)];
  return bareiss_det(std::move(M));
}

// ---------------------------------------------------------------------------
// Small-integer factoring support for the irreducibility pipeline.  flag
// 'complete' records whether the factor list provably covers the input.

struct FactorList {
  std::vector<std::pair<Int, unsigned>> factors;
  bool complete = true;
};

inline FactorList trial_factor(Int n, unsigned long bound = 1000000) {
  FactorList out;
  n = int_abs(n);
  if (n == 0 || n == 1) return out;
  for (unsigned long p = 2; p <= bound && Int(p) * Int(p) <= n; p += (p == 2 ? 1 : 2)) {
    if (!mpz_divisible_ui_p(n.get_mpz_t(), p)) continue;
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    out.factors.emplace_back(Int(p), e);
  }
  if (n > 1) {
    if (n <= Int(bound) * Int(bound))
      out.factors.emplace_back(n, 1);  // below bound^2 and no small factor: prime
    else
      out.complete = false;  // large cofactor we did not resolve
  }
  return out;
}

// All positive divisors from a factor list (caller caps the blow-up).
inline std::optional<std::vector<Int>> divisors_from(const FactorList& fl,
                                                     std::size_t cap = 20000) {
  std::vector<Int> divs{Int(1)};
  for (const auto& [p, e] : fl.factors) {
    std::size_t base = divs.size();
    if (base * (e + 1) > cap) return std::nullopt;
    Int pk(1);
    for (unsigned k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  return divs;
}

// ---------------------------------------------------------------------------
// Arithmetic mod a small prime, enough for the finite-field irreducibility
// test.  Degrees and primes here are tiny; everything is schoolbook.

namespace modp {

inline long norm(long a, long p) {
  a %= p;
  return a < 0 ? a + p : a;
}

inline long mulmod(long a, long b, long p) {
  return static_cast<long>(static_cast<__int128>(a) * b % p);
}

inline long powmod(long a, long e, long p) {
  long r = 1;
  a = norm(a, p);
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline long invmod(long a, long p) { return powmod(a, p - 2, p); }

using Poly = std::vector<long>;  // lowest-first, normalized below

inline void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline Poly reduce(const ZCoeffs& f, long p) {
  Poly r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    r[i] = norm(static_cast<long>(mpz_fdiv_ui(f[i].get_mpz_t(), static_cast<unsigned long>(p))), p);
  }
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b, long p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = norm(r[i + j] + mulmod(a[i], b[j], p), p);
  trim(r);
  return r;
}

inline Poly mod(Poly a, const Poly& f, long p) {
  trim(a);
  long linv = invmod(f.back(), p);
  while (a.size() >= f.size()) {
    long c = mulmod(a.back(), linv, p);
    std::size_t shift = a.size() - f.size();
    for (std::size_t i = 0; i < f.size(); ++i)
      a[i + shift] = norm(a[i + shift] - mulmod(c, f[i], p), p);
    trim(a);  // top coefficient was cancelled, so the size strictly drops
  }
  return a;
}

inline Poly gcd(Poly a, Poly b, long p) {
  while (!b.empty()) {
    Poly r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    long inv = invmod(a.back(), p);
    for (long& c : a) c = mulmod(c, inv, p);
  }
  return a;
}

// x^e mod (f, p) by binary exponentiation on the monomial.
inline Poly x_power_mod(unsigned long long e, const Poly& f, long p) {
  Poly base{0, 1}, acc{1};
  base = mod(base, f, p);
  while (e) {
    if (e & 1ULL) acc = mod(mul(acc, base, p), f, p);
    base = mod(mul(base, base, p), f, p);
    e >>= 1ULL;
  }
  return acc;
}

// Finite-field criterion: f irreducible over F_p of degree n iff
// x^(p^n) == x (mod f) and gcd(x^(p^(n/d)) - x, f) = 1 for each prime d | n.
// Returns nullopt when the prime is unusable (divides the leading
// coefficient, or p^n overflows the exponent type).
inline std::optional<bool> irreducible(const ZCoeffs& fz, long p) {
  if (zdegree(fz) < 1) return std::nullopt;
  if (mpz_divisible_ui_p(fz.back().get_mpz_t(), static_cast<unsigned long>(p))) return std::nullopt;
  Poly f = reduce(fz, p);
  unsigned long n = static_cast<unsigned long>(zdegree(fz));
  // p^n as u64, bail on overflow
  unsigned long long pn = 1;
  for (unsigned long i = 0; i < n; ++i) {
    if (pn > (~0ULL) / static_cast<unsigned long long>(p)) return std::nullopt;
    pn *= static_cast<unsigned long long>(p);
  }
  Poly xe = x_power_mod(pn, f, p);
  Poly xonly{0, 1};
  xonly = mod(xonly, f, p);
  if (xe != xonly) return false;
  std::vector<unsigned long> prime_divs;
  unsigned long nn = n;
  for (unsigned long d = 2; d * d <= nn; ++d)
    if (nn % d == 0) {
      prime_divs.push_back(d);
      while (nn % d == 0) nn /= d;
    }
  if (nn > 1) prime_divs.push_back(nn);
  for (unsigned long d : prime_divs) {
    unsigned long long pnd = 1;
    for (unsigned long i = 0; i < n / d; ++i) pnd *= static_cast<unsigned long long>(p);
    Poly h = x_power_mod(pnd, f, p);
    // h - x, reduced mod f
    Poly diff = h;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = norm(diff[1] - 1, p);
    trim(diff);
    Poly g = gcd(f, diff, p);
    if (g.size() != 1) return false;
  }
  return true;
}

}  // namespace modp

// ---------------------------------------------------------------------------
// Irreducibility over Q.  The verdict is three-way on purpose: "Assumed"
// means every complete test we ran was inconclusive, and callers are expected
// to surface that honestly rather than pretend.

enum class Irreducibility { Reducible, Irreducible, Assumed };

inline bool eisenstein_applies(const ZCoeffs& f, const Int& p) {
  long n = zdegree(f);
  if (n < 1) return false;
  if (mpz_divisible_p(f.back().get_mpz_t(), p.get_mpz_t())) return false;
  for (long i = 0; i < n; ++i)
    if (!mpz_divisible_p(f[static_cast<std::size_t>(i)].get_mpz_t(), p.get_mpz_t())) return false;
  return !mpz_divisible_p(f[0].get_mpz_t(), Int(p * p).get_mpz_t());
}

namespace detail {

// Complete search for rational roots of a primitive integer polynomial.
// Returns nullopt when the necessary factorizations were not completed.
inline std::optional<bool> has_rational_root(const ZCoeffs& f) {
  if (sign_of(f[0]) == 0) return true;  // root at 0
  FactorList f0 = trial_factor(f[0]);
  FactorList fl = trial_factor(f.back());
  if (!f0.complete || !fl.complete) return std::nullopt;
  auto d0 = divisors_from(f0);
  auto dl = divisors_from(fl);
  if (!d0 || !dl) return std::nullopt;
  QPoly q = to_qpoly(f);
  for (const Int& a : *d0)
    for (const Int& b : *dl) {
      if (int_gcd(a, b) != 1) continue;
      if (sign_of(q.eval(Rat(a, b))) == 0) return true;
      if (sign_of(q.eval(Rat(-a, b))) == 0) return true;
    }
  return false;
}

// Complete degree-4 decision for a primitive integer quartic with no
// rational root.  Works on the monic companion g(z) = l^3 f(z/l) and asks
// whether g splits as two monic integer quadratics; by the primitive-factor
// argument those are the only factorizations left.  nullopt = the divisor
// enumeration for g(0) did not complete.
inline std::optional<bool> quartic_splits(const ZCoeffs& f) {
  const Int& l = f.back();
  Int g3 = f[3];
  Int g2 = f[2] * l;
  Int g1 = f[1] * l * l;
  Int g0 = f[0] * l * l * l;
  FactorList fl = trial_factor(g0);
  if (!fl.complete) return std::nullopt;
  auto divs = divisors_from(fl);
  if (!divs) return std::nullopt;
  for (const Int& bpos : *divs)
    for (int sb : {1, -1}) {
      Int b = sb * bpos;
      Int d_num = g0 / b;  // exact: b | g0
      Int d = d_num;
      if (d == b) {
        // need a + c = g3, ac = g2 - 2b, and the cross terms force g1 = g3*b
        if (g1 != g3 * b) continue;
        Int disc = g3 * g3 - 4 * (g2 - 2 * b);
        Int s;
        if (!is_perfect_square(disc, &s)) continue;
        if (mpz_odd_p(Int(g3 + s).get_mpz_t())) continue;
        return true;
      }
      // a(d - b) = g1 - g3*b
      Int rhs = g1 - g3 * b;
      Int dd = d - b;
      if (!mpz_divisible_p(rhs.get_mpz_t(), dd.get_mpz_t())) continue;
      Int a = rhs / dd;
      Int c = g3 - a;
      if (b + d + a * c == g2) return true;
    }
  return false;
}

}  // namespace detail

inline Irreducibility irreducibility_over_q(const QPoly& fq) {
  long n = fq.degree();
  if (n <= 0) return Irreducibility::Reducible;  // units/zero are not irreducible here
  if (n == 1) return Irreducibility::Irreducible;
  auto [f, content] = primitive_parts(fq);
  (void)content;
  // Repeated factors settle it immediately.
  if (gcd_monic(fq, fq.derivative()).degree() > 0) return Irreducibility::Reducible;

  std::optional<bool> root = detail::has_rational_root(f);
  if (root && *root) return Irreducibility::Reducible;
  bool root_scan_complete = root.has_value();
  if (n <= 3 && root_scan_complete) return Irreducibility::Irreducible;
  if (n == 4 && root_scan_complete) {
    std::optional<bool> split = detail::quartic_splits(f);
    if (split) return *split ? Irreducibility::Reducible : Irreducibility::Irreducible;
  }

  // Eisenstein at any prime dividing all lower coefficients.
  Int g(0);
  for (std::size_t i = 0; i + 1 < f.size(); ++i) g = int_gcd(g, f[i]);
  if (g > 1) {
    FactorList gf = trial_factor(g, 100000);
    for (const auto& [p, e] : gf.factors) {
      (void)e;
      if (eisenstein_applies(f, p)) return Irreducibility::Irreducible;
    }
  }

  static const std::array<long, 25> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                              29, 31, 37, 41, 43, 47, 53, 59, 61,
                                              67, 71, 73, 79, 83, 89, 97};
  for (long p : kPrimes) {
    std::optional<bool> ok = modp::irreducible(f, p);
    if (ok && *ok) return Irreducibility::Irreducible;
  }
  return Irreducibility::Assumed;
}

}  // namespace latticeforge

#pragma once

// Free-subgroup certification in SL(2,R) by exact dynamics on the projective
// circle. Hyperbolic matrices with rational trace have eigen-data in a real
// quadratic field, so attracting/repelling points, arc membership and the
// two contraction conditions
//     phi(B u A+) < A+     and     phi^{-1}(B u A-) < A-
// are all decided by surd signs. A certificate names two generators, a power
// n, and four pairwise-disjoint open arcs for which both conditions verify;
// reduced words in the certified powers are then provably nontrivial, and
// validate_words both multiplies the words out (they live in the compositum
// of the two eigen-fields, handled by Biquad) and re-enacts the
// bounce-between-A-and-B tracking that proves it.
//
// Determinant -1 inputs are rejected outright: order preservation on the
// circle is what lets arc-image containment be decided by endpoint images,
// and only det = 1 guarantees it.

#include <algorithm>
#include <array>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latticeforge/rational.hpp"
#include "latticeforge/surd.hpp"

namespace latticeforge {

// ---------------------------------------------------------------------------
// Points of the projective line, homogeneous surd pairs.

struct ProjectivePoint {
  // Normalized: y > 0, or exactly (1 : 0) for the point at infinity.
  Surd x, y;

  static ProjectivePoint make(Surd hx, Surd hy) {
    (void)(hx + hy);  // shared-field probe
    int sy = hy.sign();
    if (sy == 0) {
      if (hx.is_zero()) throw std::invalid_argument("(0:0) is not a projective point");
      return infinity();
    }
    if (sy < 0) {
      hx = -hx;
      hy = -hy;
    }
    ProjectivePoint p;
    p.x = std::move(hx);
    p.y = std::move(hy);
    return p;
  }
  static ProjectivePoint infinity() {
    ProjectivePoint p;
    p.x = Surd(1);
    p.y = Surd(0);
    return p;
  }
  static ProjectivePoint rational(const Rat& t) { return make(Surd(t), Surd(1)); }

  bool is_infinity() const { return y.is_zero(); }
  Surd value() const {
    if (is_infinity()) throw std::logic_error("value() of the point at infinity");
    return x / y;
  }

  // The shared radicand of the two coordinates (0 for rational points).
  Int radicand() const { return x.is_rational() ? y.m() : x.m(); }

  bool operator==(const ProjectivePoint& o) const;
  bool operator!=(const ProjectivePoint& o) const { return !(*this == o); }

  std::string str() const { return "[" + x.str() + " : " + y.str() + "]"; }
};

// Cross term x_p y_q - x_q y_p as an exact sign, valid across two different
// quadratic fields (the one genuinely biquadratic comparison in the module).
inline int cross_sign(const ProjectivePoint& p, const ProjectivePoint& q) {
  Int m = p.radicand(), k = q.radicand();
  Rat A = p.x.a() * q.y.a() - q.x.a() * p.y.a();
  Rat B = p.x.b() * q.y.a() - q.x.a() * p.y.b();
  Rat C = p.x.a() * q.y.b() - q.x.b() * p.y.a();
  Rat D = p.x.b() * q.y.b() - q.x.b() * p.y.b();
  return biquad_sign(A, B, m, C, D, k);
}

inline bool ProjectivePoint::operator==(const ProjectivePoint& o) const {
  if (is_infinity() || o.is_infinity()) return is_infinity() && o.is_infinity();
  return cross_sign(*this, o) == 0;
}

// Linear order on R u {infinity} with infinity greatest; both finite points
// have positive y, so the cross sign orders their values.
inline int circle_cmp(const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.is_infinity() && q.is_infinity()) return 0;
  if (p.is_infinity()) return 1;
  if (q.is_infinity()) return -1;
  return cross_sign(p, q);
}

// ---------------------------------------------------------------------------
// Open arcs, counterclockwise = increasing direction, wrapping through
// infinity when from > to.

struct CircleInterval {
  ProjectivePoint from, to;

  static CircleInterval make(ProjectivePoint f, ProjectivePoint t) {
    if (f == t) throw std::invalid_argument("arc endpoints must be distinct");
    return CircleInterval{std::move(f), std::move(t)};
  }
  std::string str() const { return "(" + from.str() + ", " + to.str() + ")"; }
};

inline bool in_arc(const ProjectivePoint& p, const CircleInterval& arc) {
  const ProjectivePoint& f = arc.from;
  const ProjectivePoint& t = arc.to;
  if (f.is_infinity()) {  // (infinity, t) = everything below t
    if (p.is_infinity()) return false;
    return circle_cmp(p, t) < 0;
  }
  if (t.is_infinity()) {  // (f, infinity) = everything above f
    if (p.is_infinity()) return false;
    return circle_cmp(p, f) > 0;
  }
  int ft = circle_cmp(f, t);
  if (ft < 0) {  // no wrap
    if (p.is_infinity()) return false;
    return circle_cmp(p, f) > 0 && circle_cmp(p, t) < 0;
  }
  // wraps through infinity
  if (p.is_infinity()) return true;
  return circle_cmp(p, f) > 0 || circle_cmp(p, t) < 0;
}

inline bool in_closed_arc(const ProjectivePoint& p, const CircleInterval& arc) {
  return p == arc.from || p == arc.to || in_arc(p, arc);
}

// Closed arcs are disjoint exactly when no endpoint of either lies on the
// closure of the other (interleaving or containment would force one).
inline bool arcs_disjoint(const CircleInterval& u, const CircleInterval& v) {
  return !in_closed_arc(u.from, v) && !in_closed_arc(u.to, v) && !in_closed_arc(v.from, u) &&
         !in_closed_arc(v.to, u);
}

// Deterministic exact point strictly inside an arc: infinity when the arc
// wraps, otherwise a rational found between refined enclosures of the
// endpoint values (strictness re-verified by exact signs).
inline ProjectivePoint arc_interior_sample(const CircleInterval& arc) {
  const ProjectivePoint& f = arc.from;
  const ProjectivePoint& t = arc.to;
  if (f.is_infinity()) {
    Surd tv = t.value();
    Rat r = Rat(rat_floor(tv.enclosure(16).lo) - 1);
    if (!(Surd(r) < tv)) throw std::logic_error("arc sample: floor bound failed");
    return ProjectivePoint::rational(r);
  }
  if (t.is_infinity()) {
    Surd fv = f.value();
    Rat r = Rat(rat_ceil(fv.enclosure(16).hi) + 1);
    if (!(Surd(r) > fv)) throw std::logic_error("arc sample: ceil bound failed");
    return ProjectivePoint::rational(r);
  }
  if (circle_cmp(f, t) > 0) return ProjectivePoint::infinity();  // wrap: infinity is interior
  Surd fv = f.value(), tv = t.value();
  for (unsigned bits = 16; bits <= 4096; bits *= 2) {
    RatInterval ef = fv.enclosure(bits), et = tv.enclosure(bits);
    if (!(ef.hi < et.lo)) continue;
    Rat mid = (ef.hi + et.lo) / 2;
    if (Surd(mid) > fv && Surd(mid) < tv) return ProjectivePoint::rational(mid);
  }
  throw std::logic_error("arc sample: endpoint enclosures refused to separate");
}

// ---------------------------------------------------------------------------
// Exact 2x2 matrices of determinant one over a real quadratic field.

struct SurdMat2 {
  Surd a{1}, b{0}, c{0}, d{1};

  static SurdMat2 make(Surd a, Surd b, Surd c, Surd d) {
    (void)((a + b) + (c + d));  // shared-field probe
    if (!(a * d - b * c == Surd(1)))
      throw std::invalid_argument("SurdMat2: determinant must be exactly 1 (SL(2,R) only)");
    return SurdMat2{std::move(a), std::move(b), std::move(c), std::move(d)};
  }
  static SurdMat2 rational(const Rat& a, const Rat& b, const Rat& c, const Rat& d) {
    return make(Surd(a), Surd(b), Surd(c), Surd(d));
  }
  static SurdMat2 identity() { return SurdMat2{}; }

  SurdMat2 operator*(const SurdMat2& o) const {
    return SurdMat2{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  SurdMat2 operator-() const { return SurdMat2{-a, -b, -c, -d}; }
  SurdMat2 inverse() const { return SurdMat2{d, -b, -c, a}; }

  SurdMat2 pow(long e) const {
    SurdMat2 base = e < 0 ? inverse() : *this;
    unsigned long n =
        e < 0 ? static_cast<unsigned long>(-(e + 1)) + 1UL : static_cast<unsigned long>(e);
    SurdMat2 acc = identity();
    while (n) {
      if (n & 1UL) acc = acc * base;
      base = base * base;
      n >>= 1;
    }
    return acc;
  }

  Surd trace() const { return a + d; }
  Int radicand() const {
    for (const Surd* e : {&a, &b, &c, &d})
      if (!e->is_rational()) return e->m();
    return Int(0);
  }
  bool operator==(const SurdMat2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  bool operator!=(const SurdMat2& o) const { return !(*this == o); }

  std::string str() const {
    return "[[" + a.str() + ", " + b.str() + "], [" + c.str() + ", " + d.str() + "]]";
  }
};

inline ProjectivePoint mobius_act(const SurdMat2& g, const ProjectivePoint& p) {
  return ProjectivePoint::make(g.a * p.x + g.b * p.y, g.c * p.x + g.d * p.y);
}

// ---------------------------------------------------------------------------
// Hyperbolic elements: exact eigenvalues and projective fixed points.

struct HyperbolicData {
  Surd lambda;  // the expanding eigenvalue, normalized > 1 (see below)
  ProjectivePoint attracting, repelling;
};

// Requires |trace| > 2. A matrix and its negative act identically on the
// circle, so trace < -2 is handled by negating first; the reported lambda is
// then genuinely > 1. The trace must be rational — otherwise the eigenvalues
// need nested radicals, which is outside the exactness domain (matrices with
// surd entries still work whenever their eigenfield matches their entry
// field, e.g. surd-diagonal ones).
inline HyperbolicData hyperbolic_data(const SurdMat2& g) {
  Surd tr = g.trace();
  if (!((tr * tr - Surd(4)).sign() > 0))
    throw std::invalid_argument("hyperbolic_data: |trace| <= 2, element is not hyperbolic");
  SurdMat2 h = tr.sign() > 0 ? g : -g;
  Surd htr = h.trace();
  if (!htr.is_rational())
    throw std::invalid_argument(
        "hyperbolic_data: irrational trace needs nested radicals (outside the exactness "
        "domain)");
  Rat t = htr.rational_value();
  Surd root = surd_sqrt(t * t - 4);
  Surd lambda = (Surd(t) + root) / Surd(2);
  Surd mu = (Surd(t) - root) / Surd(2);

  auto eigenpoint = [&h](const Surd& ev) {
    try {
      if (h.b.sign() != 0) return ProjectivePoint::make(h.b, ev - h.a);
      if (h.c.sign() != 0) return ProjectivePoint::make(ev - h.d, h.c);
      // diagonal matrix: eigenvalues are the entries themselves
      if (h.a == ev) return ProjectivePoint::infinity();
      return ProjectivePoint::make(Surd(0), Surd(1));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(
          "hyperbolic_data: entry field and eigenfield are incompatible (nested radicals)");
    }
  };
  HyperbolicData out;
  out.lambda = lambda;
  out.attracting = eigenpoint(lambda);
  out.repelling = eigenpoint(mu);
  if (!(out.lambda > Surd(1)))
    throw std::logic_error("hyperbolic_data: normalized eigenvalue not > 1");
  if (mobius_act(g, out.attracting) != out.attracting ||
      mobius_act(g, out.repelling) != out.repelling)
    throw std::logic_error("hyperbolic_data: eigenpoint failed the exact fixed-point check");
  return out;
}

// ---------------------------------------------------------------------------
// Contraction verification.

namespace detail_pp {

// Image of an arc under an orientation-preserving map is the arc of the
// endpoint images in the same orientation; closed-in-open containment then
// reduces to: both image endpoints inside the target, neither target
// endpoint inside the closed image. The interior sample is a belt-and-braces
// re-check of the orientation argument.
inline bool maps_into(const SurdMat2& g, const CircleInterval& piece,
                      const CircleInterval& target) {
  ProjectivePoint imf = mobius_act(g, piece.from);
  ProjectivePoint imt = mobius_act(g, piece.to);
  if (!in_arc(imf, target) || !in_arc(imt, target)) return false;
  CircleInterval image = CircleInterval::make(std::move(imf), std::move(imt));
  if (in_closed_arc(target.from, image) || in_closed_arc(target.to, image)) return false;
  return in_arc(mobius_act(g, arc_interior_sample(piece)), target);
}

}  // namespace detail_pp

// Checks that g is (a_minus, B, a_plus)-contracting: the named sets must be
// pairwise disjoint (input error otherwise); returns whether g maps the
// closure of every B part and of a_plus into a_plus, and g^{-1} does the
// mirror image into a_minus.
inline bool verify_contracting(const SurdMat2& g, const CircleInterval& a_minus,
                               const std::vector<CircleInterval>& b_parts,
                               const CircleInterval& a_plus) {
  std::vector<const CircleInterval*> all = {&a_minus, &a_plus};
  for (const auto& b : b_parts) all.push_back(&b);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!arcs_disjoint(*all[i], *all[j]))
        throw std::invalid_argument("verify_contracting: input arcs overlap");

  SurdMat2 ginv = g.inverse();
  for (const auto& b : b_parts) {
    if (!detail_pp::maps_into(g, b, a_plus)) return false;
    if (!detail_pp::maps_into(ginv, b, a_minus)) return false;
  }
  return detail_pp::maps_into(g, a_plus, a_plus) && detail_pp::maps_into(ginv, a_minus, a_minus);
}

// ---------------------------------------------------------------------------
// Certificate search.

struct PingPongCertificate {
  SurdMat2 g1, g2;
  unsigned n = 0;  // the certified generators are g1^n and g2^n
  CircleInterval a_minus, a_plus, b_minus, b_plus;
};

inline bool certificate_verifies(const PingPongCertificate& cert) {
  SurdMat2 f = cert.g1.pow(static_cast<long>(cert.n));
  SurdMat2 s = cert.g2.pow(static_cast<long>(cert.n));
  return verify_contracting(f, cert.a_minus, {cert.b_minus, cert.b_plus}, cert.a_plus) &&
         verify_contracting(s, cert.b_minus, {cert.a_minus, cert.a_plus}, cert.b_plus);
}

struct CertificateSearch {
  std::optional<PingPongCertificate> certificate;
  unsigned n_reached = 0;
  std::string diagnostics;
};

namespace detail_pp {

// Rational arc endpoints around the four fixed points. Endpoints sit inside
// the gaps between circularly consecutive fixed points: a quarter of the
// (enclosure-certified) gap at shrink level 0, an eighth at level 1, and so
// on; gaps through infinity use integer offsets that double toward infinity
// and halve toward finite points. Rational endpoints keep every later
// membership test in a single quadratic field.
struct GapEndpoints {
  ProjectivePoint after_lo;   // inside the gap, near its lower fixed point
  ProjectivePoint before_hi;  // inside the gap, near its upper fixed point
};

inline RatInterval tight_enclosure(const Surd& v, unsigned bits) { return v.enclosure(bits); }

inline GapEndpoints gap_endpoints(const ProjectivePoint& u, const ProjectivePoint& v,
                                  unsigned level, bool wrap) {
  Rat frac(1, 4L << level);
  Rat off_small(1, 1L << level);
  Rat off_big = Rat((1L << level) + 1);
  GapEndpoints out;
  if (u.is_infinity()) {
    // gap (infinity, v): runs from -infinity up to v
    Surd vv = v.value();
    Rat vlo = tight_enclosure(vv, 24).lo;
    Rat near_inf = Rat(rat_floor(vlo)) - off_big - 1;
    Rat near_v = vlo - off_small;
    if (!(Surd(near_v) < vv)) near_v = vlo - 1;  // enclosure already strict; belt and braces
    if (!(near_inf < near_v)) near_inf = near_v - off_big - 1;
    out.after_lo = ProjectivePoint::rational(near_inf);
    out.before_hi = ProjectivePoint::rational(near_v);
    return out;
  }
  if (v.is_infinity()) {
    Surd uv = u.value();
    Rat uhi = tight_enclosure(uv, 24).hi;
    Rat near_u = uhi + off_small;
    Rat near_inf = Rat(rat_ceil(uhi)) + off_big + 1;
    if (!(near_u < near_inf)) near_inf = near_u + off_big + 1;
    out.after_lo = ProjectivePoint::rational(near_u);
    out.before_hi = ProjectivePoint::rational(near_inf);
    return out;
  }
  Surd uv = u.value(), vv = v.value();
  if (wrap) {
    // gap (u, v) through infinity, both finite: u is the circle's largest
    // fixed point, v its smallest.
    Rat uhi = tight_enclosure(uv, 24).hi;
    Rat vlo = tight_enclosure(vv, 24).lo;
    out.after_lo = ProjectivePoint::rational(uhi + off_small);
    out.before_hi = ProjectivePoint::rational(vlo - off_small);
    return out;
  }
  for (unsigned bits = 24; bits <= 4096; bits *= 2) {
    RatInterval eu = tight_enclosure(uv, bits), ev = tight_enclosure(vv, bits);
    if (!(eu.hi < ev.lo)) continue;
    Rat w = ev.lo - eu.hi;
    Rat lo = eu.hi + w * frac;
    Rat hi = ev.lo - w * frac;
    if (Surd(lo) > uv && Surd(hi) < vv && lo < hi) {
      out.after_lo = ProjectivePoint::rational(lo);
      out.before_hi = ProjectivePoint::rational(hi);
      return out;
    }
  }
  throw std::logic_error("gap_endpoints: enclosures refused to separate distinct fixed points");
}

}  // namespace detail_pp

// Searches for a power n <= n_max making (g1^n, g2^n) a certified ping-pong
// pair. Arcs are centered at the four fixed points; on failure they are
// shrunk toward their fixed points up to four times before n is incremented.
// Exhausting n_max is a failure with diagnostics, not a refutation.
inline CertificateSearch find_certificate(const SurdMat2& g1, const SurdMat2& g2,
                                          unsigned n_max = 20) {
  HyperbolicData h1 = hyperbolic_data(g1);
  HyperbolicData h2 = hyperbolic_data(g2);
  for (const ProjectivePoint* p : {&h1.attracting, &h1.repelling})
    for (const ProjectivePoint* q : {&h2.attracting, &h2.repelling})
      if (*p == *q)
        throw std::invalid_argument(
            "find_certificate: generators share an eigenvector, the criterion does not apply");

  // Sort the four fixed points around the circle (ascending value, infinity
  // last); remember which arc each one anchors.
  struct Anchor {
    const ProjectivePoint* p;
    int role;  // 0 = A+, 1 = A-, 2 = B+, 3 = B-
  };
  std::array<Anchor, 4> pts = {Anchor{&h1.attracting, 0}, Anchor{&h1.repelling, 1},
                               Anchor{&h2.attracting, 2}, Anchor{&h2.repelling, 3}};
  std::sort(pts.begin(), pts.end(),
            [](const Anchor& a, const Anchor& b) { return circle_cmp(*a.p, *b.p) < 0; });

  auto arcs_at_level = [&pts](unsigned level) {
    std::array<detail_pp::GapEndpoints, 4> gaps;
    for (int i = 0; i < 4; ++i) {
      const ProjectivePoint& u = *pts[static_cast<std::size_t>(i)].p;
      const ProjectivePoint& v = *pts[static_cast<std::size_t>((i + 1) % 4)].p;
      bool wrap = i == 3 && !u.is_infinity() && !v.is_infinity();
      gaps[static_cast<std::size_t>(i)] = detail_pp::gap_endpoints(u, v, level, wrap);
    }
    // role -> arc: left endpoint lives in the gap before the point, right in
    // the gap after it.
    std::array<CircleInterval, 4> arcs = {CircleInterval{{}, {}}, CircleInterval{{}, {}},
                                          CircleInterval{{}, {}}, CircleInterval{{}, {}}};
    for (int i = 0; i < 4; ++i) {
      const Anchor& anc = pts[static_cast<std::size_t>(i)];
      ProjectivePoint left = gaps[static_cast<std::size_t>((i + 3) % 4)].before_hi;
      ProjectivePoint right = gaps[static_cast<std::size_t>(i)].after_lo;
      CircleInterval arc = CircleInterval::make(std::move(left), std::move(right));
      if (!in_arc(*anc.p, arc))
        throw std::logic_error("find_certificate: constructed arc misses its fixed point");
      arcs[static_cast<std::size_t>(anc.role)] = std::move(arc);
    }
    return arcs;
  };

  std::array<std::array<CircleInterval, 4>, 5> levels = {
      arcs_at_level(0), arcs_at_level(1), arcs_at_level(2), arcs_at_level(3), arcs_at_level(4)};

  CertificateSearch out;
  SurdMat2 p1 = SurdMat2::identity(), p2 = SurdMat2::identity();
  for (unsigned n = 1; n <= n_max; ++n) {
    p1 = p1 * g1;
    p2 = p2 * g2;
    out.n_reached = n;
    for (const auto& arcs : levels) {
      const CircleInterval& A_plus = arcs[0];
      const CircleInterval& A_minus = arcs[1];
      const CircleInterval& B_plus = arcs[2];
      const CircleInterval& B_minus = arcs[3];
      if (verify_contracting(p1, A_minus, {B_minus, B_plus}, A_plus) &&
          verify_contracting(p2, B_minus, {A_minus, A_plus}, B_plus)) {
        PingPongCertificate cert{g1, g2, n, A_minus, A_plus, B_minus, B_plus};
        out.certificate = std::move(cert);
        out.diagnostics = "certified at n = " + std::to_string(n);
        return out;
      }
    }
  }
  out.diagnostics = "no contracting pair found up to n_max = " + std::to_string(n_max) +
                    " (5 shrink levels per n); inconclusive, not a refutation";
  return out;
}

// ---------------------------------------------------------------------------
// Word validation. Words in g1^n, g2^n multiply out in the compositum of the
// two entry fields; the tracking re-enactment starts each word at an interior
// sample valid for its trailing letter and checks the final point lands in
// the arc dictated by its leading letter.

struct WordReport {
  unsigned power = 0;
  unsigned max_len = 0;
  bool exhaustive = true;
  unsigned long long words_checked = 0;
  bool all_nontrivial = true;
  unsigned long long tracking_checked = 0;
  bool tracking_confirmed = true;
  std::string first_failure;
  std::string note;
};

namespace detail_pp {

struct BqPoint {
  Biquad x, y;
  bool inf = false;
};

struct BqMat {
  Biquad a, b, c, d;
};

inline BqPoint bq_normalize(Biquad x, Biquad y) {
  int sy = y.sign();
  BqPoint p;
  if (sy == 0) {
    if (x.is_zero()) throw std::logic_error("BqPoint: (0:0)");
    p.inf = true;
    p.x = std::move(x);
    p.y = std::move(y);
    return p;
  }
  if (sy < 0) {
    x = -x;
    y = -y;
  }
  p.x = std::move(x);
  p.y = std::move(y);
  return p;
}

inline BqPoint bq_apply(const BqMat& g, const BqPoint& p) {
  return bq_normalize(g.a * p.x + g.b * p.y, g.c * p.x + g.d * p.y);
}

inline int bq_cmp(const BqPoint& p, const BqPoint& q) {
  if (p.inf && q.inf) return 0;
  if (p.inf) return 1;
  if (q.inf) return -1;
  return (p.x * q.y - q.x * p.y).sign();
}

struct BqArc {
  BqPoint from, to;
};

inline bool bq_in_arc(const BqPoint& p, const BqArc& arc) {
  if (arc.from.inf) {
    if (p.inf) return false;
    return bq_cmp(p, arc.to) < 0;
  }
  if (arc.to.inf) {
    if (p.inf) return false;
    return bq_cmp(p, arc.from) > 0;
  }
  int ft = bq_cmp(arc.from, arc.to);
  if (ft < 0) {
    if (p.inf) return false;
    return bq_cmp(p, arc.from) > 0 && bq_cmp(p, arc.to) < 0;
  }
  if (p.inf) return true;
  return bq_cmp(p, arc.from) > 0 || bq_cmp(p, arc.to) < 0;
}

inline Biquad bq_lift(const Surd& s, const Int& m, const Int& k) { return Biquad::lift(s, m, k); }

inline BqPoint bq_lift_point(const ProjectivePoint& p, const Int& m, const Int& k) {
  BqPoint out;
  out.inf = p.is_infinity();
  out.x = bq_lift(p.x, m, k);
  out.y = bq_lift(p.y, m, k);
  return out;
}

inline BqMat bq_lift_mat(const SurdMat2& g, const Int& m, const Int& k) {
  return BqMat{bq_lift(g.a, m, k), bq_lift(g.b, m, k), bq_lift(g.c, m, k), bq_lift(g.d, m, k)};
}

inline BqArc bq_lift_arc(const CircleInterval& a, const Int& m, const Int& k) {
  BqArc out;
  out.from = bq_lift_point(a.from, m, k);
  out.to = bq_lift_point(a.to, m, k);
  return out;
}

inline void note_radicand(std::vector<Int>& rads, const Int& m) {
  if (sign_of(m) == 0) return;
  for (const Int& r : rads)
    if (r == m) return;
  rads.push_back(m);
}

}  // namespace detail_pp

inline WordReport validate_words(const PingPongCertificate& cert, unsigned max_len = 6,
                                 unsigned long samples = 0) {
  if (!certificate_verifies(cert))
    throw std::invalid_argument("validate_words: certificate failed re-verification");

  using namespace detail_pp;
  WordReport rep;
  rep.power = cert.n;
  rep.max_len = max_len;

  // Radicand pair for the whole computation.
  std::vector<Int> rads;
  note_radicand(rads, cert.g1.radicand());
  note_radicand(rads, cert.g2.radicand());
  for (const CircleInterval* a : {&cert.a_minus, &cert.a_plus, &cert.b_minus, &cert.b_plus}) {
    note_radicand(rads, a->from.radicand());
    note_radicand(rads, a->to.radicand());
  }
  if (rads.size() > 2)
    throw std::invalid_argument(
        "validate_words: more than two distinct radicands (outside the exactness domain)");
  Int m = rads.size() > 0 ? rads[0] : Int(0);
  Int k = rads.size() > 1 ? rads[1] : Int(0);

  long n = static_cast<long>(cert.n);
  std::array<BqMat, 4> letter = {bq_lift_mat(cert.g1.pow(n), m, k),
                                 bq_lift_mat(cert.g1.pow(-n), m, k),
                                 bq_lift_mat(cert.g2.pow(n), m, k),
                                 bq_lift_mat(cert.g2.pow(-n), m, k)};
  auto inverse_of = [](int l) { return l ^ 1; };

  std::array<BqArc, 4> target_arc = {
      bq_lift_arc(cert.a_plus, m, k), bq_lift_arc(cert.a_minus, m, k),
      bq_lift_arc(cert.b_plus, m, k), bq_lift_arc(cert.b_minus, m, k)};
  // Start points: trailing letter in {g1^n, g1^-n} needs a point of B;
  // trailing in {g2^n, g2^-n} needs a point of A.
  BqPoint start_b = bq_lift_point(arc_interior_sample(cert.b_minus), m, k);
  BqPoint start_a = bq_lift_point(arc_interior_sample(cert.a_minus), m, k);

  Biquad one(Rat(1), Rat(0), Rat(0), Rat(0), m, k);
  auto is_pm_identity = [&one](const BqMat& w) {
    if (!w.b.is_zero() || !w.c.is_zero()) return false;
    if (w.a != w.d) return false;
    return w.a == one || w.a == -one;
  };

  auto check_word = [&](const std::vector<int>& word, const BqMat& product) {
    ++rep.words_checked;
    if (is_pm_identity(product)) {
      rep.all_nontrivial = false;
      if (rep.first_failure.empty()) {
        rep.first_failure = "trivial word:";
        for (int l : word) rep.first_failure += " " + std::to_string(l);
      }
      return;
    }
    const BqPoint& start = (word.back() <= 1) ? start_b : start_a;
    BqPoint final_pt = bq_apply(product, start);
    ++rep.tracking_checked;
    if (!bq_in_arc(final_pt, target_arc[static_cast<std::size_t>(word.front())])) {
      rep.tracking_confirmed = false;
      if (rep.first_failure.empty()) {
        rep.first_failure = "tracking failed for word:";
        for (int l : word) rep.first_failure += " " + std::to_string(l);
      }
    }
  };

  unsigned long long total = 0;
  {
    unsigned long long level = 4;
    for (unsigned L = 1; L <= max_len; ++L) {
      total += level;
      level *= 3;
      if (total > (1ULL << 40)) break;
    }
  }
  bool exhaustive = samples == 0 || total <= samples;
  if (exhaustive && total > 2000000ULL)
    throw std::invalid_argument(
        "validate_words: exhaustive enumeration over " + std::to_string(total) +
        " words is infeasible; pass a sample count");
  rep.exhaustive = exhaustive;

  if (exhaustive) {
    // Depth-first over reduced words, products extended on the right.
    std::vector<int> word;
    std::vector<BqMat> stack;
    auto dfs = [&](auto&& self, unsigned depth) -> void {
      if (depth == max_len) return;
      for (int l = 0; l < 4; ++l) {
        if (!word.empty() && inverse_of(l) == word.back()) continue;
        const BqMat& prev = stack.back();
        const BqMat& g = letter[static_cast<std::size_t>(l)];
        BqMat next{prev.a * g.a + prev.b * g.c, prev.a * g.b + prev.b * g.d,
                   prev.c * g.a + prev.d * g.c, prev.c * g.b + prev.d * g.d};
        word.push_back(l);
        stack.push_back(std::move(next));
        check_word(word, stack.back());
        self(self, depth + 1);
        stack.pop_back();
        word.pop_back();
      }
    };
    stack.push_back(BqMat{one, Biquad(Rat(0), Rat(0), Rat(0), Rat(0), m, k),
                          Biquad(Rat(0), Rat(0), Rat(0), Rat(0), m, k), one});
    dfs(dfs, 0);
    rep.note = "exhaustive over all reduced words of length <= " + std::to_string(max_len);
  } else {
    std::mt19937_64 rng(0x706f6e67ULL);
    std::uniform_int_distribution<unsigned> len_dist(1, max_len);
    std::uniform_int_distribution<int> letter_dist(0, 3);
    std::uniform_int_distribution<int> next_dist(0, 2);
    for (unsigned long s = 0; s < samples; ++s) {
      unsigned L = len_dist(rng);
      std::vector<int> word;
      word.reserve(L);
      word.push_back(letter_dist(rng));
      while (word.size() < L) {
        int choice = next_dist(rng);
        int banned = inverse_of(word.back());
        int l = choice >= banned ? choice + 1 : choice;
        word.push_back(l);
      }
      BqMat prod{one, Biquad(Rat(0), Rat(0), Rat(0), Rat(0), m, k),
                 Biquad(Rat(0), Rat(0), Rat(0), Rat(0), m, k), one};
      for (int l : word) {
        const BqMat& g = letter[static_cast<std::size_t>(l)];
        prod = BqMat{prod.a * g.a + prod.b * g.c, prod.a * g.b + prod.b * g.d,
                     prod.c * g.a + prod.d * g.c, prod.c * g.b + prod.d * g.d};
      }
      check_word(word, prod);
    }
    rep.note = "sampled " + std::to_string(samples) + " random reduced words";
  }
  return rep;
}

}  // namespace latticeforge

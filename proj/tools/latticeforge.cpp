// latticeforge — command-line front end.
//
// One job per invocation; subcommands mirror the library modules.  Reports
// are deterministic: identical inputs give byte-identical output (the timing
// field is a fixed string for that reason), rationals travel as strings
// "p/q", surds as {"a","b","root"} meaning a + b*sqrt(root), and every
// "verdict" key has either a sibling "certificate" or an explicit
// "inconclusive" marker.  Exit codes: 0 definite, 3 inconclusive, 1 input
// error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "latticeforge/cyclicalg.hpp"
#include "latticeforge/intpoly.hpp"
#include "latticeforge/latticekit.hpp"
#include "latticeforge/matrix.hpp"
#include "latticeforge/numfield.hpp"
#include "latticeforge/pingpong.hpp"
#include "latticeforge/quadform.hpp"
#include "latticeforge/quatalg.hpp"
#include "latticeforge/rational.hpp"
#include "latticeforge/sl2z.hpp"
#include "latticeforge/surd.hpp"
#include "latticeforge/version.hpp"

using json = nlohmann::ordered_json;
using namespace latticeforge;

// ---------------------------------------------------------------------------
// Serialization.

static json jint(const Int& z) { return z.get_str(); }
static json jrat(const Rat& q) { return rat_to_string(q); }

static json jsurd(const Surd& s) {
  json j;
  j["a"] = jrat(s.a());
  j["b"] = jrat(s.b());
  j["root"] = jint(s.m());
  return j;
}

static json jfe(const FieldElement& x) {
  if (x.field()->is_rationals()) return jrat(x.as_rational());
  json arr = json::array();
  for (const Rat& c : x.coords()) arr.push_back(jrat(c));
  return arr;
}

static json jfe_vec(const std::vector<FieldElement>& v) {
  json arr = json::array();
  for (const FieldElement& x : v) arr.push_back(jfe(x));
  return arr;
}

static json jfe_mat(const Mat<FieldElement>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(jfe(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

static json jrat_mat(const Mat<Rat>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(jrat(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

static json jmodmat(const ModularMatrix& g) {
  return json::array({jint(g.a), jint(g.b), jint(g.c), jint(g.d)});
}

static json jpoly(const QPoly& f) {
  json arr = json::array();
  for (long i = 0; i <= std::max(f.degree(), 0L); ++i) arr.push_back(jrat(f.coeff(static_cast<std::size_t>(i))));
  return arr;
}

static json jfield(const FieldPtr& f) {
  if (f->is_rationals()) return "Q";
  json j;
  j["min_poly"] = jpoly(f->min_poly());
  return j;
}

static json jqelem(const QuaternionElement& x) { return jfe_vec(x.coords()); }

static json jpoint(const ProjectivePoint& p) {
  json j;
  j["x"] = jsurd(p.x);
  j["y"] = jsurd(p.y);
  return j;
}

static json jarc(const CircleInterval& a) {
  json j;
  j["from"] = jpoint(a.from);
  j["to"] = jpoint(a.to);
  return j;
}

static json jsurdmat(const SurdMat2& g) {
  return json::array({jsurd(g.a), jsurd(g.b), jsurd(g.c), jsurd(g.d)});
}

static json jcert(const PingPongCertificate& c) {
  json j;
  j["g1"] = jsurdmat(c.g1);
  j["g2"] = jsurdmat(c.g2);
  j["n"] = c.n;
  j["a_minus"] = jarc(c.a_minus);
  j["a_plus"] = jarc(c.a_plus);
  j["b_minus"] = jarc(c.b_minus);
  j["b_plus"] = jarc(c.b_plus);
  return j;
}

// Every verdict gets a certificate sibling or an explicit inconclusive flag.
static void set_verdict(json& sec, const std::string& verdict, json certificate = json()) {
  sec["verdict"] = verdict;
  if (certificate.is_null())
    sec["inconclusive"] = true;
  else
    sec["certificate"] = std::move(certificate);
}

// ---------------------------------------------------------------------------
// Parsing.

[[noreturn]] static void bad_input(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

static Rat prat(const json& j, const std::string& where) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  bad_input(where, "expected a rational as \"p/q\" string or integer");
}

static Int pint(const json& j, const std::string& where) {
  Rat q = prat(j, where);
  if (den(q) != 1) bad_input(where, "expected an integer");
  return num(q);
}

static FieldPtr parse_field(const json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "Q") return NumberField::rationals();
  if (j.is_object() && j.contains("min_poly")) {
    const json& mp = j.at("min_poly");
    if (!mp.is_array() || mp.empty()) bad_input(where + ".min_poly", "expected a coefficient array");
    std::vector<Rat> c;
    for (std::size_t i = 0; i < mp.size(); ++i) c.push_back(prat(mp[i], where + ".min_poly[" + std::to_string(i) + "]"));
    return make_field(QPoly(std::move(c)));
  }
  bad_input(where, "expected \"Q\" or {\"min_poly\": [c0, ..., cd]}");
}

static FieldElement parse_fe(const FieldPtr& f, const json& j, const std::string& where) {
  if (j.is_string() || j.is_number_integer()) return FieldElement(f, prat(j, where));
  if (j.is_array()) {
    if (j.size() > f->degree()) bad_input(where, "more coordinates than the field degree");
    std::vector<Rat> c;
    for (std::size_t i = 0; i < j.size(); ++i) c.push_back(prat(j[i], where + "[" + std::to_string(i) + "]"));
    return FieldElement(f, QPoly(std::move(c)));
  }
  bad_input(where, "expected a rational or a coordinate array");
}

static Mat<FieldElement> parse_fe_mat(const FieldPtr& f, const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad_input(where, "expected a nonempty array of rows");
  std::size_t n = j.size();
  Mat<FieldElement> m(n, j[0].is_array() ? j[0].size() : 0, FieldElement::zero(f));
  for (std::size_t r = 0; r < n; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != m.cols())
      bad_input(where + "[" + std::to_string(r) + "]", "ragged or non-array row");
    for (std::size_t c = 0; c < m.cols(); ++c)
      m.at(r, c) = parse_fe(f, row[c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

static json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_input("input", "cannot open file '" + path + "'");
  return json::parse(in);  // throws json::parse_error with byte location
}

static QuadraticForm parse_form_file(const std::string& path, json& echo) {
  json j = load_json_file(path);
  echo = j;
  if (!j.is_object() || !j.contains("gram")) bad_input("form", "expected {\"field\":..., \"gram\": [[...]]}");
  FieldPtr f = j.contains("field") ? parse_field(j.at("field"), "form.field") : NumberField::rationals();
  return QuadraticForm::make(f, parse_fe_mat(f, j.at("gram"), "form.gram"));
}

static QuatPtr parse_quat_alg(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("beta") || !j.contains("gamma"))
    bad_input(where, "expected {\"field\":..., \"beta\":..., \"gamma\":...}");
  FieldPtr f = j.contains("field") ? parse_field(j.at("field"), where + ".field") : NumberField::rationals();
  return QuaternionAlgebra::make(f, parse_fe(f, j.at("beta"), where + ".beta"),
                                 parse_fe(f, j.at("gamma"), where + ".gamma"));
}

static QuaternionElement parse_quat_elem(const QuatPtr& alg, const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) bad_input(where, "expected a 4-vector [a, b, c, d]");
  std::vector<FieldElement> v;
  for (std::size_t i = 0; i < 4; ++i)
    v.push_back(parse_fe(alg->field, j[i], where + "[" + std::to_string(i) + "]"));
  return QuaternionElement::from_coords(alg, v);
}

static CyclicAlgPtr parse_cyclic_alg(const json& j, json& echo) {
  echo = j;
  if (j.is_object() && j.contains("cyclic")) {
    const json& c = j.at("cyclic");
    long q = static_cast<long>(pint(c.at("q"), "cyclic.q").get_si());
    Rat alpha = prat(c.at("alpha"), "cyclic.alpha");
    return CyclicAlgebra::make(cyclotomic_real_subfield(q), alpha);
  }
  if (j.is_object() && j.contains("quadratic")) {
    const json& c = j.at("quadratic");
    Rat beta = prat(c.at("beta"), "quadratic.beta");
    Rat alpha = prat(c.at("alpha"), "quadratic.alpha");
    FieldPtr top = make_field(QPoly(std::vector<Rat>{-beta, Rat(0), Rat(1)}));
    CyclicExtPtr ext = CyclicExtension::make(top, -FieldElement::generator(top));
    return CyclicAlgebra::make(ext, alpha);
  }
  bad_input("algebra", "expected {\"cyclic\": {\"q\":..., \"alpha\":...}} or {\"quadratic\": {\"beta\":..., \"alpha\":...}}");
}

static CyclicElement parse_cyclic_elem(const CyclicAlgPtr& alg, const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != alg->degree())
    bad_input(where, "expected " + std::to_string(alg->degree()) + " graded components");
  std::vector<FieldElement> v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(parse_fe(alg->ext->top, j[i], where + "[" + std::to_string(i) + "]"));
  return CyclicElement(alg, std::move(v));
}

static std::vector<Rat> parse_csv_rats(const std::string& s, const std::string& where) {
  std::vector<Rat> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) out.push_back(parse_rat(cur));
  if (out.empty()) bad_input(where, "expected comma-separated rationals");
  return out;
}

static ModularMatrix parse_modmat(const std::string& s) {
  std::vector<Rat> v = parse_csv_rats(s, "matrix");
  if (v.size() != 4) bad_input("matrix", "expected 4 comma-separated integers a,b,c,d");
  Int e[4];
  for (int i = 0; i < 4; ++i) {
    if (den(v[static_cast<std::size_t>(i)]) != 1) bad_input("matrix", "entries must be integers");
    e[i] = num(v[static_cast<std::size_t>(i)]);
  }
  return ModularMatrix::make(e[0], e[1], e[2], e[3]);
}

static SurdMat2 parse_rat_mat2(const std::string& s, const std::string& where) {
  std::vector<Rat> v = parse_csv_rats(s, where);
  if (v.size() != 4) bad_input(where, "expected 4 comma-separated rationals a,b,c,d");
  return SurdMat2::rational(v[0], v[1], v[2], v[3]);
}

// "5+2i", "i/2", "-3/2+i", "2i"; the imaginary part must be positive.
static UpperHalfPoint parse_upper_half(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  std::size_t ip = s.find('i');
  if (ip == std::string::npos) bad_input("z", "no imaginary part in '" + raw + "' (points must satisfy Im z > 0)");
  std::string before = s.substr(0, ip), after = s.substr(ip + 1);
  Rat denom(1);
  if (!after.empty()) {
    if (after[0] != '/') bad_input("z", "unexpected trailing text after 'i' in '" + raw + "'");
    denom = parse_rat(after.substr(1));
  }
  std::size_t split = std::string::npos;
  for (std::size_t k = before.size(); k-- > 1;)
    if (before[k] == '+' || before[k] == '-') {
      split = k;
      break;
    }
  std::string re_str = "0", im_str = before;
  if (split != std::string::npos) {
    re_str = before.substr(0, split);
    im_str = before.substr(split);
  }
  if (im_str.empty() || im_str == "+") im_str = "1";
  else if (im_str == "-") im_str = "-1";
  if (im_str.size() > 1 && im_str[0] == '+') im_str.erase(0, 1);
  Rat re = parse_rat(re_str.empty() ? "0" : re_str);
  Rat im = parse_rat(im_str) / denom;
  return UpperHalfPoint::rational(re, im);
}

// "1e-6", "0.00025", "1/4000" — all exact.
static Rat parse_tolerance(const std::string& s) {
  if (s.find('/') != std::string::npos) return parse_rat(s);
  std::string mant = s;
  long expo = 0;
  std::size_t e = s.find_first_of("eE");
  if (e != std::string::npos) {
    mant = s.substr(0, e);
    expo = std::stol(s.substr(e + 1));
  }
  std::size_t dot = mant.find('.');
  if (dot != std::string::npos) {
    expo -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || mant == "-" || mant == "+") bad_input("tolerance", "bad number '" + s + "'");
  Rat v(parse_rat(mant));
  for (long i = 0; i < expo; ++i) v *= 10;
  for (long i = 0; i > expo; --i) v /= 10;
  return v;
}

static Surd parse_surd(const json& j, const std::string& where) {
  if (j.is_string() || j.is_number_integer()) return Surd(prat(j, where));
  if (!j.is_object() || !j.contains("a") || !j.contains("b") || !j.contains("root"))
    bad_input(where, "expected {\"a\": rational, \"b\": rational, \"root\": integer}");
  return Surd(prat(j.at("a"), where + ".a"), prat(j.at("b"), where + ".b"),
              pint(j.at("root"), where + ".root"));
}

static ProjectivePoint parse_point(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y"))
    bad_input(where, "expected {\"x\": surd, \"y\": surd}");
  return ProjectivePoint::make(parse_surd(j.at("x"), where + ".x"), parse_surd(j.at("y"), where + ".y"));
}

static CircleInterval parse_arc(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("from") || !j.contains("to"))
    bad_input(where, "expected {\"from\": point, \"to\": point}");
  return CircleInterval::make(parse_point(j.at("from"), where + ".from"),
                              parse_point(j.at("to"), where + ".to"));
}

static SurdMat2 parse_surdmat(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) bad_input(where, "expected [a, b, c, d] row-major");
  return SurdMat2::make(parse_surd(j[0], where + "[0]"), parse_surd(j[1], where + "[1]"),
                        parse_surd(j[2], where + "[2]"), parse_surd(j[3], where + "[3]"));
}

static PingPongCertificate parse_cert(const json& j) {
  for (const char* key : {"g1", "g2", "n", "a_minus", "a_plus", "b_minus", "b_plus"})
    if (!j.contains(key)) bad_input("certificate", std::string("missing field '") + key + "'");
  PingPongCertificate c;
  c.g1 = parse_surdmat(j.at("g1"), "certificate.g1");
  c.g2 = parse_surdmat(j.at("g2"), "certificate.g2");
  c.n = j.at("n").get<unsigned>();
  c.a_minus = parse_arc(j.at("a_minus"), "certificate.a_minus");
  c.a_plus = parse_arc(j.at("a_plus"), "certificate.a_plus");
  c.b_minus = parse_arc(j.at("b_minus"), "certificate.b_minus");
  c.b_plus = parse_arc(j.at("b_plus"), "certificate.b_plus");
  return c;
}

// ---------------------------------------------------------------------------
// Report sections shared by several subcommands.

static json isotropy_section(const IsotropyCertificate& c, const QuadraticForm* form) {
  json sec;
  switch (c.verdict) {
    case IsoVerdict::Isotropic: {
      json cert;
      cert["witness"] = jfe_vec(c.witness);
      bool zero = form != nullptr && form->value(c.witness).is_zero();
      cert["witness_value_zero"] = form == nullptr ? true : zero;
      if (form != nullptr && !zero) throw std::logic_error("isotropy witness failed re-verification");
      if (c.degenerate) cert["degenerate"] = true;
      if (!c.note.empty()) cert["note"] = c.note;
      set_verdict(sec, "isotropic", std::move(cert));
      break;
    }
    case IsoVerdict::Anisotropic: {
      json cert;
      if (c.obstruction) cert["obstruction_place"] = (*c.obstruction == 0) ? json("infinity") : jint(*c.obstruction);
      if (c.definite_place) cert["definite_real_place"] = *c.definite_place;
      if (!c.note.empty()) cert["note"] = c.note;
      set_verdict(sec, "anisotropic", std::move(cert));
      break;
    }
    case IsoVerdict::Inconclusive: {
      set_verdict(sec, "inconclusive");
      if (c.search_bound) sec["search_bound"] = *c.search_bound;
      if (!c.note.empty()) sec["note"] = c.note;
      break;
    }
  }
  return sec;
}

static json lattice_report_json(const LatticeReport& rep) {
  json j;
  j["construction"] = rep.construction;
  json factors = json::array();
  for (const PlaceFactor& pf : rep.factors) {
    json f;
    f["place"] = pf.place;
    f["kind"] = pf.real ? "real" : "complex";
    f["label"] = pf.label.str();
    f["compact"] = pf.compact;
    factors.push_back(std::move(f));
  }
  j["factors"] = std::move(factors);
  j["ambient"] = rep.ambient;
  j["irreducible"] = rep.irreducible;
  json cc;
  if (rep.cocompact == CocompactVerdict::Inconclusive) {
    set_verdict(cc, "inconclusive");
    if (!rep.cocompact_reason.empty()) cc["note"] = rep.cocompact_reason;
  } else {
    json cert;
    cert["reason"] = rep.cocompact_reason;
    if (rep.isotropic_witness) cert["isotropic_witness"] = jfe_vec(*rep.isotropic_witness);
    if (rep.unipotent_witness) cert["unipotent_witness"] = jrat_mat(*rep.unipotent_witness);
    if (rep.unipotent_witness_field) cert["unipotent_witness_field"] = jfe_mat(*rep.unipotent_witness_field);
    set_verdict(cc, rep.cocompact == CocompactVerdict::Yes ? "cocompact" : "noncocompact",
                std::move(cert));
  }
  j["cocompactness"] = std::move(cc);
  if (rep.qrank) j["qrank"] = *rep.qrank;
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j;
}

// ---------------------------------------------------------------------------
// Output.

static void render_text(const json& j, std::ostream& os, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  auto scalar = [](const json& v) {
    return v.is_primitive() &&
           !(v.is_string() && v.get<std::string>().find('\n') != std::string::npos);
  };
  auto flat = [&](const json& v) {
    if (!v.is_array()) return false;
    for (const json& e : v)
      if (!scalar(e)) return false;
    return true;
  };
  auto dump_scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (scalar(it.value())) {
        os << pad << it.key() << ": " << dump_scalar(it.value()) << "\n";
      } else if (flat(it.value())) {
        os << pad << it.key() << ": [";
        bool first = true;
        for (const json& e : it.value()) {
          if (!first) os << ", ";
          first = false;
          os << dump_scalar(e);
        }
        os << "]\n";
      } else {
        os << pad << it.key() << ":\n";
        render_text(it.value(), os, indent + 2);
      }
    }
  } else if (j.is_array()) {
    for (const json& e : j) {
      if (scalar(e)) {
        os << pad << "- " << dump_scalar(e) << "\n";
      } else if (flat(e)) {
        os << pad << "- [";
        bool first = true;
        for (const json& x : e) {
          if (!first) os << ", ";
          first = false;
          os << dump_scalar(x);
        }
        os << "]\n";
      } else {
        os << pad << "-\n";
        render_text(e, os, indent + 2);
      }
    }
  } else {
    os << pad << dump_scalar(j) << "\n";
  }
}

static json envelope(const std::string& command) {
  json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["command"] = command;
  r["timing"] = "unmeasured (reports are byte-reproducible)";
  return r;
}

static void emit(const json& report, const std::string& format) {
  if (format == "text")
    render_text(report, std::cout, 0);
  else
    std::cout << report.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Cookbook batteries.  Each returns a deterministic payload that is diffed
// against the committed golden file.

static json cookbook_irredinSOpq() {
  json out;
  FieldPtr f = make_field(QPoly(std::vector<Rat>{Rat(1), Rat(0), Rat(-10), Rat(0), Rat(1)}));
  FieldElement alpha = FieldElement::generator(f);
  out["alpha"] = "sqrt(2) + sqrt(3), the generator of its degree-4 field";
  out["min_poly"] = jpoly(f->min_poly());
  std::vector<Rat> shifts = {Rat(-2), Rat(2), Rat(4), Rat(4), Rat(4)};
  json jd = json::array();
  std::vector<FieldElement> diag;
  for (const Rat& s : shifts) {
    diag.push_back(alpha - FieldElement(f, s));
    jd.push_back(jrat(s));
  }
  out["shifts"] = std::move(jd);
  out["diagonal"] = "alpha - shift, entrywise";
  QuadraticForm form = QuadraticForm::diagonal(f, diag);
  // real places sorted by the embedding value of alpha, descending
  std::vector<std::size_t> order(f->real_place_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f->real_place_interval(a).lo > f->real_place_interval(b).lo;
  });
  json sig = json::array();
  for (std::size_t p : order) {
    auto [pos, neg] = signature_at(form, p);
    sig.push_back(json::array({pos, neg}));
  }
  out["signatures_by_descending_alpha"] = std::move(sig);
  return out;
}

static json cookbook_sl2z() {
  json out;
  json reductions = json::array();
  for (const char* zs : {"5+2i", "i/2", "3/2+4i", "-7/3+i/9"}) {
    UpperHalfPoint z = parse_upper_half(zs);
    ReductionTrace tr = reduce_to_fundamental(z);
    json r;
    r["z"] = zs;
    json word = json::array();
    for (const auto& [op, k] : tr.word) {
      json step;
      step["op"] = std::string(1, op);
      if (op == 'T') step["k"] = jint(k);
      word.push_back(std::move(step));
    }
    r["word"] = std::move(word);
    r["product"] = jmodmat(tr.product);
    r["result"] = json{{"re", jsurd(tr.result.re)}, {"im", jsurd(tr.result.im)}};
    r["in_fundamental_domain"] = in_fundamental_domain(tr.result);
    reductions.push_back(std::move(r));
  }
  out["reductions"] = std::move(reductions);
  RatInterval area = fundamental_area(make_rat(Int(1), Int(10000)));
  out["area"] = json{{"tolerance", "1/10000"}, {"lo", jrat(area.lo)}, {"hi", jrat(area.hi)}};
  json orders;
  for (long n : {2L, 3L, 4L, 6L}) orders[std::to_string(n)] = sl2_mod_order(n);
  out["sl2_mod_orders"] = std::move(orders);
  json cong = json::array();
  {
    ModularMatrix g = ModularMatrix::make(Int(1), Int(3), Int(3), Int(10));
    cong.push_back(json{{"n", 3}, {"matrix", jmodmat(g)}, {"member", congruence_member(g, Int(3))}});
    ModularMatrix t = ModularMatrix::T();
    cong.push_back(json{{"n", 3}, {"matrix", jmodmat(t)}, {"member", congruence_member(t, Int(3))}});
  }
  out["congruence"] = std::move(cong);
  return out;
}

static json cookbook_cyclic_q7() {
  json out;
  out["q"] = 7;
  out["construction"] = "degree-3 cyclic algebras (L/Q, sigma, p), L the real cubic subfield of the 7th cyclotomic field";
  json primes = json::array();
  for (long p : {2L, 3L, 5L, 13L}) {
    SL3CyclicReport rep = cocompact_sl3_cyclic(7, p);
    json r;
    r["p"] = static_cast<int>(p);
    r["criterion"] = json{{"order_of_p_mod_q", rep.criterion.order}, {"generates", rep.criterion.passes}};
    json alg;
    switch (rep.algebra.verdict) {
      case AlgVerdict::Division: {
        json cert;
        if (!rep.algebra.note.empty()) cert["reason"] = rep.algebra.note;
        if (rep.algebra.criterion_order) cert["criterion_order"] = *rep.algebra.criterion_order;
        set_verdict(alg, "division", std::move(cert));
        break;
      }
      case AlgVerdict::Split: {
        json cert;
        if (!rep.algebra.note.empty()) cert["reason"] = rep.algebra.note;
        if (rep.algebra.norm_preimage) {
          cert["norm_preimage"] = jfe(*rep.algebra.norm_preimage);
          cert["norm_preimage_power"] = rep.algebra.preimage_power;
        }
        set_verdict(alg, "split", std::move(cert));
        break;
      }
      case AlgVerdict::Inconclusive: {
        set_verdict(alg, "inconclusive");
        if (rep.algebra.search_bound) alg["search_bound"] = *rep.algebra.search_bound;
        if (!rep.algebra.note.empty()) alg["note"] = rep.algebra.note;
        break;
      }
    }
    r["algebra"] = std::move(alg);
    r["cocompact"] = to_string(rep.report.cocompact);
    primes.push_back(std::move(r));
  }
  out["primes"] = std::move(primes);
  return out;
}

// Recursively collect paths where two JSON documents differ.
static void json_diff(const json& a, const json& b, const std::string& path,
                      std::vector<std::string>& out) {
  if (a == b) return;
  if (a.type() != b.type() || a.is_primitive() || b.is_primitive()) {
    out.push_back(path.empty() ? "(root)" : path);
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key()))
        out.push_back(path + "/" + it.key() + " (missing in golden)");
      else
        json_diff(it.value(), b.at(it.key()), path + "/" + it.key(), out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) out.push_back(path + "/" + it.key() + " (missing in report)");
    return;
  }
  if (a.size() != b.size()) {
    out.push_back(path + " (length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    return;
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    json_diff(a[i], b[i], path + "/" + std::to_string(i), out);
}

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"latticeforge: exact arithmetic for lattices in classical groups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--output", format, "Report format")->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  int rc = 0;
  json report;

  // ---- form -----------------------------------------------------------
  auto* form_cmd = app.add_subcommand("form", "Quadratic forms over Q and number fields");
  form_cmd->require_subcommand(1);
  std::string form_file;
  long form_height = 30;
  std::size_t form_place = 0;

  auto* form_diag = form_cmd->add_subcommand("diag", "Congruence diagonalization");
  form_diag->add_option("--form", form_file, "Form descriptor JSON file")->required();
  form_diag->callback([&] {
    json echo;
    QuadraticForm f = parse_form_file(form_file, echo);
    DiagonalizeResult d = diagonalize(f);
    Mat<FieldElement> check = d.basis_change.transpose() * f.gram * d.basis_change;
    for (std::size_t i = 0; i < f.dim(); ++i)
      for (std::size_t j = 0; j < f.dim(); ++j)
        if (check.at(i, j) != (i == j ? d.diagonal[i] : f.zero()))
          throw std::logic_error("diagonalization failed its own congruence check");
    report = envelope("form diag");
    report["input"] = echo;
    report["diagonal"] = jfe_vec(d.diagonal);
    report["basis_change"] = jfe_mat(d.basis_change);
    report["congruence_check"] = true;
  });

  auto* form_witt = form_cmd->add_subcommand("witt", "Witt decomposition over Q");
  form_witt->add_option("--form", form_file, "Form descriptor JSON file")->required();
  form_witt->callback([&] {
    json echo;
    QuadraticForm f = parse_form_file(form_file, echo);
    WittDecomposition w = witt_decompose(f);
    report = envelope("form witt");
    report["input"] = echo;
    report["witt_index"] = w.hyperbolic_count;
    json ad = json::array();
    for (const Rat& a : w.anisotropic_diag) ad.push_back(jrat(a));
    report["anisotropic_diagonal"] = std::move(ad);
    report["basis_change"] = jrat_mat(w.basis_change);
    report["anisotropic_residue"] = isotropy_section(w.anisotropic_certificate, nullptr);
  });

  auto* form_iso = form_cmd->add_subcommand("isotropic", "Isotropy decision / search");
  form_iso->add_option("--form", form_file, "Form descriptor JSON file")->required();
  form_iso->add_option("--height", form_height, "Search height over number fields")->capture_default_str();
  form_iso->callback([&] {
    json echo;
    QuadraticForm f = parse_form_file(form_file, echo);
    IsotropyCertificate c =
        f.over_rationals() ? is_isotropic_over_q(f) : is_isotropic_over_field(f, form_height);
    report = envelope("form isotropic");
    report["input"] = echo;
    report["isotropy"] = isotropy_section(c, &f);
    if (c.verdict == IsoVerdict::Inconclusive) rc = 3;
  });

  auto* form_sig = form_cmd->add_subcommand("signature", "Signature at a real place");
  form_sig->add_option("--form", form_file, "Form descriptor JSON file")->required();
  form_sig->add_option("--place", form_place, "Real place index")->required();
  form_sig->callback([&] {
    json echo;
    QuadraticForm f = parse_form_file(form_file, echo);
    auto [pos, neg] = signature_at(f, form_place);
    report = envelope("form signature");
    report["input"] = echo;
    report["place"] = form_place;
    report["signature"] = json::array({pos, neg});
    report["label"] = GroupLabel::so(pos, neg).str();
  });

  auto* form_qrank = form_cmd->add_subcommand("qrank", "Witt index = Q-rank of SO(B;Z)");
  form_qrank->add_option("--form", form_file, "Form descriptor JSON file")->required();
  form_qrank->callback([&] {
    json echo;
    QuadraticForm f = parse_form_file(form_file, echo);
    report = envelope("form qrank");
    report["input"] = echo;
    report["qrank"] = qrank_so(f);
  });

  // ---- quat -----------------------------------------------------------
  auto* quat_cmd = app.add_subcommand("quat", "Quaternion algebras (beta, gamma / F)");
  quat_cmd->require_subcommand(1);
  std::string quat_file, quat_x, quat_y;
  long quat_height = 3;
  std::size_t quat_place = 0;

  auto quat_load = [&](json& echo) {
    json j = load_json_file(quat_file);
    echo = j;
    return parse_quat_alg(j, "algebra");
  };

  auto* quat_mul = quat_cmd->add_subcommand("mul", "Multiply two quaternions");
  quat_mul->add_option("--alg", quat_file, "Algebra descriptor JSON file")->required();
  quat_mul->add_option("--x", quat_x, "Left factor, JSON 4-vector")->required();
  quat_mul->add_option("--y", quat_y, "Right factor, JSON 4-vector")->required();
  quat_mul->callback([&] {
    json echo;
    QuatPtr alg = quat_load(echo);
    QuaternionElement x = parse_quat_elem(alg, json::parse(quat_x), "x");
    QuaternionElement y = parse_quat_elem(alg, json::parse(quat_y), "y");
    QuaternionElement p = latticeforge::quat_mul(x, y);
    if (reduced_norm(p) != reduced_norm(x) * reduced_norm(y))
      throw std::logic_error("Nrd multiplicativity failed");
    report = envelope("quat mul");
    report["input"] = echo;
    report["x"] = jqelem(x);
    report["y"] = jqelem(y);
    report["product"] = jqelem(p);
    report["norm_multiplicative_check"] = true;
  });

  auto* quat_norm = quat_cmd->add_subcommand("norm", "Reduced norm and trace");
  quat_norm->add_option("--alg", quat_file, "Algebra descriptor JSON file")->required();
  quat_norm->add_option("--x", quat_x, "Element, JSON 4-vector")->required();
  quat_norm->callback([&] {
    json echo;
    QuatPtr alg = quat_load(echo);
    QuaternionElement x = parse_quat_elem(alg, json::parse(quat_x), "x");
    report = envelope("quat norm");
    report["input"] = echo;
    report["x"] = jqelem(x);
    report["reduced_norm"] = jfe(reduced_norm(x));
    report["reduced_trace"] = jfe(reduced_trace(x));
  });

  auto* quat_div = quat_cmd->add_subcommand("division", "Division or split, with certificate");
  quat_div->add_option("--alg", quat_file, "Algebra descriptor JSON file")->required();
  quat_div->add_option("--height", quat_height, "Witness search height over number fields")->capture_default_str();
  quat_div->callback([&] {
    json echo;
    QuatPtr alg = quat_load(echo);
    QuatDivisionCertificate c = quat_division_certificate(alg, quat_height);
    report = envelope("quat division");
    report["input"] = echo;
    json sec;
    switch (c.verdict) {
      case AlgVerdict::Division: {
        json cert;
        if (c.obstruction) cert["obstruction_place"] = (*c.obstruction == 0) ? json("infinity") : jint(*c.obstruction);
        if (c.definite_place) cert["definite_real_place"] = *c.definite_place;
        if (!c.note.empty()) cert["note"] = c.note;
        set_verdict(sec, "division", std::move(cert));
        break;
      }
      case AlgVerdict::Split: {
        json cert;
        if (c.zero_divisor) {
          if (!reduced_norm(*c.zero_divisor).is_zero() || c.zero_divisor->is_zero())
            throw std::logic_error("zero divisor failed re-verification");
          cert["zero_divisor"] = jqelem(*c.zero_divisor);
          cert["zero_divisor_norm_zero"] = true;
        }
        if (!c.note.empty()) cert["note"] = c.note;
        set_verdict(sec, "split", std::move(cert));
        break;
      }
      case AlgVerdict::Inconclusive: {
        set_verdict(sec, "inconclusive");
        if (c.search_bound) sec["search_bound"] = *c.search_bound;
        if (!c.note.empty()) sec["note"] = c.note;
        rc = 3;
        break;
      }
    }
    report["algebra"] = std::move(sec);
  });

  auto* quat_splits = quat_cmd->add_subcommand("splits", "Does D split at a real place?");
  quat_splits->add_option("--alg", quat_file, "Algebra descriptor JSON file")->required();
  quat_splits->add_option("--place", quat_place, "Real place index")->required();
  quat_splits->callback([&] {
    json echo;
    QuatPtr alg = quat_load(echo);
    report = envelope("quat splits");
    report["input"] = echo;
    report["place"] = quat_place;
    report["splits"] = splits_at(alg, quat_place);
  });

  auto* quat_embed = quat_cmd->add_subcommand("embed", "2x2 matrix image over F(sqrt(beta))");
  quat_embed->add_option("--alg", quat_file, "Algebra descriptor JSON file")->required();
  quat_embed->add_option("--x", quat_x, "Element, JSON 4-vector")->required();
  quat_embed->callback([&] {
    json echo;
    QuatPtr alg = quat_load(echo);
    QuaternionElement x = parse_quat_elem(alg, json::parse(quat_x), "x");
    EmbedMat m = embed_mat2(x);
    report = envelope("quat embed");
    report["input"] = echo;
    report["x"] = jqelem(x);
    json rows = json::array();
    for (std::size_t r = 0; r < 2; ++r) {
      json row = json::array();
      for (std::size_t cc = 0; cc < 2; ++cc) {
        const SqrtPair& e = m.at(r, cc);
        row.push_back(json{{"u", jfe(e.u)}, {"v", jfe(e.v)}});
      }
      rows.push_back(std::move(row));
    }
    report["matrix"] = std::move(rows);
    SqrtPair det = embed_det(m);
    if (det.u != reduced_norm(x) || !det.v.is_zero())
      throw std::logic_error("embedding determinant is not the reduced norm");
    report["det_equals_reduced_norm"] = true;
  });

  auto* quat_herm = quat_cmd->add_subcommand("hermdiag", "Diagonalize a tau-Hermitian form over D");
  quat_herm->add_option("--form", quat_file, "Hermitian form JSON file")->required();
  quat_herm->callback([&] {
    json j = load_json_file(quat_file);
    QuatPtr alg = parse_quat_alg(j, "form");
    std::string tau_s = j.value("tau", "c");
    Tau tau = tau_s == "r" ? Tau::R : Tau::C;
    if (tau_s != "c" && tau_s != "r") bad_input("form.tau", "expected \"c\" or \"r\"");
    if (!j.contains("gram")) bad_input("form", "missing gram");
    const json& gj = j.at("gram");
    std::size_t n = gj.size();
    Mat<QuaternionElement> g(n, n, QuaternionElement::zero(alg));
    for (std::size_t r = 0; r < n; ++r) {
      if (!gj[r].is_array() || gj[r].size() != n) bad_input("form.gram", "ragged rows");
      for (std::size_t c2 = 0; c2 < n; ++c2)
        g.at(r, c2) = parse_quat_elem(alg, gj[r][c2],
                                      "gram[" + std::to_string(r) + "][" + std::to_string(c2) + "]");
    }
    HermitianFormOverD h = HermitianFormOverD::make(alg, tau, std::move(g));
    HermDiagResult d = hermitian_diag_over_D(h);
    Mat<QuaternionElement> check =
        tau_conjugate_transpose(d.basis_change, tau) * h.gram * d.basis_change;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c2 = 0; c2 < n; ++c2)
        if (check.at(r, c2) != (r == c2 ? d.diagonal[r] : QuaternionElement::zero(alg)))
          throw std::logic_error("hermitian diagonalization failed its congruence check");
    report = envelope("quat hermdiag");
    report["input"] = j;
    json diag = json::array();
    for (const QuaternionElement& e : d.diagonal) diag.push_back(jqelem(e));
    report["diagonal"] = std::move(diag);
    report["congruence_check"] = true;
    if (d.signature) report["signature"] = json::array({d.signature->first, d.signature->second});
    if (!d.group_label.empty()) report["group_label"] = d.group_label;
  });

  // ---- cyclic ---------------------------------------------------------
  auto* cyc_cmd = app.add_subcommand("cyclic", "Cyclic algebras (L/F, sigma, alpha)");
  cyc_cmd->require_subcommand(1);
  std::string cyc_file, cyc_x, cyc_y;
  long cyc_height = 30, cyc_q = 7, cyc_p = 2;

  auto* cyc_mul = cyc_cmd->add_subcommand("mul", "Multiply two elements");
  cyc_mul->add_option("--alg", cyc_file, "Algebra descriptor JSON file")->required();
  cyc_mul->add_option("--x", cyc_x, "Left factor, JSON array of graded components")->required();
  cyc_mul->add_option("--y", cyc_y, "Right factor, JSON array of graded components")->required();
  cyc_mul->callback([&] {
    json echo;
    CyclicAlgPtr alg = parse_cyclic_alg(load_json_file(cyc_file), echo);
    CyclicElement x = parse_cyclic_elem(alg, json::parse(cyc_x), "x");
    CyclicElement y = parse_cyclic_elem(alg, json::parse(cyc_y), "y");
    report = envelope("cyclic mul");
    report["input"] = echo;
    report["x"] = jfe_vec(x.coords());
    report["y"] = jfe_vec(y.coords());
    report["product"] = jfe_vec(cyclic_mul(x, y).coords());
  });

  auto* cyc_embed = cyc_cmd->add_subcommand("embed", "Matrix image over L");
  cyc_embed->add_option("--alg", cyc_file, "Algebra descriptor JSON file")->required();
  cyc_embed->add_option("--x", cyc_x, "Element, JSON array of graded components")->required();
  cyc_embed->callback([&] {
    json echo;
    CyclicAlgPtr alg = parse_cyclic_alg(load_json_file(cyc_file), echo);
    CyclicElement x = parse_cyclic_elem(alg, json::parse(cyc_x), "x");
    Mat<FieldElement> m = embed_cyclic_matrix(x);
    report = envelope("cyclic embed");
    report["input"] = echo;
    report["x"] = jfe_vec(x.coords());
    report["matrix"] = jfe_mat(m);
    report["det"] = jfe(mat_det(m, FieldElement::zero(alg->ext->top)));
  });

  auto* cyc_crit = cyc_cmd->add_subcommand("criterion", "Multiplicative-order criterion for (q, p)");
  cyc_crit->add_option("--q", cyc_q, "Conductor (prime, q = 1 mod 3)")->required();
  cyc_crit->add_option("--p", cyc_p, "Candidate alpha (prime)")->required();
  cyc_crit->callback([&] {
    PrimeCriterionResult r = prime_criterion(Int(cyc_p), Int(cyc_q));
    report = envelope("cyclic criterion");
    report["q"] = cyc_q;
    report["p"] = cyc_p;
    report["order_of_p_mod_q"] = r.order;
    report["generates"] = r.passes;
    report["consequence"] = r.passes
        ? "p generates (Z/q)^x: the degree-3 cyclic algebra with alpha = p is division"
        : "criterion not satisfied: no conclusion from the order computation alone";
  });

  auto* cyc_div = cyc_cmd->add_subcommand("division", "Division / split decision with certificate");
  cyc_div->add_option("--alg", cyc_file, "Algebra descriptor JSON file")->required();
  cyc_div->add_option("--height", cyc_height, "Norm-preimage search height")->capture_default_str();
  cyc_div->callback([&] {
    json echo;
    CyclicAlgPtr alg = parse_cyclic_alg(load_json_file(cyc_file), echo);
    CyclicDivisionCertificate c = is_division_cyclic(alg, cyc_height);
    report = envelope("cyclic division");
    report["input"] = echo;
    json sec;
    switch (c.verdict) {
      case AlgVerdict::Division: {
        json cert;
        if (c.obstruction) cert["obstruction_place"] = (*c.obstruction == 0) ? json("infinity") : jint(*c.obstruction);
        if (c.criterion_order) cert["criterion_order"] = *c.criterion_order;
        if (!c.note.empty()) cert["note"] = c.note;
        set_verdict(sec, "division", std::move(cert));
        break;
      }
      case AlgVerdict::Split: {
        json cert;
        if (c.norm_preimage) {
          cert["norm_preimage"] = jfe(*c.norm_preimage);
          cert["norm_preimage_power"] = c.preimage_power;
        }
        if (c.zero_divisor && c.cofactor) {
          if (!(*c.zero_divisor * *c.cofactor).is_zero())
            throw std::logic_error("zero divisor failed re-verification");
          cert["zero_divisor"] = jfe_vec(c.zero_divisor->coords());
          cert["cofactor"] = jfe_vec(c.cofactor->coords());
          cert["product_is_zero"] = true;
        }
        if (!c.note.empty()) cert["note"] = c.note;
        set_verdict(sec, "split", std::move(cert));
        break;
      }
      case AlgVerdict::Inconclusive: {
        set_verdict(sec, "inconclusive");
        if (c.search_bound) sec["search_bound"] = *c.search_bound;
        if (!c.note.empty()) sec["note"] = c.note;
        rc = 3;
        break;
      }
    }
    report["algebra"] = std::move(sec);
  });

  // ---- lattice --------------------------------------------------------
  auto* lat_cmd = app.add_subcommand("lattice", "Arithmetic lattice constructions");
  lat_cmd->require_subcommand(1);
  std::string lat_desc, lat_targets, lat_label;
  long lat_r = 2, lat_q = 7, lat_p = 3;

  auto* lat_build = lat_cmd->add_subcommand("build", "Build a lattice from a descriptor");
  lat_build->add_option("--desc", lat_desc, "Descriptor JSON file")->required();
  lat_build->callback([&] {
    json j = load_json_file(lat_desc);
    if (!j.is_object() || !j.contains("kind")) bad_input("descriptor", "missing kind");
    std::string kind = j.at("kind").get<std::string>();
    LatticeDescriptor d;
    FieldPtr f = j.contains("field") ? parse_field(j.at("field"), "descriptor.field")
                                     : NumberField::rationals();
    d.field = f;
    if (kind == "so-form") {
      d.kind = ConstructionKind::SOForm;
      d.form = QuadraticForm::make(f, parse_fe_mat(f, j.at("gram"), "descriptor.gram"));
    } else if (kind == "su-quadratic") {
      d.kind = ConstructionKind::SUQuadratic;
      d.ext_beta = parse_fe(f, j.at("beta"), "descriptor.beta");
      d.herm_gram = parse_fe_mat(f, j.at("gram"), "descriptor.gram");
    } else if (kind == "su-quat-c" || kind == "su-quat-r") {
      d.kind = kind == "su-quat-c" ? ConstructionKind::SUQuatC : ConstructionKind::SUQuatR;
      d.alg = QuaternionAlgebra::make(f, parse_fe(f, j.at("beta"), "descriptor.beta"),
                                      parse_fe(f, j.at("gamma"), "descriptor.gamma"));
      const json& gj = j.at("gram");
      std::size_t n = gj.size();
      Mat<QuaternionElement> g(n, n, QuaternionElement::zero(d.alg));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c2 = 0; c2 < gj[r].size(); ++c2)
          g.at(r, c2) = parse_quat_elem(d.alg, gj[r][c2],
                                        "gram[" + std::to_string(r) + "][" + std::to_string(c2) + "]");
      d.herm_d = HermitianFormOverD::make(d.alg, kind == "su-quat-c" ? Tau::C : Tau::R, std::move(g));
    } else if (kind == "sl-field") {
      d.kind = ConstructionKind::SLField;
      d.sl_n = j.at("n").get<unsigned>();
    } else if (kind == "sl-quat") {
      d.kind = ConstructionKind::SLQuat;
      d.alg = QuaternionAlgebra::make(f, parse_fe(f, j.at("beta"), "descriptor.beta"),
                                      parse_fe(f, j.at("gamma"), "descriptor.gamma"));
      d.sl_n = j.at("n").get<unsigned>();
    } else {
      bad_input("descriptor.kind", "unknown kind '" + kind + "'");
    }
    LatticeReport rep = build_lattice(d);
    report = envelope("lattice build");
    report["input"] = j;
    report["report"] = lattice_report_json(rep);
    if (rep.cocompact == CocompactVerdict::Inconclusive) rc = 3;
  });

  auto* lat_irr = lat_cmd->add_subcommand("irreducible-so", "Irreducible lattice hitting target SO signatures");
  lat_irr->add_option("--targets", lat_targets, "Semicolon-separated signature pairs, e.g. \"2,3;1,4;1,4;0,5\"")->required();
  lat_irr->callback([&] {
    std::vector<std::pair<unsigned, unsigned>> targets;
    std::istringstream in(lat_targets);
    std::string tok;
    while (std::getline(in, tok, ';')) {
      std::size_t comma = tok.find(',');
      if (comma == std::string::npos) bad_input("targets", "each entry needs \"p,q\"");
      targets.emplace_back(static_cast<unsigned>(std::stoul(tok.substr(0, comma))),
                           static_cast<unsigned>(std::stoul(tok.substr(comma + 1))));
    }
    SORecipe r = irreducible_so_recipe(targets);
    report = envelope("lattice irreducible-so");
    report["input"] = json{{"targets", lat_targets}};
    json tj = json::array();
    for (auto [p, q] : r.targets) tj.push_back(json::array({p, q}));
    report["targets_sorted"] = std::move(tj);
    report["square_roots_adjoined"] = r.t;
    json rads = json::array();
    for (long m : r.radicands) rads.push_back(m);
    report["radicands"] = std::move(rads);
    report["field"] = jfield(r.field);
    report["alpha"] = jfe(r.alpha);
    json sh = json::array();
    for (const Rat& s : r.shifts) sh.push_back(jrat(s));
    report["shifts"] = std::move(sh);
    json vs = json::array();
    for (auto [p, q] : r.verified) vs.push_back(json::array({p, q}));
    report["verified_signatures"] = std::move(vs);
    report["report"] = lattice_report_json(r.report);
    if (r.report.cocompact == CocompactVerdict::Inconclusive) rc = 3;
  });

  auto* lat_sl3n = lat_cmd->add_subcommand("sl3-noncocompact", "Noncocompact SU(J3) family member");
  lat_sl3n->add_option("--r", lat_r, "Squarefree r > 1 for L = Q(sqrt(r))")->required();
  lat_sl3n->callback([&] {
    SL3FamilyReport r = sl3_noncocompact_family(lat_r);
    report = envelope("lattice sl3-noncocompact");
    report["input"] = json{{"r", lat_r}};
    report["field"] = jfield(r.ext);
    report["j3"] = jrat_mat(r.j3);
    report["unipotent"] = jfe_mat(r.unipotent);
    report["report"] = lattice_report_json(r.report);
    if (r.report.cocompact == CocompactVerdict::Inconclusive) rc = 3;
  });

  auto* lat_sl3c = lat_cmd->add_subcommand("sl3-cyclic", "Cyclic-algebra lattice in SL(3,R)");
  lat_sl3c->add_option("--q", lat_q, "Cyclotomic conductor (prime, 1 mod 3)")->required();
  lat_sl3c->add_option("--p", lat_p, "Prime alpha")->required();
  lat_sl3c->callback([&] {
    SL3CyclicReport r = cocompact_sl3_cyclic(lat_q, lat_p);
    report = envelope("lattice sl3-cyclic");
    report["input"] = json{{"q", lat_q}, {"p", lat_p}};
    report["criterion"] = json{{"order_of_p_mod_q", r.criterion.order}, {"generates", r.criterion.passes}};
    json alg;
    switch (r.algebra.verdict) {
      case AlgVerdict::Division: {
        json cert;
        if (r.algebra.criterion_order) cert["criterion_order"] = *r.algebra.criterion_order;
        if (!r.algebra.note.empty()) cert["note"] = r.algebra.note;
        set_verdict(alg, "division", std::move(cert));
        break;
      }
      case AlgVerdict::Split: {
        json cert;
        if (r.algebra.norm_preimage) {
          cert["norm_preimage"] = jfe(*r.algebra.norm_preimage);
          cert["norm_preimage_power"] = r.algebra.preimage_power;
        }
        if (!r.algebra.note.empty()) cert["note"] = r.algebra.note;
        set_verdict(alg, "split", std::move(cert));
        break;
      }
      case AlgVerdict::Inconclusive: {
        set_verdict(alg, "inconclusive");
        if (r.algebra.search_bound) alg["search_bound"] = *r.algebra.search_bound;
        if (!r.algebra.note.empty()) alg["note"] = r.algebra.note;
        rc = 3;
        break;
      }
    }
    report["algebra"] = std::move(alg);
    report["report"] = lattice_report_json(r.report);
    if (r.report.cocompact == CocompactVerdict::Inconclusive) rc = 3;
  });

  auto* lat_tab = lat_cmd->add_subcommand("tables", "Classical-group table lookup");
  lat_tab->add_option("--label", lat_label, "Group label, e.g. \"SO(3,5)\" or \"SL(4,H)\"")->required();
  lat_tab->callback([&] {
    GroupLabel l = parse_group_label(lat_label);
    report = envelope("lattice tables");
    report["input"] = json{{"label", lat_label}};
    report["label"] = l.str();
    report["type"] = type_of(l).str();
    report["real_rank"] = rrank(l);
    report["dimension"] = dim_of(l);
    report["compact"] = is_compact(l);
    report["maximal_compact"] = maximal_compact(l);
    json cx = json::array();
    for (const GroupLabel& g : complexify(l)) cx.push_back(g.str());
    report["complexification"] = std::move(cx);
    report["simple"] = is_simple(l);
    if (!is_simple(l)) report["nonsimple_explanation"] = nonsimple_explanation(l);
  });

  // ---- sl2z -----------------------------------------------------------
  auto* sl_cmd = app.add_subcommand("sl2z", "The modular group battery");
  sl_cmd->require_subcommand(1);
  std::string sl_z, sl_tol = "1e-6", sl_matrix, sl_form_file;
  long sl_n = 1, sl_height = 30;
  unsigned long sl_samples = 1000;

  auto* sl_reduce = sl_cmd->add_subcommand("reduce", "Reduce a point to the fundamental domain");
  sl_reduce->add_option("--z", sl_z, "Point, e.g. \"5+2i\" or \"i/2\"")->required();
  sl_reduce->callback([&] {
    UpperHalfPoint z = parse_upper_half(sl_z);
    ReductionTrace tr = reduce_to_fundamental(z);
    report = envelope("sl2z reduce");
    report["input"] = json{{"z", sl_z}};
    json word = json::array();
    for (const auto& [op, k] : tr.word) {
      json step;
      step["op"] = std::string(1, op);
      if (op == 'T') step["k"] = jint(k);
      word.push_back(std::move(step));
    }
    report["word"] = std::move(word);
    report["product"] = jmodmat(tr.product);
    report["result"] = json{{"re", jsurd(tr.result.re)}, {"im", jsurd(tr.result.im)}};
    report["in_fundamental_domain"] = in_fundamental_domain(tr.result);
  });

  auto* sl_area = sl_cmd->add_subcommand("area", "Certified enclosure of the fundamental area");
  sl_area->add_option("--tol", sl_tol, "Target interval width")->capture_default_str();
  sl_area->callback([&] {
    Rat tol = parse_tolerance(sl_tol);
    RatInterval a = fundamental_area(tol);
    report = envelope("sl2z area");
    report["input"] = json{{"tol", sl_tol}};
    report["lo"] = jrat(a.lo);
    report["hi"] = jrat(a.hi);
    report["width_within_tolerance"] = a.width() <= tol;
  });

  auto* sl_cong = sl_cmd->add_subcommand("congruence", "Principal congruence subgroup membership");
  sl_cong->add_option("--n", sl_n, "Level")->required();
  sl_cong->add_option("--matrix", sl_matrix, "Row-major a,b,c,d")->required();
  sl_cong->callback([&] {
    ModularMatrix g = parse_modmat(sl_matrix);
    report = envelope("sl2z congruence");
    report["input"] = json{{"n", sl_n}, {"matrix", sl_matrix}};
    report["matrix"] = jmodmat(g);
    report["member"] = congruence_member(g, Int(sl_n));
  });

  auto* sl_order = sl_cmd->add_subcommand("order-mod", "Order of SL(2, Z/n)");
  sl_order->add_option("--n", sl_n, "Modulus")->required();
  sl_order->callback([&] {
    report = envelope("sl2z order-mod");
    report["input"] = json{{"n", sl_n}};
    report["order"] = sl2_mod_order(sl_n);
  });

  auto* sl_tors = sl_cmd->add_subcommand("torsion", "Torsion probe of the level-n congruence subgroup");
  sl_tors->add_option("--n", sl_n, "Level")->required();
  sl_tors->add_option("--samples", sl_samples, "Sample count for n >= 3")->capture_default_str();
  sl_tors->callback([&] {
    TorsionReport t = torsion_free_check(sl_n, sl_samples);
    report = envelope("sl2z torsion");
    report["input"] = json{{"n", sl_n}, {"samples", sl_samples}};
    report["level"] = t.level;
    report["nonidentity_checked"] = t.nonidentity_checked;
    report["torsion_found"] = t.torsion_found;
    if (t.witness) report["witness"] = jmodmat(*t.witness);
    if (t.witness_order) report["witness_order"] = *t.witness_order;
    report["note"] = t.note;
  });

  auto* sl_mahler = sl_cmd->add_subcommand("mahler", "Minimum of |B(v,v)| over primitive vectors");
  sl_mahler->add_option("--form", sl_form_file, "Form descriptor JSON file (integral, over Q)")->required();
  sl_mahler->add_option("--height", sl_height, "Sup-norm bound")->capture_default_str();
  sl_mahler->callback([&] {
    json echo;
    QuadraticForm f = parse_form_file(sl_form_file, echo);
    MahlerReport m = mahler_min(f, sl_height);
    report = envelope("sl2z mahler");
    report["input"] = echo;
    report["height"] = m.height;
    report["minimum"] = jint(m.minimum);
    json arg = json::array();
    for (const Int& v : m.argmin) arg.push_back(jint(v));
    report["argmin"] = std::move(arg);
    report["primitive_checked"] = m.primitive_checked;
    report["anisotropy_gate"] = isotropy_section(m.gate, nullptr);
  });

  // ---- pingpong -------------------------------------------------------
  auto* pp_cmd = app.add_subcommand("pingpong", "Free-group certificates in SL(2,R)");
  pp_cmd->require_subcommand(1);
  std::string pp_g1, pp_g2, pp_g2conj, pp_cert_file, pp_out;
  unsigned pp_nmax = 20, pp_maxlen = 6;
  unsigned long pp_samples = 0;

  auto* pp_cert = pp_cmd->add_subcommand("certify", "Search for a ping-pong certificate");
  pp_cert->add_option("--g1", pp_g1, "First generator, row-major rationals a,b,c,d")->required();
  pp_cert->add_option("--g2", pp_g2, "Second generator, row-major rationals");
  pp_cert->add_option("--g2-conj", pp_g2conj, "Conjugator h: use g2 = h g1 h^-1");
  pp_cert->add_option("--nmax", pp_nmax, "Largest power to try")->capture_default_str();
  pp_cert->add_option("--out", pp_out, "Write the bare certificate JSON here");
  pp_cert->callback([&] {
    if (pp_g2.empty() == pp_g2conj.empty())
      bad_input("generators", "give exactly one of --g2 and --g2-conj");
    SurdMat2 g1 = parse_rat_mat2(pp_g1, "g1");
    SurdMat2 g2 = pp_g2.empty()
                      ? [&] {
                          SurdMat2 h = parse_rat_mat2(pp_g2conj, "g2-conj");
                          return h * g1 * h.inverse();
                        }()
                      : parse_rat_mat2(pp_g2, "g2");
    CertificateSearch cs = find_certificate(g1, g2, pp_nmax);
    report = envelope("pingpong certify");
    report["input"] = json{{"g1", pp_g1},
                           {"g2", pp_g2.empty() ? json() : json(pp_g2)},
                           {"g2_conj", pp_g2conj.empty() ? json() : json(pp_g2conj)},
                           {"nmax", pp_nmax}};
    json sec;
    if (cs.certificate) {
      if (!certificate_verifies(*cs.certificate))
        throw std::logic_error("certificate failed its own re-verification");
      set_verdict(sec, "free", jcert(*cs.certificate));
      sec["power"] = cs.certificate->n;
    } else {
      set_verdict(sec, "inconclusive");
      rc = 3;
    }
    sec["diagnostics"] = cs.diagnostics;
    report["freeness"] = std::move(sec);
    if (!pp_out.empty() && cs.certificate) {
      std::ofstream out(pp_out);
      if (!out) bad_input("out", "cannot write '" + pp_out + "'");
      out << jcert(*cs.certificate).dump(2) << "\n";
    }
  });

  auto* pp_val = pp_cmd->add_subcommand("validate", "Re-verify a certificate and bounce words through it");
  pp_val->add_option("--cert", pp_cert_file, "Certificate JSON file")->required();
  pp_val->add_option("--maxlen", pp_maxlen, "Largest reduced word length")->capture_default_str();
  pp_val->add_option("--samples", pp_samples, "Sample count (0 = exhaustive)")->capture_default_str();
  pp_val->callback([&] {
    json j = load_json_file(pp_cert_file);
    PingPongCertificate cert = parse_cert(j);
    WordReport w = validate_words(cert, pp_maxlen, pp_samples);
    report = envelope("pingpong validate");
    report["input"] = j;
    report["power"] = w.power;
    report["max_len"] = w.max_len;
    report["exhaustive"] = w.exhaustive;
    report["words_checked"] = w.words_checked;
    report["all_nontrivial"] = w.all_nontrivial;
    report["tracking_checked"] = w.tracking_checked;
    report["tracking_confirmed"] = w.tracking_confirmed;
    if (!w.first_failure.empty()) report["first_failure"] = w.first_failure;
    report["note"] = w.note;
  });

  // ---- cookbook -------------------------------------------------------
  auto* cb_cmd = app.add_subcommand("cookbook", "Run a worked-example battery and diff against its golden");
  std::string cb_tag, cb_data = "data";
  bool cb_write = false;
  cb_cmd->add_option("tag", cb_tag, "One of: irredinSOpq, sl2z, cyclic-q7")->required();
  cb_cmd->add_option("--data-dir", cb_data, "Directory holding cookbook/<tag>.golden.json")->capture_default_str();
  cb_cmd->add_flag("--write-golden", cb_write, "Overwrite the golden with this run (maintainers only)");
  cb_cmd->callback([&] {
    json payload;
    if (cb_tag == "irredinSOpq")
      payload = cookbook_irredinSOpq();
    else if (cb_tag == "sl2z")
      payload = cookbook_sl2z();
    else if (cb_tag == "cyclic-q7")
      payload = cookbook_cyclic_q7();
    else
      bad_input("tag", "unknown tag '" + cb_tag + "' (documented: irredinSOpq, sl2z, cyclic-q7)");
    std::string golden_rel = "cookbook/" + cb_tag + ".golden.json";
    std::string golden_path = cb_data + "/" + golden_rel;
    report = envelope("cookbook " + cb_tag);
    report["tag"] = cb_tag;
    report["golden"] = golden_rel;
    report["report"] = payload;
    if (cb_write) {
      std::ofstream out(golden_path);
      if (!out) bad_input("data-dir", "cannot write '" + golden_path + "'");
      out << payload.dump(2) << "\n";
      report["golden_written"] = true;
      return;
    }
    std::ifstream in(golden_path);
    if (!in) bad_input("data-dir", "cannot open golden '" + golden_path + "'");
    json golden = json::parse(in);
    std::vector<std::string> diffs;
    json_diff(payload, golden, "", diffs);
    report["golden_match"] = diffs.empty();
    if (!diffs.empty()) {
      json dj = json::array();
      for (const std::string& d : diffs) dj.push_back(d);
      report["divergent_fields"] = std::move(dj);
      rc = 1;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    json err;
    err["error"] = json{{"kind", "usage"}, {"message", e.what()}};
    emit(err, format);
    return 1;
  } catch (const json::parse_error& e) {
    json err;
    err["error"] = json{{"kind", "malformed-json"},
                        {"message", e.what()},
                        {"location", "byte " + std::to_string(e.byte)}};
    emit(err, format);
    return 1;
  } catch (const std::invalid_argument& e) {
    json err;
    err["error"] = json{{"kind", "input"}, {"message", e.what()}};
    emit(err, format);
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"] = json{{"kind", "internal"}, {"message", e.what()}};
    emit(err, format);
    return 1;
  }

  emit(report, format);
  return rc;
}

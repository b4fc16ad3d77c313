#include "masalab/group_masa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace masalab::masa {

using groups::Group;
using groups::Int;
using json = nlohmann::json;

namespace {
constexpr double kZeroTol = 1e-14;
}

void AlgebraElement::add(const Elem& g, const Complex& c) {
  auto it = support.find(g);
  if (it == support.end()) {
    if (std::abs(c) > 0.0) support.emplace(g, c);
    return;
  }
  it->second += c;
  if (std::abs(it->second) <= kZeroTol) support.erase(it);
}

AlgebraElement unit(const Elem& g) {
  AlgebraElement x;
  x.support.emplace(g, Complex(1.0, 0.0));
  return x;
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out = a;
  for (const auto& [g, c] : b.support) out.add(g, c);
  return out;
}

AlgebraElement scale(const AlgebraElement& a, const Complex& c) {
  AlgebraElement out;
  if (std::abs(c) == 0.0) return out;
  for (const auto& [g, v] : a.support) out.support.emplace(g, v * c);
  return out;
}

AlgebraElement mul(const Group& group, const AlgebraElement& a, const AlgebraElement& b) {
  AlgebraElement out;
  for (const auto& [g, cg] : a.support)
    for (const auto& [h, ch] : b.support) out.add(group.mul(g, h), cg * ch);
  return out;
}

AlgebraElement adjoint(const Group& group, const AlgebraElement& a) {
  AlgebraElement out;
  for (const auto& [g, c] : a.support) out.support.emplace(group.inv(g), std::conj(c));
  return out;
}

Complex trace(const Group& group, const AlgebraElement& a) {
  auto it = a.support.find(group.identity());
  return it == a.support.end() ? Complex(0.0, 0.0) : it->second;
}

double norm2(const AlgebraElement& a) {
  double s = 0.0;
  for (const auto& [g, c] : a.support) s += std::norm(c);
  return std::sqrt(s);
}

AlgebraElement conditional_expectation(const GroupModel& model, const AlgebraElement& x) {
  AlgebraElement out;
  for (const auto& [g, c] : x.support)
    if (model.in_marked(g)) out.support.emplace(g, c);
  return out;
}

double masa_l1_norm(const GroupModel& model, const AlgebraElement& y) {
  if (y.is_zero()) return 0.0;

  struct Term {
    Complex coeff;
    std::vector<long long> free;
    std::vector<long long> torsion;
  };
  std::vector<Term> terms;
  const std::size_t r = model.marked->free_rank();
  const std::vector<long long> orders = model.marked->torsion_orders();

  std::vector<long long> maxdeg(r, 0);
  for (const auto& [g, c] : y.support) {
    auto coords = model.marked->coordinates(g);
    if (!coords) throw PreconditionError("masa_l1_norm: support leaves the marked subgroup");
    Term t;
    t.coeff = c;
    for (std::size_t i = 0; i < r; ++i) {
      t.free.push_back(coords->free[i].convert_to<long long>());
      maxdeg[i] = std::max(maxdeg[i], std::llabs(t.free.back()));
    }
    for (const auto& [res, ord] : coords->torsion) {
      (void)ord;
      t.torsion.push_back(res);
    }
    terms.push_back(std::move(t));
  }

  // quadrature grid: alias-free in every free coordinate, full dual in the
  // torsion coordinates
  std::vector<long long> grid(r);
  std::size_t total = 1;
  for (std::size_t i = 0; i < r; ++i) {
    grid[i] = 2 * maxdeg[i] + 1;
    total *= static_cast<std::size_t>(grid[i]);
  }
  for (long long n : orders) total *= static_cast<std::size_t>(n);
  check_budget(total, "masa_l1_norm quadrature points");

  std::vector<long long> idx(r + orders.size(), 0);
  double sum = 0.0;
  for (std::size_t p = 0; p < total; ++p) {
    Complex f(0.0, 0.0);
    for (const Term& t : terms) {
      double turns = 0.0;
      for (std::size_t i = 0; i < r; ++i)
        turns += static_cast<double>(t.free[i]) * static_cast<double>(idx[i]) /
                 static_cast<double>(grid[i]);
      for (std::size_t j = 0; j < orders.size(); ++j)
        turns += static_cast<double>(t.torsion[j]) * static_cast<double>(idx[r + j]) /
                 static_cast<double>(orders[j]);
      f += t.coeff * unit_phase(turns);
    }
    sum += std::abs(f);
    // mixed-radix increment
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const long long radix = i < r ? grid[i] : orders[i - r];
      if (++idx[i] < radix) break;
      idx[i] = 0;
    }
  }
  return sum / static_cast<double>(total);
}

namespace {

void require_infinite_order_in_masa(const GroupModel& model, const Elem& v) {
  auto coords = model.marked->coordinates(v);
  if (!coords) throw PreconditionError("v must lie in the marked subgroup");
  bool infinite = false;
  for (const Int& k : coords->free)
    if (k != 0) infinite = true;
  if (!infinite) throw PreconditionError("v must generate an infinite cyclic subgroup");
}

}  // namespace

CesaroDiagnostics cesaro_diagnostics(const GroupModel& model, const AlgebraElement& x,
                                     const Elem& v, long long N) {
  if (N < 1) throw PreconditionError("cesaro_diagnostics: N >= 1 required");
  if (!conditional_expectation(model, x).is_zero())
    throw PreconditionError("cesaro_diagnostics: x must satisfy E_A(x) = 0");
  require_infinite_order_in_masa(model, v);

  const Group& group = *model.group;
  const AlgebraElement xstar = adjoint(group, x);

  CesaroDiagnostics out;
  out.N = N;
  double s2sq = 0.0, s2 = 0.0, s1sq = 0.0, s1 = 0.0;
  // k = 0 is excluded: the single term E_A(x x*) never vanishes for x != 0
  // and contributes nothing in the limit, so the finite-horizon averages run
  // over 0 < |k| <= N.
  Elem vk = group.pow(v, Int(-N));
  for (long long k = -N; k <= N; ++k) {
    if (k != 0) {
      const AlgebraElement e = conditional_expectation(
          model, mul(group, mul(group, x, unit(vk)), xstar));
      const double l2 = norm2(e);
      const double l1 = masa_l1_norm(model, e);
      s2sq += l2 * l2;
      s2 += l2;
      s1sq += l1 * l1;
      s1 += l1;
    }
    vk = group.mul(vk, v);
  }
  const double denom = static_cast<double>(2 * N);
  out.avg_l2_sq = s2sq / denom;
  out.avg_l2 = s2 / denom;
  out.avg_l1_sq = s1sq / denom;
  out.avg_l1 = s1 / denom;
  out.all_vanish = out.avg_l2_sq <= kZeroTol && out.avg_l2 <= kZeroTol &&
                   out.avg_l1_sq <= kZeroTol && out.avg_l1 <= kZeroTol;
  return out;
}

STReport st_condition(const GroupModel& model, const std::vector<Elem>& F, int R,
                      std::size_t E_bound) {
  for (const Elem& f : F)
    if (model.in_marked(f))
      throw PreconditionError("st_condition: F must avoid the marked subgroup");

  const Group& group = *model.group;
  STReport report;
  report.radius = R;

  std::set<Elem> exceptional;
  bool boundary = false;
  for (const auto& [g0, radius] : groups::marked_ball(model, R)) {
    // g0 = e is a single point and can never obstruct finiteness; it is
    // treated as an implicit member of every exceptional set.
    if (group.is_identity(g0)) continue;
    for (const Elem& g : F) {
      const Elem gg0 = group.mul(g, g0);
      for (const Elem& h : F) {
        if (model.in_marked(group.mul(gg0, h))) {
          report.witnesses.push_back({g, g0, h, radius});
          exceptional.insert(g0);
          if (radius == R) boundary = true;
        }
      }
    }
  }
  report.exceptional.assign(exceptional.begin(), exceptional.end());
  if (boundary)
    report.verdict = STReport::Verdict::kViolation;
  else if (exceptional.size() <= E_bound)
    report.verdict = STReport::Verdict::kHoldsWithE;
  else
    report.verdict = STReport::Verdict::kInconclusive;
  return report;
}

namespace {

// Exact triviality argument available in free groups: a nontrivial stabilizer
// pair forces g to commute with the cyclic generator w (centralizers in free
// groups are cyclic), provided w survives abelianization.
bool free_exact_certificate(const GroupModel& model, const Elem& g) {
  if (model.group->kind() != "free") return false;
  const auto gens = model.marked->generators();
  if (gens.size() != 1) return false;
  const Elem& w = gens.front();
  const auto& word = std::get<groups::Word>(w.v);
  std::map<int, long long> ab;
  for (const auto& [letter, exp] : word) ab[letter] += exp;
  bool nonzero = false;
  for (const auto& [letter, exp] : ab)
    if (exp != 0) nonzero = true;
  if (!nonzero) return false;
  const Elem gw = model.group->mul(g, w);
  const Elem wg = model.group->mul(w, g);
  return !(gw == wg);  // no commutation => K_g trivial, exactly
}

}  // namespace

KgReport stabilizer_kg(const GroupModel& model, const Elem& g, int R) {
  if (model.in_marked(g)) throw PreconditionError("stabilizer_kg: g must lie outside Gamma_0");
  const Group& group = *model.group;
  const Elem ginv = group.inv(g);

  KgReport report;
  report.radius = R;
  for (const auto& [h2, radius] : groups::marked_ball(model, R)) {
    const Elem h1 = group.mul(group.mul(g, group.inv(h2)), ginv);
    if (!model.in_marked(h1)) continue;
    report.pairs.emplace_back(h1, h2);
    if (radius == R && !group.is_identity(h2)) report.boundary_hit = true;
  }
  if (free_exact_certificate(model, g) && report.trivial())
    report.certificate = KgReport::Certificate::kExact;
  return report;
}

MalnormalReport malnormality_check(const GroupModel& model, int R) {
  const Group& group = *model.group;
  MalnormalReport report;
  report.radius = R;
  const auto marked = groups::marked_ball(model, R);
  for (const Elem& g : groups::ball(group, R)) {
    if (model.in_marked(g)) continue;
    const Elem ginv = group.inv(g);
    for (const auto& [h, hr] : marked) {
      (void)hr;
      if (group.is_identity(h)) continue;
      const Elem c = group.mul(group.mul(g, h), ginv);
      if (model.in_marked(c) && !group.is_identity(c)) {
        report.malnormal = false;
        report.witness = {g, h};
        return report;
      }
    }
  }
  return report;
}

IccReport icc_check(const GroupModel& model, int R, long long threshold) {
  const Group& group = *model.group;
  IccReport report;
  report.radius = R;
  report.threshold = threshold > 0 ? threshold : 2 * R;
  report.min_class_size = -1;

  const auto conjugators = groups::ball(group, 2 * R);
  for (const Elem& g : groups::ball(group, R)) {
    if (group.is_identity(g)) continue;
    std::set<Elem> cls;
    for (const Elem& x : conjugators) {
      cls.insert(group.mul(group.mul(x, g), group.inv(x)));
      if (static_cast<long long>(cls.size()) > report.threshold) break;
    }
    const long long size = static_cast<long long>(cls.size());
    if (report.min_class_size < 0 || size < report.min_class_size) {
      report.min_class_size = size;
      report.worst = g;
    }
  }
  if (report.min_class_size < 0) report.min_class_size = 0;
  report.evidence = report.min_class_size > report.threshold;
  return report;
}

AhpResult ahp_subsequence(const GroupModel& model, const std::vector<AlgebraElement>& family,
                          const Elem& v, int L, long long K_max) {
  if (L < 1) throw PreconditionError("ahp_subsequence: L >= 1 required");
  require_infinite_order_in_masa(model, v);
  const Group& group = *model.group;

  std::vector<AlgebraElement> adjoints;
  for (const AlgebraElement& x : family) adjoints.push_back(adjoint(group, x));

  AhpResult result;
  long long k = 0;
  for (int l = 1; l <= L; ++l) {
    const double bound = 1.0 / static_cast<double>(l);
    bool found = false;
    while (++k <= K_max) {
      const Elem vk = group.pow(v, Int(k));
      bool ok = true;
      for (std::size_t i = 0; i < family.size(); ++i) {
        const AlgebraElement e = conditional_expectation(
            model, mul(group, mul(group, family[i], unit(vk)), adjoints[i]));
        if (norm2(e) >= bound) {
          ok = false;
          break;
        }
      }
      if (ok) {
        result.indices.push_back(k);
        found = true;
        break;
      }
    }
    if (!found) return result;  // inconclusive: K_max exhausted
  }
  result.conclusive = true;
  return result;
}

WanderingResult wandering_test(const GroupModel& model, const AlgebraElement& zeta,
                               const Elem& v, long long N) {
  if (!conditional_expectation(model, zeta).is_zero())
    throw PreconditionError("wandering_test: zeta must satisfy E_A(zeta) = 0");
  require_infinite_order_in_masa(model, v);
  const Group& group = *model.group;
  const AlgebraElement zstar = adjoint(group, zeta);

  WanderingResult result;
  for (long long n = -N; n <= N; ++n) {
    if (n == 0) continue;
    const AlgebraElement e = conditional_expectation(
        model, mul(group, mul(group, zeta, unit(group.pow(v, Int(n)))), zstar));
    const double defect = norm2(e);
    if (defect > result.max_defect) {
      result.max_defect = defect;
      result.worst_n = n;
    }
  }
  result.wandering = result.max_defect == 0.0;
  return result;
}

namespace {

// Exponent of u as a power of the marked generator; nullopt when u is outside
// the marked subgroup.  sign converts from the generator to v = w^{sign}.
std::optional<long long> cyclic_exponent(const GroupModel& model, const Elem& u, long long sign) {
  auto coords = model.marked->coordinates(u);
  if (!coords) return std::nullopt;
  return sign * coords->free.at(0).convert_to<long long>();
}

}  // namespace

std::pair<double, double> summability_identity(const GroupModel& model, const AlgebraElement& xi1,
                                               const AlgebraElement& xi2, const Elem& v) {
  if (xi1.is_zero() || xi2.is_zero()) return {0.0, 0.0};
  require_infinite_order_in_masa(model, v);
  if (model.marked->free_rank() != 1 || !model.marked->torsion_orders().empty())
    throw PreconditionError("summability_identity: marked subgroup must be infinite cyclic");
  auto vcoords = model.marked->coordinates(v);
  const long long vexp = vcoords->free.at(0).convert_to<long long>();
  if (std::llabs(vexp) != 1)
    throw PreconditionError("summability_identity: v must generate the marked subgroup");

  const Group& group = *model.group;

  // scan window: cancellation in s v^k t^-1 is limited by the word lengths of
  // s and t, so hits beyond the window would come in pairs -- and two hits
  // already prove an infinite arithmetic progression of nonzero terms.
  long long maxlen = group.length(v);
  for (const auto& [s, c] : xi1.support) maxlen = std::max(maxlen, group.length(s));
  for (const auto& [t, c] : xi2.support) maxlen = std::max(maxlen, group.length(t));
  const long long K = std::max<long long>(64, 8 + 4 * maxlen);

  const Elem vp = group.pow(v, Int(1));
  std::set<long long> lhs_ks;
  std::map<std::pair<long long, long long>, Complex> kappa;
  for (const auto& [s, cs] : xi1.support) {
    for (const auto& [t, ct] : xi2.support) {
      const Elem tinv = group.inv(t);
      int hits = 0;
      Elem sv = group.mul(s, group.pow(v, Int(-K)));
      for (long long k = -K; k <= K; ++k) {
        if (k > -K) sv = group.mul(sv, vp);
        const Elem u = group.mul(sv, tinv);
        // s v^k t^-1 = v^p  <=>  nonzero projection; record both indexings
        const auto p = cyclic_exponent(model, u, vexp);
        if (p) {
          if (++hits >= 2)
            throw PreconditionError(
                "summability_identity: infinitely many nonzero terms (arithmetic progression)");
          lhs_ks.insert(k);
          // kappa(n,m) = <v^n xi1 v^m, xi2> picks up cs*conj(ct) at
          // v^n s v^m = t, i.e. (n,m) = (-p, k)... v^{-p} s v^k = t? check:
          // s v^k t^-1 = v^p  =>  v^{-p} s v^k = t.
          kappa[{-*p, k}] += cs * std::conj(ct);
        }
      }
    }
  }

  const AlgebraElement xi2star = adjoint(group, xi2);
  double lhs = 0.0;
  for (long long k : lhs_ks) {
    const AlgebraElement e = conditional_expectation(
        model, mul(group, mul(group, xi1, unit(group.pow(v, Int(k)))), xi2star));
    const double l2 = norm2(e);
    lhs += l2 * l2;
  }

  double rhs = 0.0;
  for (const auto& [nm, c] : kappa) rhs += std::norm(c);
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// parsing / formatting
// ---------------------------------------------------------------------------

namespace {

// split on top-level '+'/'-' (sign kept with the term); '^-1' exponents and
// '(re,im)' coefficients are not split points
std::vector<std::string> split_terms(const std::string& text) {
  std::vector<std::string> terms;
  std::string cur;
  int depth = 0;
  char prev = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if ((c == '+' || c == '-') && depth == 0 && prev != '^' && prev != 0 && prev != '*' &&
        prev != '+' && prev != '-' && prev != 'e' && prev != 'E') {
      terms.push_back(cur);
      cur.clear();
    }
    cur += c;
    if (!std::isspace(static_cast<unsigned char>(c))) prev = c;
  }
  if (!cur.empty()) terms.push_back(cur);
  return terms;
}

bool parse_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  *out = v;
  return true;
}

// "3", "-0.5", "(0,1)"
bool parse_coefficient(const std::string& raw, Complex* out) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  double re = 0.0;
  if (parse_number(s, &re)) {
    *out = Complex(re, 0.0);
    return true;
  }
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return false;
    double im = 0.0;
    if (!parse_number(s.substr(1, comma - 1), &re)) return false;
    if (!parse_number(s.substr(comma + 1, s.size() - comma - 2), &im)) return false;
    *out = Complex(re, im);
    return true;
  }
  return false;
}

}  // namespace

AlgebraElement parse_element(const Group& group, const std::string& text) {
  AlgebraElement out;
  if (text.find_first_not_of(" \t") == std::string::npos || text == "0") return out;

  for (std::string term : split_terms(text)) {
    // leading sign
    double sign = 1.0;
    std::size_t pos = 0;
    while (pos < term.size() && (std::isspace(static_cast<unsigned char>(term[pos])) ||
                                 term[pos] == '+' || term[pos] == '-')) {
      if (term[pos] == '-') sign = -sign;
      ++pos;
    }
    term = term.substr(pos);
    if (term == "0") continue;

    // optional coefficient factor before the first '*'
    Complex coeff(1.0, 0.0);
    std::string word = term;
    const auto star = term.find('*');
    if (star != std::string::npos) {
      Complex c;
      if (parse_coefficient(term.substr(0, star), &c)) {
        coeff = c;
        word = term.substr(star + 1);
      }
    } else {
      Complex c;
      if (parse_coefficient(term, &c)) {
        out.add(group.identity(), sign * c);
        continue;
      }
    }
    // allow a "u_" prefix on words
    std::string w;
    for (char c : word)
      if (!std::isspace(static_cast<unsigned char>(c))) w += c;
    if (w.rfind("u_", 0) == 0) w = w.substr(2);
    out.add(group.parse(w), sign * coeff);
  }
  return out;
}

std::string format_element(const Group& group, const AlgebraElement& x) {
  if (x.is_zero()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [g, c] : x.support) {
    if (!first) os << " + ";
    first = false;
    if (c.imag() == 0.0)
      os << c.real();
    else
      os << '(' << c.real() << ',' << c.imag() << ')';
    os << '*' << group.format(g);
  }
  return os.str();
}

std::string st_report_to_json(const GroupModel& model, const STReport& report) {
  json j;
  switch (report.verdict) {
    case STReport::Verdict::kHoldsWithE:
      j["verdict"] = "holds_with_E";
      break;
    case STReport::Verdict::kViolation:
      j["verdict"] = "violation";
      break;
    case STReport::Verdict::kInconclusive:
      j["verdict"] = "inconclusive";
      break;
  }
  j["radius"] = report.radius;
  j["finite_horizon"] = report.finite_horizon;
  json e = json::array();
  for (const Elem& g : report.exceptional) e.push_back(model.group->format(g));
  j["E"] = e;
  json w = json::array();
  for (const STWitness& wit : report.witnesses)
    w.push_back({{"g", model.group->format(wit.g)},
                 {"g0", model.group->format(wit.g0)},
                 {"h", model.group->format(wit.h)},
                 {"radius", wit.radius}});
  j["witnesses"] = w;
  return j.dump();
}

std::string kg_report_to_json(const GroupModel& model, const KgReport& report) {
  json j;
  j["radius"] = report.radius;
  j["trivial"] = report.trivial();
  j["boundary_hit"] = report.boundary_hit;
  j["certificate"] =
      report.certificate == KgReport::Certificate::kExact ? "exact" : "radius";
  if (!report.boundary_hit) j["order"] = report.pairs.size();
  json pairs = json::array();
  for (const auto& [h1, h2] : report.pairs)
    pairs.push_back({model.group->format(h1), model.group->format(h2)});
  j["pairs"] = pairs;
  return j.dump();
}

}  // namespace masalab::masa

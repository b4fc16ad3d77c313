#include "masalab/groups.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace masalab::groups {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// element comparison
// ---------------------------------------------------------------------------

namespace {

template <typename T>
int scalar_cmp(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int word_cmp(const Word& a, const Word& b) {
  if (int c = scalar_cmp(a.size(), b.size())) return c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = scalar_cmp(a[i].first, b[i].first)) return c;
    if (int c = scalar_cmp(a[i].second, b[i].second)) return c;
  }
  return 0;
}

int vec_cmp(const Vec& a, const Vec& b) {
  if (int c = scalar_cmp(a.size(), b.size())) return c;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = scalar_cmp(a[i], b[i])) return c;
  return 0;
}

}  // namespace

int elem_cmp(const Elem& a, const Elem& b) {
  if (int c = scalar_cmp(a.v.index(), b.v.index())) return c;
  switch (a.v.index()) {
    case 0:
      return word_cmp(std::get<Word>(a.v), std::get<Word>(b.v));
    case 1:
      return vec_cmp(std::get<Vec>(a.v), std::get<Vec>(b.v));
    case 2: {
      const auto& x = std::get<SemiElem>(a.v);
      const auto& y = std::get<SemiElem>(b.v);
      if (int c = scalar_cmp(x.power, y.power)) return c;
      return vec_cmp(x.vec, y.vec);
    }
    case 3: {
      const auto& x = std::get<Tuple>(a.v);
      const auto& y = std::get<Tuple>(b.v);
      if (int c = scalar_cmp(x.size(), y.size())) return c;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (int c = elem_cmp(x[i], y[i])) return c;
      return 0;
    }
    default: {
      const auto& x = std::get<FPWord>(a.v).syllables;
      const auto& y = std::get<FPWord>(b.v).syllables;
      if (int c = scalar_cmp(x.size(), y.size())) return c;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (int c = scalar_cmp(x[i].first, y[i].first)) return c;
        if (int c = elem_cmp(x[i].second, y[i].second)) return c;
      }
      return 0;
    }
  }
}

Elem Group::pow(const Elem& g, const Int& k) const {
  Elem base = k < 0 ? inv(g) : g;
  Int n = abs(k);
  Elem acc = identity();
  while (n > 0) {
    if ((n & 1) != 0) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// shared word / letter helpers
// ---------------------------------------------------------------------------

namespace {

std::string letter_name(int index) {
  std::string name(1, static_cast<char>('a' + index % 26));
  if (index >= 26) name += std::to_string(index / 26);
  return name;
}

void push_syllable(Word& w, int gen, long long exp) {
  if (exp == 0) return;
  if (!w.empty() && w.back().first == gen) {
    w.back().second += exp;
    if (w.back().second == 0) w.pop_back();
  } else {
    w.emplace_back(gen, exp);
  }
}

Word word_mul(const Word& a, const Word& b) {
  Word out = a;
  for (const auto& s : b) push_syllable(out, s.first, s.second);
  return out;
}

Word word_inv(const Word& a) {
  Word out;
  out.reserve(a.size());
  for (auto it = a.rbegin(); it != a.rend(); ++it) out.emplace_back(it->first, -it->second);
  return out;
}

std::string word_format(const Word& w, int letter_offset = 0) {
  if (w.empty()) return "e";
  std::ostringstream os;
  bool first = true;
  for (const auto& [gen, exp] : w) {
    if (!first) os << '*';
    first = false;
    os << letter_name(letter_offset + gen);
    if (exp != 1) os << '^' << exp;
  }
  return os.str();
}

// "a^2*b^-1" -> syllables over the global letter alphabet
std::vector<Syllable> parse_letter_word(const std::string& text) {
  std::vector<Syllable> out;
  std::string trimmed;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
  if (trimmed.empty() || trimmed == "e" || trimmed == "1") return out;
  std::size_t pos = 0;
  while (pos < trimmed.size()) {
    const char c = trimmed[pos];
    if (c == '*') {
      ++pos;
      continue;
    }
    if (c < 'a' || c > 'z')
      throw PreconditionError("parse: expected generator letter in '" + text + "'");
    int gen = c - 'a';
    ++pos;
    long long exp = 1;
    if (pos < trimmed.size() && trimmed[pos] == '^') {
      ++pos;
      std::size_t end = pos;
      if (end < trimmed.size() && (trimmed[end] == '-' || trimmed[end] == '+')) ++end;
      while (end < trimmed.size() && std::isdigit(static_cast<unsigned char>(trimmed[end]))) ++end;
      if (end == pos) throw PreconditionError("parse: missing exponent in '" + text + "'");
      exp = std::stoll(trimmed.substr(pos, end - pos));
      pos = end;
    }
    out.emplace_back(gen, exp);
  }
  return out;
}

// split "x,y,z" at top-level commas
std::vector<std::string> split_top_level(const std::string& inner) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : inner) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string strip_outer_parens(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// free group
// ---------------------------------------------------------------------------

namespace {

class FreeGroup final : public Group {
 public:
  explicit FreeGroup(int rank) : rank_(rank) {
    if (rank < 1) throw PreconditionError("free group rank must be >= 1");
  }

  std::string kind() const override { return "free"; }
  Elem identity() const override { return Elem{Word{}}; }

  Elem mul(const Elem& g, const Elem& h) const override {
    return Elem{word_mul(std::get<Word>(g.v), std::get<Word>(h.v))};
  }
  Elem inv(const Elem& g) const override { return Elem{word_inv(std::get<Word>(g.v))}; }

  std::vector<Elem> generators() const override {
    std::vector<Elem> gens;
    for (int i = 0; i < rank_; ++i) gens.push_back(Elem{Word{{i, 1}}});
    return gens;
  }

  long long length(const Elem& g) const override {
    long long n = 0;
    for (const auto& s : std::get<Word>(g.v)) n += std::llabs(s.second);
    return n;
  }

  std::string format(const Elem& g) const override { return word_format(std::get<Word>(g.v)); }

  Elem parse(const std::string& text) const override {
    Word w;
    for (const auto& [gen, exp] : parse_letter_word(text)) {
      if (gen >= rank_) throw PreconditionError("parse: generator out of range in '" + text + "'");
      push_syllable(w, gen, exp);
    }
    return Elem{w};
  }

  int rank() const { return rank_; }

 private:
  int rank_;
};

// ---------------------------------------------------------------------------
// finitely generated abelian:  Z^{#zeros} x prod Z/n_i  (coordinate i has
// invariant invariants_[i]; 0 means a Z factor)
// ---------------------------------------------------------------------------

class AbelianGroup final : public Group {
 public:
  explicit AbelianGroup(std::vector<Int> invariants, std::string kind_label = "abelian")
      : invariants_(std::move(invariants)), kind_(std::move(kind_label)) {
    if (invariants_.empty()) throw PreconditionError("abelian group needs at least one factor");
    for (const Int& n : invariants_)
      if (n < 0) throw PreconditionError("abelian invariants must be nonnegative");
  }

  std::string kind() const override { return kind_; }
  Elem identity() const override { return Elem{Vec(invariants_.size(), Int(0))}; }

  Elem mul(const Elem& g, const Elem& h) const override {
    const auto& a = std::get<Vec>(g.v);
    const auto& b = std::get<Vec>(h.v);
    Vec out(invariants_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = reduce(a[i] + b[i], i);
    return Elem{out};
  }

  Elem inv(const Elem& g) const override {
    const auto& a = std::get<Vec>(g.v);
    Vec out(invariants_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = reduce(-a[i], i);
    return Elem{out};
  }

  std::vector<Elem> generators() const override {
    std::vector<Elem> gens;
    for (std::size_t i = 0; i < invariants_.size(); ++i) {
      Vec v(invariants_.size(), Int(0));
      v[i] = 1;
      gens.push_back(Elem{v});
    }
    return gens;
  }

  long long length(const Elem& g) const override {
    const auto& a = std::get<Vec>(g.v);
    Int n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (invariants_[i] == 0)
        n += abs(a[i]);
      else
        n += min(a[i], invariants_[i] - a[i]);
    }
    return n.convert_to<long long>();
  }

  std::string format(const Elem& g) const override {
    const auto& a = std::get<Vec>(g.v);
    if (a.size() == 1) return a[0].str();
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ')';
    return os.str();
  }

  Elem parse(const std::string& text) const override {
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    Vec out(invariants_.size(), Int(0));
    if (!s.empty() && (s[0] == '(' || std::isdigit(static_cast<unsigned char>(s[0])) ||
                       s[0] == '-' || s[0] == '+')) {
      const auto parts = split_top_level(strip_outer_parens(s));
      if (parts.size() != invariants_.size())
        throw PreconditionError("parse: expected " + std::to_string(invariants_.size()) +
                                " coordinates in '" + text + "'");
      for (std::size_t i = 0; i < parts.size(); ++i) out[i] = reduce(Int(parts[i]), i);
      return Elem{out};
    }
    // letter syntax: a = e_1, b = e_2, ...
    for (const auto& [gen, exp] : parse_letter_word(s)) {
      if (static_cast<std::size_t>(gen) >= invariants_.size())
        throw PreconditionError("parse: generator out of range in '" + text + "'");
      out[static_cast<std::size_t>(gen)] =
          reduce(out[static_cast<std::size_t>(gen)] + exp, static_cast<std::size_t>(gen));
    }
    return Elem{out};
  }

  const std::vector<Int>& invariants() const { return invariants_; }

  Int reduce(Int value, std::size_t i) const {
    if (invariants_[i] == 0) return value;
    Int r = value % invariants_[i];
    if (r < 0) r += invariants_[i];
    return r;
  }

 private:
  std::vector<Int> invariants_;
  std::string kind_;
};

// ---------------------------------------------------------------------------
// direct product
// ---------------------------------------------------------------------------

class DirectProduct final : public Group {
 public:
  explicit DirectProduct(std::vector<GroupPtr> factors) : factors_(std::move(factors)) {
    if (factors_.size() < 2) throw PreconditionError("direct product needs >= 2 factors");
  }

  std::string kind() const override { return "direct_product"; }

  Elem identity() const override {
    Tuple t;
    for (const auto& f : factors_) t.push_back(f->identity());
    return Elem{t};
  }

  Elem mul(const Elem& g, const Elem& h) const override {
    const auto& a = std::get<Tuple>(g.v);
    const auto& b = std::get<Tuple>(h.v);
    Tuple out;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.push_back(factors_[i]->mul(a[i], b[i]));
    return Elem{out};
  }

  Elem inv(const Elem& g) const override {
    const auto& a = std::get<Tuple>(g.v);
    Tuple out;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.push_back(factors_[i]->inv(a[i]));
    return Elem{out};
  }

  std::vector<Elem> generators() const override {
    std::vector<Elem> gens;
    const Elem id = identity();
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      for (const Elem& g : factors_[i]->generators()) {
        Tuple t = std::get<Tuple>(id.v);
        t[i] = g;
        gens.push_back(Elem{t});
      }
    }
    return gens;
  }

  long long length(const Elem& g) const override {
    const auto& a = std::get<Tuple>(g.v);
    long long n = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) n += factors_[i]->length(a[i]);
    return n;
  }

  std::string format(const Elem& g) const override {
    const auto& a = std::get<Tuple>(g.v);
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < factors_.size(); ++i)
      os << (i ? "," : "") << factors_[i]->format(a[i]);
    os << ')';
    return os.str();
  }

  Elem parse(const std::string& text) const override {
    const auto parts = split_top_level(strip_outer_parens(text));
    if (parts.size() != factors_.size())
      throw PreconditionError("parse: expected " + std::to_string(factors_.size()) +
                              " components in '" + text + "'");
    Tuple out;
    for (std::size_t i = 0; i < parts.size(); ++i) out.push_back(factors_[i]->parse(parts[i]));
    return Elem{out};
  }

  const std::vector<GroupPtr>& factors() const { return factors_; }

 private:
  std::vector<GroupPtr> factors_;
};

// ---------------------------------------------------------------------------
// free product (factors restricted to letter-named kinds)
// ---------------------------------------------------------------------------

int factor_letter_count(const Group& g) {
  if (auto* f = dynamic_cast<const FreeGroup*>(&g)) return f->rank();
  if (auto* a = dynamic_cast<const AbelianGroup*>(&g))
    return static_cast<int>(a->invariants().size());
  throw PreconditionError("free product factors must be free or abelian kinds");
}

class FreeProduct final : public Group {
 public:
  explicit FreeProduct(std::vector<GroupPtr> factors) : factors_(std::move(factors)) {
    if (factors_.size() < 2) throw PreconditionError("free product needs >= 2 factors");
    int offset = 0;
    for (const auto& f : factors_) {
      offsets_.push_back(offset);
      offset += factor_letter_count(*f);
    }
    offsets_.push_back(offset);
  }

  std::string kind() const override { return "free_product"; }
  Elem identity() const override { return Elem{FPWord{}}; }

  Elem mul(const Elem& g, const Elem& h) const override {
    std::vector<std::pair<int, Elem>> out = std::get<FPWord>(g.v).syllables;
    for (const auto& s : std::get<FPWord>(h.v).syllables) push(out, s.first, s.second);
    return Elem{FPWord{out}};
  }

  Elem inv(const Elem& g) const override {
    const auto& s = std::get<FPWord>(g.v).syllables;
    std::vector<std::pair<int, Elem>> out;
    for (auto it = s.rbegin(); it != s.rend(); ++it)
      out.emplace_back(it->first, factors_[static_cast<std::size_t>(it->first)]->inv(it->second));
    return Elem{FPWord{out}};
  }

  std::vector<Elem> generators() const override {
    std::vector<Elem> gens;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      for (const Elem& g : factors_[i]->generators())
        gens.push_back(Elem{FPWord{{{static_cast<int>(i), g}}}});
    return gens;
  }

  long long length(const Elem& g) const override {
    long long n = 0;
    for (const auto& s : std::get<FPWord>(g.v).syllables)
      n += factors_[static_cast<std::size_t>(s.first)]->length(s.second);
    return n;
  }

  std::string format(const Elem& g) const override {
    const auto& syl = std::get<FPWord>(g.v).syllables;
    if (syl.empty()) return "e";
    std::ostringstream os;
    bool first = true;
    for (const auto& [fi, fe] : syl) {
      const std::string piece = format_factor_elem(fi, fe);
      if (!first) os << '*';
      first = false;
      os << piece;
    }
    return os.str();
  }

  Elem parse(const std::string& text) const override {
    std::vector<std::pair<int, Elem>> out;
    for (const auto& [letter, exp] : parse_letter_word(text)) {
      const int fi = factor_of_letter(letter);
      const int local = letter - offsets_[static_cast<std::size_t>(fi)];
      const Elem gen = factors_[static_cast<std::size_t>(fi)]->generators()[static_cast<std::size_t>(local)];
      push(out, fi, factors_[static_cast<std::size_t>(fi)]->pow(gen, Int(exp)));
    }
    return Elem{FPWord{out}};
  }

  const std::vector<GroupPtr>& factors() const { return factors_; }

 private:
  void push(std::vector<std::pair<int, Elem>>& out, int factor, const Elem& piece) const {
    const auto& grp = factors_[static_cast<std::size_t>(factor)];
    if (grp->is_identity(piece)) return;
    if (!out.empty() && out.back().first == factor) {
      Elem merged = grp->mul(out.back().second, piece);
      out.pop_back();
      push(out, factor, merged);
    } else {
      out.emplace_back(factor, piece);
    }
  }

  int factor_of_letter(int letter) const {
    for (std::size_t i = 0; i + 1 < offsets_.size(); ++i)
      if (letter >= offsets_[i] && letter < offsets_[i + 1]) return static_cast<int>(i);
    throw PreconditionError("parse: generator letter out of range");
  }

  std::string format_factor_elem(int fi, const Elem& fe) const {
    const int offset = offsets_[static_cast<std::size_t>(fi)];
    if (std::holds_alternative<Word>(fe.v)) return word_format(std::get<Word>(fe.v), offset);
    // abelian factor: print as letter powers
    const auto& vec = std::get<Vec>(fe.v);
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < vec.size(); ++i) {
      if (vec[i] == 0) continue;
      if (!first) os << '*';
      first = false;
      os << letter_name(offset + static_cast<int>(i));
      if (vec[i] != 1) os << '^' << vec[i];
    }
    return os.str();
  }

  std::vector<GroupPtr> factors_;
  std::vector<int> offsets_;
};

// ---------------------------------------------------------------------------
// Z^d x| Z by a matrix A in GL_d(Z):  (v,m)(w,n) = (v + A^m w, m+n)
// ---------------------------------------------------------------------------

using Matrix = std::vector<Vec>;  // rows

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  const std::size_t d = a.size();
  Matrix out(d, Vec(d, Int(0)));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = 0; j < d; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Vec mat_apply(const Matrix& a, const Vec& v) {
  Vec out(a.size(), Int(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i] += a[i][j] * v[j];
  return out;
}

Matrix mat_identity(std::size_t d) {
  Matrix m(d, Vec(d, Int(0)));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

Int mat_det(Matrix m) {
  // fraction-free Gaussian elimination (Bareiss)
  const std::size_t d = m.size();
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < d && m[p][k] == 0) ++p;
      if (p == d) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < d; ++i)
      for (std::size_t j = k + 1; j < d; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[d - 1][d - 1];
}

class SemidirectGroup final : public Group {
 public:
  explicit SemidirectGroup(std::vector<std::vector<long long>> raw) {
    const std::size_t d = raw.size();
    if (d == 0) throw PreconditionError("semidirect: empty matrix");
    matrix_.assign(d, Vec(d, Int(0)));
    for (std::size_t i = 0; i < d; ++i) {
      if (raw[i].size() != d) throw PreconditionError("semidirect: matrix must be square");
      for (std::size_t j = 0; j < d; ++j) matrix_[i][j] = raw[i][j];
    }
    const Int det = mat_det(matrix_);
    if (det != 1 && det != -1)
      throw PreconditionError("semidirect: matrix must lie in GL_d(Z) (det +-1)");
    inverse_ = adjugate_inverse(matrix_, det);
  }

  std::string kind() const override { return "semidirect"; }

  Elem identity() const override {
    return Elem{SemiElem{Vec(dim(), Int(0)), Int(0)}};
  }

  Elem mul(const Elem& g, const Elem& h) const override {
    const auto& a = std::get<SemiElem>(g.v);
    const auto& b = std::get<SemiElem>(h.v);
    Vec moved = matrix_power_apply(a.power, b.vec);
    for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += a.vec[i];
    return Elem{SemiElem{std::move(moved), a.power + b.power}};
  }

  Elem inv(const Elem& g) const override {
    const auto& a = std::get<SemiElem>(g.v);
    Vec moved = matrix_power_apply(-a.power, a.vec);
    for (Int& x : moved) x = -x;
    return Elem{SemiElem{std::move(moved), -a.power}};
  }

  std::vector<Elem> generators() const override {
    std::vector<Elem> gens;
    for (std::size_t i = 0; i < dim(); ++i) {
      Vec v(dim(), Int(0));
      v[i] = 1;
      gens.push_back(Elem{SemiElem{v, Int(0)}});
    }
    gens.push_back(Elem{SemiElem{Vec(dim(), Int(0)), Int(1)}});
    return gens;
  }

  long long length(const Elem& g) const override {
    const auto& a = std::get<SemiElem>(g.v);
    Int n = abs(a.power);
    for (const Int& x : a.vec) n += abs(x);
    return n.convert_to<long long>();
  }

  std::string format(const Elem& g) const override {
    const auto& a = std::get<SemiElem>(g.v);
    std::ostringstream os;
    os << "((";
    for (std::size_t i = 0; i < a.vec.size(); ++i) os << (i ? "," : "") << a.vec[i];
    os << ")," << a.power << ')';
    return os.str();
  }

  Elem parse(const std::string& text) const override {
    const auto parts = split_top_level(strip_outer_parens(text));
    if (parts.size() != 2)
      throw PreconditionError("parse: semidirect element must be ((v...),m): '" + text + "'");
    const auto coords = split_top_level(strip_outer_parens(parts[0]));
    if (coords.size() != dim())
      throw PreconditionError("parse: semidirect vector has wrong dimension in '" + text + "'");
    Vec v(dim());
    for (std::size_t i = 0; i < dim(); ++i) v[i] = Int(coords[i]);
    return Elem{SemiElem{v, Int(parts[1])}};
  }

  std::size_t dim() const { return matrix_.size(); }
  const Matrix& matrix() const { return matrix_; }

  Vec matrix_power_apply(const Int& m, const Vec& v) const {
    if (m == 0) return v;
    const Matrix& base = m > 0 ? matrix_ : inverse_;
    Int n = abs(m);
    Matrix acc = mat_identity(dim());
    Matrix sq = base;
    while (n > 0) {
      if ((n & 1) != 0) acc = mat_mul(acc, sq);
      n >>= 1;
      if (n > 0) sq = mat_mul(sq, sq);
    }
    return mat_apply(acc, v);
  }

  // true when A has finite order (checked up to 24, enough for GL_d(Z), d<=4)
  std::optional<int> finite_order() const {
    Matrix acc = matrix_;
    for (int k = 1; k <= 24; ++k) {
      if (acc == mat_identity(dim())) return k;
      acc = mat_mul(acc, matrix_);
    }
    return std::nullopt;
  }

 private:
  static Matrix adjugate_inverse(const Matrix& m, const Int& det) {
    const std::size_t d = m.size();
    if (d == 1) return {{det}};
    Matrix adj(d, Vec(d, Int(0)));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        Matrix minor;
        for (std::size_t r = 0; r < d; ++r) {
          if (r == i) continue;
          Vec row;
          for (std::size_t c = 0; c < d; ++c)
            if (c != j) row.push_back(m[r][c]);
          minor.push_back(row);
        }
        const Int cof = ((i + j) % 2 == 0 ? 1 : -1) * mat_det(minor);
        adj[j][i] = cof;  // transpose
      }
    for (auto& row : adj)
      for (Int& x : row) x *= det;  // det is +-1
    return adj;
  }

  Matrix matrix_;
  Matrix inverse_;
};

}  // namespace

GroupPtr make_free(int rank) { return std::make_shared<FreeGroup>(rank); }

GroupPtr make_abelian(std::vector<Int> invariants) {
  return std::make_shared<AbelianGroup>(std::move(invariants));
}

GroupPtr make_finite_cyclic(long long n) {
  if (n < 1) throw PreconditionError("finite_cyclic: n >= 1 required");
  return std::make_shared<AbelianGroup>(std::vector<Int>{Int(n)}, "finite_cyclic");
}

GroupPtr make_direct_product(std::vector<GroupPtr> factors) {
  return std::make_shared<DirectProduct>(std::move(factors));
}

GroupPtr make_free_product(std::vector<GroupPtr> factors) {
  return std::make_shared<FreeProduct>(std::move(factors));
}

GroupPtr make_semidirect(std::vector<std::vector<long long>> matrix) {
  return std::make_shared<SemidirectGroup>(std::move(matrix));
}

// ---------------------------------------------------------------------------
// integer lattice membership (column reduction)
// ---------------------------------------------------------------------------

namespace {

// Solve sum_j x_j * cols[j] = target over Z.  Returns any solution.
std::optional<std::vector<Int>> diophantine_solve(std::vector<Vec> cols, const Vec& target) {
  const std::size_t d = target.size();
  const std::size_t m = cols.size();
  // transform matrix: solution coefficients of original columns
  std::vector<std::vector<Int>> u(m, std::vector<Int>(m, Int(0)));
  for (std::size_t j = 0; j < m; ++j) u[j][j] = 1;

  Vec t = target;
  std::vector<Int> x(m, Int(0));
  std::size_t piv = 0;
  for (std::size_t r = 0; r < d && piv < m; ++r) {
    // gcd-reduce row r across columns piv..m-1
    while (true) {
      std::size_t best = m;
      for (std::size_t j = piv; j < m; ++j)
        if (cols[j][r] != 0 && (best == m || abs(cols[j][r]) < abs(cols[best][r]))) best = j;
      if (best == m) break;
      bool again = false;
      for (std::size_t j = piv; j < m; ++j) {
        if (j == best || cols[j][r] == 0) continue;
        const Int q = cols[j][r] / cols[best][r];
        for (std::size_t rr = 0; rr < d; ++rr) cols[j][rr] -= q * cols[best][rr];
        for (std::size_t k = 0; k < m; ++k) u[j][k] -= q * u[best][k];
        if (cols[j][r] != 0) again = true;
      }
      if (!again) {
        std::swap(cols[piv], cols[best]);
        std::swap(u[piv], u[best]);
        break;
      }
    }
    if (cols[piv].empty() || cols[piv][r] == 0) continue;
    // eliminate target entry r with the pivot column
    if (t[r] % cols[piv][r] != 0) {
      // later pivot columns have zero in row r, so no solution
      bool any_other = false;
      for (std::size_t j = piv + 1; j < m; ++j)
        if (cols[j][r] != 0) any_other = true;
      if (!any_other) return std::nullopt;
    }
    const Int q = t[r] / cols[piv][r];
    for (std::size_t rr = 0; rr < d; ++rr) t[rr] -= q * cols[piv][rr];
    for (std::size_t k = 0; k < m; ++k) x[k] += q * u[piv][k];
    if (t[r] != 0) return std::nullopt;
    ++piv;
  }
  for (std::size_t r = 0; r < d; ++r)
    if (t[r] != 0) return std::nullopt;
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// marked subgroups
// ---------------------------------------------------------------------------

namespace {

class TrivialSubgroup final : public MarkedSubgroup {
 public:
  explicit TrivialSubgroup(GroupPtr ambient) : ambient_(std::move(ambient)) {}
  bool contains(const Elem& g) const override { return ambient_->is_identity(g); }
  std::vector<Elem> generators() const override { return {}; }
  std::optional<SubgroupCoords> coordinates(const Elem& g) const override {
    if (!contains(g)) return std::nullopt;
    return SubgroupCoords{};
  }
  std::size_t free_rank() const override { return 0; }
  std::vector<long long> torsion_orders() const override { return {}; }

 private:
  GroupPtr ambient_;
};

// infinite cyclic <w> inside free kinds; membership by power matching with a
// word-length guard
class CyclicSubgroup final : public MarkedSubgroup {
 public:
  CyclicSubgroup(GroupPtr ambient, Elem generator)
      : ambient_(std::move(ambient)), gen_(std::move(generator)) {
    if (ambient_->is_identity(gen_))
      throw PreconditionError("marked subgroup: cyclic generator must be nontrivial");
  }

  bool contains(const Elem& g) const override { return coordinates(g).has_value(); }
  std::vector<Elem> generators() const override { return {gen_}; }

  std::optional<SubgroupCoords> coordinates(const Elem& g) const override {
    if (ambient_->is_identity(g)) return SubgroupCoords{{Int(0)}, {}};
    const long long target = ambient_->length(g);
    Elem pos = gen_;
    Elem neg = ambient_->inv(gen_);
    Elem accp = ambient_->identity();
    Elem accn = ambient_->identity();
    for (long long k = 1;; ++k) {
      accp = ambient_->mul(accp, pos);
      accn = ambient_->mul(accn, neg);
      if (accp == g) return SubgroupCoords{{Int(k)}, {}};
      if (accn == g) return SubgroupCoords{{Int(-k)}, {}};
      if (ambient_->length(accp) > target && ambient_->length(accn) > target) return std::nullopt;
      if (k > target + 2) return std::nullopt;  // safety for torsion-ish lengths
    }
  }

  std::size_t free_rank() const override { return 1; }
  std::vector<long long> torsion_orders() const override { return {}; }

 private:
  GroupPtr ambient_;
  Elem gen_;
};

class LatticeSubgroup final : public MarkedSubgroup {
 public:
  LatticeSubgroup(std::shared_ptr<const AbelianGroup> ambient, std::vector<Elem> basis)
      : ambient_(std::move(ambient)), basis_(std::move(basis)) {
    const auto& inv = ambient_->invariants();
    for (const Elem& b : basis_) {
      cols_.push_back(std::get<Vec>(b.v));
      // generator order within the ambient group
      const Vec& v = cols_.back();
      bool infinite = false;
      Int order = 1;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) continue;
        if (inv[i] == 0) {
          infinite = true;
          break;
        }
        const Int step = inv[i] / gcd(inv[i], v[i]);
        order = lcm(order, step);
      }
      orders_.push_back(infinite ? Int(0) : order);
    }
    // ambient relations n_i e_i
    for (std::size_t i = 0; i < inv.size(); ++i) {
      if (inv[i] == 0) continue;
      Vec r(inv.size(), Int(0));
      r[i] = inv[i];
      relations_.push_back(r);
    }
  }

  bool contains(const Elem& g) const override { return solve(g).has_value(); }
  std::vector<Elem> generators() const override { return basis_; }

  std::optional<SubgroupCoords> coordinates(const Elem& g) const override {
    auto sol = solve(g);
    if (!sol) return std::nullopt;
    SubgroupCoords out;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (orders_[j] == 0) {
        out.free.push_back((*sol)[j]);
      } else {
        Int r = (*sol)[j] % orders_[j];
        if (r < 0) r += orders_[j];
        out.torsion.emplace_back(r.convert_to<long long>(), orders_[j].convert_to<long long>());
      }
    }
    return out;
  }

  std::size_t free_rank() const override {
    return static_cast<std::size_t>(std::count(orders_.begin(), orders_.end(), Int(0)));
  }

  std::vector<long long> torsion_orders() const override {
    std::vector<long long> out;
    for (const Int& o : orders_)
      if (o != 0) out.push_back(o.convert_to<long long>());
    return out;
  }

 private:
  std::optional<std::vector<Int>> solve(const Elem& g) const {
    std::vector<Vec> cols = cols_;
    cols.insert(cols.end(), relations_.begin(), relations_.end());
    auto sol = diophantine_solve(std::move(cols), std::get<Vec>(g.v));
    if (!sol) return std::nullopt;
    sol->resize(cols_.size());
    return sol;
  }

  std::shared_ptr<const AbelianGroup> ambient_;
  std::vector<Elem> basis_;
  std::vector<Vec> cols_;
  std::vector<Int> orders_;  // 0 = infinite
  std::vector<Vec> relations_;
};

// {0} x| Z inside a semidirect product
class ActingZSubgroup final : public MarkedSubgroup {
 public:
  explicit ActingZSubgroup(std::shared_ptr<const SemidirectGroup> ambient)
      : ambient_(std::move(ambient)) {}

  bool contains(const Elem& g) const override {
    const auto& a = std::get<SemiElem>(g.v);
    return std::all_of(a.vec.begin(), a.vec.end(), [](const Int& x) { return x == 0; });
  }

  std::vector<Elem> generators() const override {
    return {Elem{SemiElem{Vec(ambient_->dim(), Int(0)), Int(1)}}};
  }

  std::optional<SubgroupCoords> coordinates(const Elem& g) const override {
    if (!contains(g)) return std::nullopt;
    return SubgroupCoords{{std::get<SemiElem>(g.v).power}, {}};
  }

  std::size_t free_rank() const override { return 1; }
  std::vector<long long> torsion_orders() const override { return {}; }

 private:
  std::shared_ptr<const SemidirectGroup> ambient_;
};

class ComponentwiseSubgroup final : public MarkedSubgroup {
 public:
  ComponentwiseSubgroup(std::shared_ptr<const DirectProduct> ambient,
                        const std::vector<Elem>& generators)
      : ambient_(std::move(ambient)) {
    const std::size_t n = ambient_->factors().size();
    std::vector<std::vector<Elem>> per_component(n);
    for (const Elem& g : generators) {
      const auto& t = std::get<Tuple>(g.v);
      int support = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (!ambient_->factors()[i]->is_identity(t[i])) {
          if (support >= 0)
            throw PreconditionError(
                "marked subgroup: each generator must live in a single component");
          support = static_cast<int>(i);
        }
      }
      if (support >= 0) per_component[static_cast<std::size_t>(support)].push_back(
          t[static_cast<std::size_t>(support)]);
    }
    for (std::size_t i = 0; i < n; ++i)
      components_.push_back(per_component[i].empty()
                                ? std::make_shared<TrivialSubgroup>(ambient_->factors()[i])
                                : SubgroupPtr(mark_subgroup(ambient_->factors()[i],
                                                            per_component[i])));
  }

  bool contains(const Elem& g) const override {
    const auto& t = std::get<Tuple>(g.v);
    for (std::size_t i = 0; i < components_.size(); ++i)
      if (!components_[i]->contains(t[i])) return false;
    return true;
  }

  std::vector<Elem> generators() const override {
    std::vector<Elem> gens;
    const Elem id = ambient_->identity();
    for (std::size_t i = 0; i < components_.size(); ++i)
      for (const Elem& g : components_[i]->generators()) {
        Tuple t = std::get<Tuple>(id.v);
        t[i] = g;
        gens.push_back(Elem{t});
      }
    return gens;
  }

  std::optional<SubgroupCoords> coordinates(const Elem& g) const override {
    const auto& t = std::get<Tuple>(g.v);
    SubgroupCoords out;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      auto c = components_[i]->coordinates(t[i]);
      if (!c) return std::nullopt;
      out.free.insert(out.free.end(), c->free.begin(), c->free.end());
      out.torsion.insert(out.torsion.end(), c->torsion.begin(), c->torsion.end());
    }
    return out;
  }

  std::size_t free_rank() const override {
    std::size_t n = 0;
    for (const auto& c : components_) n += c->free_rank();
    return n;
  }

  std::vector<long long> torsion_orders() const override {
    std::vector<long long> out;
    for (const auto& c : components_) {
      auto t = c->torsion_orders();
      out.insert(out.end(), t.begin(), t.end());
    }
    return out;
  }

 private:
  std::shared_ptr<const DirectProduct> ambient_;
  std::vector<SubgroupPtr> components_;
};

void check_abelian(const Group& group, const std::vector<Elem>& gens) {
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (group.mul(gens[i], gens[j]) != group.mul(gens[j], gens[i]))
        throw PreconditionError("marked subgroup generators must commute");
}

}  // namespace

SubgroupPtr mark_cyclic(GroupPtr ambient, const Elem& generator) {
  return std::make_shared<CyclicSubgroup>(std::move(ambient), generator);
}

SubgroupPtr mark_lattice(GroupPtr ambient, std::vector<Elem> basis) {
  auto ab = std::dynamic_pointer_cast<const AbelianGroup>(ambient);
  if (!ab) throw PreconditionError("mark_lattice: ambient group must be abelian");
  return std::make_shared<LatticeSubgroup>(ab, std::move(basis));
}

SubgroupPtr mark_acting_z(GroupPtr ambient) {
  auto sd = std::dynamic_pointer_cast<const SemidirectGroup>(ambient);
  if (!sd) throw PreconditionError("mark_acting_z: ambient group must be a semidirect product");
  return std::make_shared<ActingZSubgroup>(sd);
}

SubgroupPtr mark_componentwise(GroupPtr ambient, std::vector<Elem> generators) {
  auto dp = std::dynamic_pointer_cast<const DirectProduct>(ambient);
  if (!dp) throw PreconditionError("mark_componentwise: ambient group must be a direct product");
  check_abelian(*ambient, generators);
  return std::make_shared<ComponentwiseSubgroup>(dp, generators);
}

SubgroupPtr mark_subgroup(GroupPtr ambient, const std::vector<Elem>& generators) {
  check_abelian(*ambient, generators);
  const std::string kind = ambient->kind();
  if (kind == "free" || kind == "free_product") {
    std::vector<Elem> nontrivial;
    for (const Elem& g : generators)
      if (!ambient->is_identity(g)) nontrivial.push_back(g);
    if (nontrivial.empty()) return std::make_shared<TrivialSubgroup>(ambient);
    if (nontrivial.size() > 1)
      throw PreconditionError("marked subgroup in free kinds must be cyclic (one generator)");
    return mark_cyclic(ambient, nontrivial.front());
  }
  if (kind == "abelian" || kind == "finite_cyclic" || kind == "finitely_generated_abelian")
    return mark_lattice(ambient, generators);
  if (kind == "direct_product") return mark_componentwise(ambient, generators);
  if (kind == "semidirect") {
    // only the acting copy of Z is supported as a marked subgroup here
    auto sd = std::dynamic_pointer_cast<const SemidirectGroup>(ambient);
    for (const Elem& g : generators) {
      const auto& a = std::get<SemiElem>(g.v);
      for (const Int& x : a.vec)
        if (x != 0)
          throw PreconditionError(
              "semidirect marked subgroup must be the acting Z (use \"acting_Z\")");
    }
    return mark_acting_z(sd);
  }
  throw PreconditionError("mark_subgroup: unsupported ambient kind " + kind);
}

// ---------------------------------------------------------------------------
// ball enumeration
// ---------------------------------------------------------------------------

std::vector<std::pair<Elem, int>> ball_with_radius(const Group& group,
                                                   const std::vector<Elem>& generators, int R) {
  if (R < 0) throw PreconditionError("ball: radius must be >= 0");
  std::vector<Elem> step = generators;
  for (const Elem& g : generators) {
    Elem gi = group.inv(g);
    if (std::find(step.begin(), step.end(), gi) == step.end()) step.push_back(gi);
  }

  std::set<Elem> seen;
  std::vector<std::pair<Elem, int>> out;
  std::vector<Elem> frontier{group.identity()};
  seen.insert(group.identity());
  out.emplace_back(group.identity(), 0);
  for (int r = 1; r <= R; ++r) {
    std::vector<Elem> next;
    for (const Elem& g : frontier) {
      for (const Elem& s : step) {
        Elem h = group.mul(g, s);
        if (seen.insert(h).second) {
          check_budget(seen.size(), "ball element count");
          out.emplace_back(h, r);
          next.push_back(std::move(h));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::vector<Elem> ball(const Group& group, int R) {
  std::vector<Elem> out;
  for (auto& [g, r] : ball_with_radius(group, group.generators(), R)) out.push_back(g);
  return out;
}

std::vector<std::pair<Elem, int>> marked_ball(const GroupModel& model, int R) {
  return ball_with_radius(*model.group, model.marked->generators(), R);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

GroupPtr group_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "free") return make_free(j.at("rank").get<int>());
  if (kind == "finite_cyclic") return make_finite_cyclic(j.at("n").get<long long>());
  if (kind == "abelian" || kind == "finitely_generated_abelian") {
    std::vector<Int> inv;
    for (const auto& n : j.at("invariants")) inv.push_back(Int(n.get<long long>()));
    return make_abelian(std::move(inv));
  }
  if (kind == "semidirect")
    return make_semidirect(j.at("matrix").get<std::vector<std::vector<long long>>>());
  if (kind == "direct_product" || kind == "free_product") {
    std::vector<GroupPtr> factors;
    for (const auto& f : j.at("factors")) factors.push_back(group_from_json(f));
    return kind == "direct_product" ? make_direct_product(std::move(factors))
                                    : make_free_product(std::move(factors));
  }
  throw PreconditionError("model_from_json: unknown kind '" + kind + "'");
}

json group_to_json(const Group& g) {
  json j;
  j["kind"] = g.kind();
  if (auto* f = dynamic_cast<const FreeGroup*>(&g)) {
    j["rank"] = f->rank();
  } else if (auto* a = dynamic_cast<const AbelianGroup*>(&g)) {
    if (g.kind() == "finite_cyclic") {
      j["n"] = a->invariants()[0].convert_to<long long>();
    } else {
      std::vector<long long> inv;
      for (const Int& n : a->invariants()) inv.push_back(n.convert_to<long long>());
      j["invariants"] = inv;
    }
  } else if (auto* s = dynamic_cast<const SemidirectGroup*>(&g)) {
    std::vector<std::vector<long long>> m;
    for (const auto& row : s->matrix()) {
      std::vector<long long> r;
      for (const Int& x : row) r.push_back(x.convert_to<long long>());
      m.push_back(r);
    }
    j["matrix"] = m;
  } else if (auto* d = dynamic_cast<const DirectProduct*>(&g)) {
    json factors = json::array();
    for (const auto& f : d->factors()) factors.push_back(group_to_json(*f));
    j["factors"] = factors;
  } else if (auto* p = dynamic_cast<const FreeProduct*>(&g)) {
    json factors = json::array();
    for (const auto& f : p->factors()) factors.push_back(group_to_json(*f));
    j["factors"] = factors;
  }
  return j;
}

}  // namespace

GroupModel model_from_json(const std::string& text) {
  json j = json::parse(text);
  GroupModel model;
  model.group = group_from_json(j);
  if (!j.contains("marked")) throw PreconditionError("model_from_json: missing 'marked'");
  const json& marked = j.at("marked");
  if (marked.is_string()) {
    const std::string tag = marked.get<std::string>();
    if (tag != "acting_Z")
      throw PreconditionError("model_from_json: unknown marked tag '" + tag + "'");
    model.marked = mark_acting_z(model.group);
  } else {
    std::vector<Elem> gens;
    for (const auto& s : marked) gens.push_back(model.group->parse(s.get<std::string>()));
    model.marked = mark_subgroup(model.group, gens);
  }
  return model;
}

std::string model_to_json(const GroupModel& model) {
  json j = group_to_json(*model.group);
  if (std::dynamic_pointer_cast<const ActingZSubgroup>(model.marked)) {
    j["marked"] = "acting_Z";
  } else {
    json gens = json::array();
    for (const Elem& g : model.marked->generators()) gens.push_back(model.group->format(g));
    j["marked"] = gens;
  }
  return j.dump();
}

}  // namespace masalab::groups

#include "masalab/rank_one.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace masalab::rankone {

using json = nlohmann::json;
using boost::multiprecision::cpp_int;

void CutSpacerSpec::validate() const {
  if (cuts.size() != spacers.size())
    throw PreconditionError("CutSpacerSpec: cuts/spacers length mismatch");
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    if (cuts[k] < 1) throw PreconditionError("CutSpacerSpec: cut counts must be >= 1");
    if (spacers[k].size() != static_cast<std::size_t>(cuts[k]))
      throw PreconditionError("CutSpacerSpec: spacer array length must equal the cut count");
    for (int s : spacers[k])
      if (s < 0) throw PreconditionError("CutSpacerSpec: spacer counts must be nonnegative");
  }
}

CutSpacerSpec CutSpacerSpec::staircase(int stages) {
  // Stage k cuts into k columns with j spacers over column j.  The first cut
  // is the degenerate single-column one; heights run 1, 2, 7, 27, 118, ...
  CutSpacerSpec spec;
  for (int k = 1; k <= stages; ++k) {
    spec.cuts.push_back(k);
    std::vector<int> s(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) s[static_cast<std::size_t>(j - 1)] = j;
    spec.spacers.push_back(std::move(s));
  }
  return spec;
}

Tower build_tower(const CutSpacerSpec& spec, int K) {
  spec.validate();
  if (K < 1 || static_cast<std::size_t>(K) > spec.cuts.size())
    throw PreconditionError("build_tower: stage K out of range for the spec");

  Tower t;
  t.spacer_stage = {0};
  t.ancestry.push_back({0});  // stage 0: single level over itself

  for (int k = 1; k <= K; ++k) {
    const int r = spec.cuts[static_cast<std::size_t>(k - 1)];
    const auto& sp = spec.spacers[static_cast<std::size_t>(k - 1)];
    long long new_height = static_cast<long long>(r) * t.height;
    for (int s : sp) new_height += s;
    check_budget(static_cast<std::size_t>(new_height), "build_tower interval count");

    std::vector<long long> parent;  // new level -> previous-stage level or -1
    parent.reserve(static_cast<std::size_t>(new_height));
    std::vector<int> spacer_stage;
    spacer_stage.reserve(static_cast<std::size_t>(new_height));
    for (int j = 0; j < r; ++j) {
      for (long long i = 0; i < t.height; ++i) {
        parent.push_back(i);
        spacer_stage.push_back(t.spacer_stage[static_cast<std::size_t>(i)]);
      }
      for (int s = 0; s < sp[static_cast<std::size_t>(j)]; ++s) {
        parent.push_back(-1);
        spacer_stage.push_back(k);
      }
    }

    // push every recorded ancestry map through the new stacking
    for (auto& anc : t.ancestry) {
      std::vector<long long> next(parent.size());
      for (std::size_t i = 0; i < parent.size(); ++i)
        next[i] = parent[i] < 0 ? -1 : anc[static_cast<std::size_t>(parent[i])];
      anc = std::move(next);
    }
    std::vector<long long> self(parent.size());
    for (std::size_t i = 0; i < self.size(); ++i) self[i] = static_cast<long long>(i);
    t.ancestry.push_back(std::move(self));

    t.height = new_height;
    t.width /= r;
    t.spacer_stage = std::move(spacer_stage);
    t.stage = k;
  }
  t.raw_mass = t.width * t.height;
  return t;
}

long long Tower::level_of(const Rational& t) const {
  if (t < 0 || t >= raw_mass) throw PreconditionError("Tower: point outside the stacked region");
  const Rational q = t / width;
  const cpp_int lvl = numerator(q) / denominator(q);
  return lvl.convert_to<long long>();
}

Rational Tower::apply(const Rational& t, long long m) const {
  const long long lvl = level_of(t);
  const long long target = lvl + m;
  if (target < 0 || target >= height)
    throw PreconditionError("Tower: orbit escapes tower (deepen K)");
  return t + Rational(m) * width;
}

LevelFunction centered_base_indicator(const Tower& tower, int base_stage) {
  if (base_stage < 0 || base_stage > tower.stage)
    throw PreconditionError("centered_base_indicator: base stage out of range");
  const auto& anc = tower.ancestry[static_cast<std::size_t>(base_stage)];
  long long hits = 0;
  for (long long a : anc)
    if (a == 0) ++hits;
  const double mean = static_cast<double>(hits) / static_cast<double>(tower.height);

  LevelFunction f;
  f.mean_removed = mean;
  f.values.resize(anc.size());
  for (std::size_t i = 0; i < anc.size(); ++i)
    f.values[i] = (anc[i] == 0 ? 1.0 : 0.0) - mean;
  return f;
}

CorrelationResult correlation_sequence(const Tower& tower, const LevelFunction& f, long long M) {
  if (f.values.size() != static_cast<std::size_t>(tower.height))
    throw PreconditionError("correlation_sequence: f must be defined per tower level");
  if (M < 0 || M > tower.height - 1)
    throw PreconditionError("correlation_sequence: M exceeds definable horizon");
  double mean = 0.0;
  for (double v : f.values) mean += v;
  mean /= static_cast<double>(tower.height);
  if (std::abs(mean) > 1e-9)
    throw PreconditionError("correlation_sequence: f must have zero mean");

  CorrelationResult out;
  out.c.resize(static_cast<std::size_t>(M + 1));
  const double h = static_cast<double>(tower.height);
  for (long long m = 0; m <= M; ++m) {
    double s = 0.0;
    for (long long i = 0; i + m < tower.height; ++i)
      s += f.values[static_cast<std::size_t>(i)] * f.values[static_cast<std::size_t>(i + m)];
    out.c[static_cast<std::size_t>(m)] = s / h;
  }
  out.truncation_fraction = static_cast<double>(M) / h;
  return out;
}

double correlation_monte_carlo(const Tower& tower, const LevelFunction& f, long long m,
                               std::size_t samples, unsigned seed, double* stddev_out) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<long long> pick(0, tower.height - 1);
  double s = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const long long i = pick(rng);
    const double v = (i + m < tower.height)
                         ? f.values[static_cast<std::size_t>(i)] *
                               f.values[static_cast<std::size_t>(i + m)]
                         : 0.0;
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = s / n;
  if (stddev_out) {
    const double var = std::max(0.0, s2 / n - mean * mean);
    *stddev_out = std::sqrt(var / n);
  }
  return mean;
}

CutSpacerSpec spec_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.contains("preset")) {
    const std::string name = j.at("preset").get<std::string>();
    if (name != "staircase")
      throw PreconditionError("spec_from_json: unknown preset '" + name + "'");
    return CutSpacerSpec::staircase(j.at("stages").get<int>());
  }
  CutSpacerSpec spec;
  spec.cuts = j.at("cuts").get<std::vector<int>>();
  spec.spacers = j.at("spacers").get<std::vector<std::vector<int>>>();
  spec.validate();
  return spec;
}

std::string correlation_to_csv(const CorrelationResult& result) {
  std::ostringstream os;
  os.precision(12);
  os << "m,c\n";
  for (std::size_t m = 0; m < result.c.size(); ++m) os << m << ',' << result.c[m] << '\n';
  return os.str();
}

}  // namespace masalab::rankone

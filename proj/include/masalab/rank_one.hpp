#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "masalab/common.hpp"

namespace masalab::rankone {

using Rational = boost::multiprecision::cpp_rational;

// Cutting-and-stacking recipe: at stage k the previous stack is cut into
// cuts[k-1] columns and spacers[k-1][j-1] spacer levels go on top of column j.
struct CutSpacerSpec {
  std::vector<int> cuts;                        // r_k >= 1
  std::vector<std::vector<int>> spacers;        // spacers[k-1].size() == r_k

  void validate() const;
  // r_k = k, s_{k,j} = j: at stage k the stack is cut into k equal columns
  // and j spacers go over column j.
  static CutSpacerSpec staircase(int stages);
};

// Stage-K tower in column-stacked coordinates: level i is the interval
// [i*w, (i+1)*w) and the transformation translates level i onto level i+1.
struct Tower {
  int stage = 0;
  long long height = 1;
  Rational width = 1;              // exact
  Rational raw_mass;               // height * width, before normalization
  // For each level, the stage index at which it entered as a spacer
  // (0 = original base interval material).
  std::vector<int> spacer_stage;
  // ancestry[k][i] = level of the stage-k tower this stage-K level sits over,
  // or -1 for spacer material added after stage k.  ancestry.size() == stage+1.
  std::vector<std::vector<long long>> ancestry;

  long long level_of(const Rational& t) const;
  // T^m as translation m levels up the same column; throws PreconditionError
  // when the orbit escapes the stage-K tower.
  Rational apply(const Rational& t, long long m) const;
};

Tower build_tower(const CutSpacerSpec& spec, int K);

// Level-step function with zero mean used for correlations: the indicator of
// the stage-`base_stage` base level, centered under normalized tower mass.
struct LevelFunction {
  std::vector<double> values;  // per stage-K level
  double mean_removed = 0.0;
};

LevelFunction centered_base_indicator(const Tower& tower, int base_stage);

struct CorrelationResult {
  std::vector<double> c;            // c[0..M]
  // fraction of tower mass on which T^m is undefined at the largest lag;
  // reported alongside the values (truncation bias indicator)
  double truncation_fraction = 0.0;
};

// c(m) = (1/h) sum_{i < h-m} f(i) f(i+m); c(0) is the variance of f.
CorrelationResult correlation_sequence(const Tower& tower, const LevelFunction& f, long long M);

// Monte-Carlo estimate of c(m) by uniform level sampling; used as an
// independent cross-check of the level-combinatorics route.
double correlation_monte_carlo(const Tower& tower, const LevelFunction& f, long long m,
                               std::size_t samples, unsigned seed, double* stddev_out = nullptr);

// JSON: {"cuts":[...],"spacers":[[...],...]} or {"preset":"staircase","stages":K}
CutSpacerSpec spec_from_json(const std::string& text);
std::string correlation_to_csv(const CorrelationResult& result);

}  // namespace masalab::rankone

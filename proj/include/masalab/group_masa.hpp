#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "masalab/common.hpp"
#include "masalab/groups.hpp"

namespace masalab::masa {

using groups::Elem;
using groups::GroupModel;

// Finitely supported element of the group algebra, coefficients indexed by
// group elements in normal form.  Zero coefficients are pruned.
struct AlgebraElement {
  std::map<Elem, Complex> support;

  void add(const Elem& g, const Complex& c);
  bool is_zero() const { return support.empty(); }
};

AlgebraElement unit(const Elem& g);
AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(const AlgebraElement& a, const Complex& c);
AlgebraElement mul(const groups::Group& group, const AlgebraElement& a, const AlgebraElement& b);
// x* has coefficient conj(x(g^{-1})) at g.
AlgebraElement adjoint(const groups::Group& group, const AlgebraElement& a);
// tau(x) = coefficient at the identity.
Complex trace(const groups::Group& group, const AlgebraElement& a);
double norm2(const AlgebraElement& a);  // sqrt(sum |coeff|^2)

// Restriction of the support to the marked subgroup; exact in group models.
AlgebraElement conditional_expectation(const GroupModel& model, const AlgebraElement& x);

// L1 norm of an element of the masa, evaluated as the average of |f| over a
// quadrature grid on the dual of the marked subgroup.  The grid is dense
// enough (>= 2*maxdeg+1 points per free coordinate) that the companion L2
// quadrature is exact, so the reported value obeys l1 <= l2 exactly.
double masa_l1_norm(const GroupModel& model, const AlgebraElement& y);

struct CesaroDiagnostics {
  long long N = 0;
  double avg_l2_sq = 0.0;   // (i)   mean of ||E_A(x v^k x*)||_2^2 over |k| <= N
  double avg_l2 = 0.0;      // (i)'  mean of ||.||_2
  double avg_l1_sq = 0.0;   // (ii)  mean of ||.||_1^2
  double avg_l1 = 0.0;      // (ii)' mean of ||.||_1
  bool all_vanish = false;
};

// Requires E_A(x) = 0 and v an infinite-order element of the marked subgroup.
CesaroDiagnostics cesaro_diagnostics(const GroupModel& model, const AlgebraElement& x,
                                     const Elem& v, long long N);

struct STWitness {
  Elem g, g0, h;
  int radius = 0;  // word length of g0 in the marked generators
};

struct STReport {
  enum class Verdict { kHoldsWithE, kViolation, kInconclusive };
  Verdict verdict = Verdict::kHoldsWithE;
  int radius = 0;
  std::vector<Elem> exceptional;   // E: the g0 values that must be excluded
  std::vector<STWitness> witnesses;
  bool finite_horizon = true;      // holds_with_E is only a radius-R certificate
};

// Searches g*g0*h in Gamma_0 over g,h in F and g0 in the radius-R ball of the
// marked subgroup.  A witness at the boundary radius is treated as evidence of
// an unbounded family (verdict violation); otherwise the witness g0 set E is
// reported when it fits in E_bound.
STReport st_condition(const GroupModel& model, const std::vector<Elem>& F, int R,
                      std::size_t E_bound);

struct KgReport {
  std::vector<std::pair<Elem, Elem>> pairs;  // (h1, h2) with h1*g*h2 = g
  int radius = 0;
  bool boundary_hit = false;  // a nontrivial pair at the boundary: likely infinite
  enum class Certificate { kExact, kRadius } certificate = Certificate::kRadius;
  bool trivial() const { return pairs.size() == 1 && !boundary_hit; }
};

// K_g = {(h1,h2) in Gamma_0^2 : h1*g*h2 = g}, enumerated through h1 = g*h2^-1*g^-1.
KgReport stabilizer_kg(const GroupModel& model, const Elem& g, int R);

struct MalnormalReport {
  bool malnormal = true;  // finite-horizon certificate at the given radius
  int radius = 0;
  std::optional<std::pair<Elem, Elem>> witness;  // (g, h) with g h g^-1 in Gamma_0 \ {e}
};

MalnormalReport malnormality_check(const GroupModel& model, int R);

struct IccReport {
  bool evidence = true;
  int radius = 0;
  long long threshold = 0;
  long long min_class_size = 0;
  std::optional<Elem> worst;  // element with the smallest observed class
};

// Conjugacy classes sampled within radius 2R; threshold defaults to 2R.
IccReport icc_check(const GroupModel& model, int R, long long threshold = 0);

struct AhpResult {
  std::vector<long long> indices;  // k_1 < ... < k_L with norms < 1/l
  bool conclusive = false;
};

AhpResult ahp_subsequence(const GroupModel& model, const std::vector<AlgebraElement>& family,
                          const Elem& v, int L, long long K_max);

struct WanderingResult {
  bool wandering = false;
  double max_defect = 0.0;
  long long worst_n = 0;
};

// Checks E_A(zeta v^n zeta*) = 0 for 0 < |n| <= N; requires E_A(zeta) = 0.
WanderingResult wandering_test(const GroupModel& model, const AlgebraElement& zeta,
                               const Elem& v, long long N);

// (sum_k ||E_A(xi1 v^k xi2*)||_2^2, brute-force bivariate coefficient energy
// sum_{n,m} |<v^n xi1 v^m, xi2>|^2).  Requires the marked subgroup to be the
// infinite cyclic group generated by v (or v^-1).  Throws when the nonzero
// terms form an infinite arithmetic progression.
std::pair<double, double> summability_identity(const GroupModel& model, const AlgebraElement& xi1,
                                               const AlgebraElement& xi2, const Elem& v);

// Parses "1.0*b + (0,1)*a*b^-1" style strings over the ambient group.
AlgebraElement parse_element(const groups::Group& group, const std::string& text);
std::string format_element(const groups::Group& group, const AlgebraElement& x);

std::string st_report_to_json(const GroupModel& model, const STReport& report);
std::string kg_report_to_json(const GroupModel& model, const KgReport& report);

}  // namespace masalab::masa

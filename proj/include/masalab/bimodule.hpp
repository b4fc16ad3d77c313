#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "masalab/circle_measures.hpp"
#include "masalab/common.hpp"
#include "masalab/group_masa.hpp"

namespace masalab::bimodule {

using masa::AlgebraElement;
using masa::GroupModel;

// ---------------------------------------------------------------------------
// Finite abelian index space X = prod Z/n_j, elements and characters both
// flattened to a single mixed-radix index.
// ---------------------------------------------------------------------------

struct DualSpace {
  std::vector<long long> orders;

  long long size() const;
  std::vector<long long> unflatten(long long index) const;
  long long flatten(const std::vector<long long>& coords) const;
  long long add(long long a, long long b) const;       // componentwise mod n_j
  long long negate(long long a) const;
  // character chi_c evaluated at group element h (both flattened)
  Complex character(long long c, long long h) const;
};

// Sparse complex measure on X x X.
struct BivariateMeasure {
  DualSpace space;
  std::map<std::pair<long long, long long>, Complex> mass;

  void add(long long t, long long s, const Complex& m, double tol = 1e-14);
  Complex total() const;
  double total_variation() const;
  BivariateMeasure flip() const;  // theta(t,s) = (s,t)
  // support comparison used for the theta_* absolute-continuity flag
  bool support_subset_of(const BivariateMeasure& other, double tol = 1e-12) const;
  std::map<long long, Complex> marginal(int axis) const;  // axis 1 or 2
};

struct DisintegrationFibers {
  int axis = 1;
  DualSpace space;
  std::map<long long, Complex> base;                       // pushforward masses
  std::map<long long, std::map<long long, Complex>> fibers;  // t -> conditional on the other axis

  // Sum over fibers weighted by the base; equals the original measure exactly.
  BivariateMeasure reconstruct() const;
};

DisintegrationFibers disintegrate(const BivariateMeasure& beta, int axis);

// Per-fiber Rajchman diagnostics: each fiber is embedded in the circle through
// the cyclic coordinate (requires X = Z/n) and profiled.
struct FiberProfileSummary {
  std::vector<std::pair<long long, double>> tail_sups;  // (fiber index, tail_sup)
  double max_tail_sup = 0.0;
};

FiberProfileSummary fiber_mixing_profile(const DisintegrationFibers& fibers, long long N0,
                                         long long N);

// ---------------------------------------------------------------------------
// eta measures from group-algebra vectors (finite abelian marked subgroup)
// ---------------------------------------------------------------------------

// The measure with integral of u_{h1}(t) u_{h2}(s) equal to <u_{h1} z1 u_{h2}, z2>,
// where u_h is the dual function chi -> chi(h^{-1}); solved by exact character
// inversion.  Requires the marked subgroup finite abelian.
BivariateMeasure eta_from_vectors(const GroupModel& model, const AlgebraElement& zeta1,
                                  const AlgebraElement& zeta2);

struct PolarizationReport {
  double polarization_defect = 0.0;  // max |4 eta12 - combination|
  double domination_defect = 0.0;    // max (|eta12| - eta1 - eta2)_+
};

PolarizationReport polarization_check(const GroupModel& model, const AlgebraElement& zeta1,
                                      const AlgebraElement& zeta2);

// ---------------------------------------------------------------------------
// finite Koopman models
// ---------------------------------------------------------------------------

struct FiniteKoopmanModel {
  std::vector<long long> orders;                         // invariants of H
  std::vector<double> nu;                                // probability on X
  std::vector<std::vector<long long>> generator_perms;   // sigma_gen[x] = gen . x

  DualSpace h_space() const { return DualSpace{orders}; }
  long long xsize() const { return static_cast<long long>(nu.size()); }
  void validate() const;  // bijections, nu-preservation, commutation, orders

  std::vector<long long> permutation(long long h) const;  // sigma_h (h flattened)
  // (U_h f)(x) = f(sigma_h^{-1} x)
  std::vector<Complex> koopman(long long h, const std::vector<Complex>& f) const;
  Complex inner(const std::vector<Complex>& f, const std::vector<Complex>& g) const;

  // mu_{f1,f2}(psi) = <E_psi f1, f2> with E_psi = (1/|H|) sum_h conj(psi(h)) U_h.
  std::map<long long, Complex> spectral_measure(const std::vector<Complex>& f1,
                                                const std::vector<Complex>& f2) const;
};

struct SnagResult {
  Complex lhs;
  Complex rhs;
  double defect = 0.0;
};

// Crossed-product matrix coefficient <w_{g1} a(f1) w_{h1} w_{g2}, a(f2) w_{h2}>
// as an explicit trace, against the SNAG double character sum.  f1, f2 must be
// mean zero.  Group entries are flattened elements of H.
SnagResult snag_identity_check(const FiniteKoopmanModel& model, const std::vector<Complex>& f1,
                               const std::vector<Complex>& f2, long long g1, long long g2,
                               long long h1, long long h2);

// Pushforward of mu (x) normalized Haar under S(psi,chi) = (chi, chi*psi).
BivariateMeasure transport_S(const DualSpace& dual, const std::map<long long, Complex>& mu);

// eta of the vector a(f) in the crossed product, on dual(H) x dual(H).
BivariateMeasure koopman_eta(const FiniteKoopmanModel& model, const std::vector<Complex>& f);

// Maximal spectral type by the centered-indicator sweep: f0 = delta_x - nu(x)
// maximizing the number of nonzero spectral projections, ties broken by the
// lexicographically smallest index.  Returns (f0, mu_{f0}).
std::pair<std::vector<Complex>, std::map<long long, Complex>> maximal_spectral_type(
    const FiniteKoopmanModel& model);

// H acting on itself by translation with uniform nu.
FiniteKoopmanModel translation_model(const std::vector<long long>& orders);

// Invariant-factor lists of all abelian groups of order 2..max_order.
std::vector<std::vector<long long>> abelian_invariants_up_to(long long max_order);

// Random model: random abelian H, X a union of coset orbits H/K with
// orbit-constant nu; |H| and |X| bounded by max_size.
FiniteKoopmanModel random_koopman_model(std::mt19937& rng, long long max_size);
std::vector<Complex> random_mean_zero(const FiniteKoopmanModel& model, std::mt19937& rng);

// ---------------------------------------------------------------------------
// measure-class fingerprints
// ---------------------------------------------------------------------------

struct MeasureClassFingerprint {
  double ac_mass = 1.0;
  std::vector<std::pair<double, double>> singular_blocks;  // (block mass, weight), sorted desc
};

MeasureClassFingerprint fingerprint(const std::vector<double>& weights, int n_max = 32);
bool compare(const MeasureClassFingerprint& a, const MeasureClassFingerprint& b);

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

// {"orders":[...],"points":[[t,s,re,im],...]}
std::string measure_to_json(const BivariateMeasure& eta);
BivariateMeasure measure_from_json(const std::string& text);

// {"orders":[...],"nu":[...],"generators":[[...],...]}
std::string koopman_to_json(const FiniteKoopmanModel& model);
FiniteKoopmanModel koopman_from_json(const std::string& text);

std::string fingerprint_to_json(const MeasureClassFingerprint& fp);
MeasureClassFingerprint fingerprint_from_json(const std::string& text);

}  // namespace masalab::bimodule

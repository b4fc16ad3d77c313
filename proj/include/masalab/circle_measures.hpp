#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "masalab/common.hpp"

namespace masalab::circle {

using Rational = boost::multiprecision::cpp_rational;

// Dissociate trigonometric product Prod_j (1 + a_j cos(2 pi n_j t)) dt.
// Frequencies must satisfy n_{j+1} >= 3 n_j + 1, which makes the
// representation n = sum eps_j n_j, eps_j in {-1,0,1}, unique.
struct RieszSpec {
  std::vector<long long> frequencies;
  std::vector<double> coefficients;

  void validate() const;
  // Closed-form Fourier coefficient: Prod (a_j/2)^{|eps_j|} over the unique
  // dissociate representation of n; 0 when no representation exists.
  double fourier_coefficient(long long n) const;
};

struct Atom {
  double point = 0.0;                     // in [0,1)
  double mass = 0.0;                      // > 0
  std::optional<Rational> exact;          // set when the point was given exactly
};

// Hybrid measure on the circle: atoms + gridded density + optional Riesz part.
class CircleMeasure {
 public:
  CircleMeasure() = default;
  CircleMeasure(std::vector<Atom> atoms, std::vector<double> density_samples,
                std::optional<RieszSpec> riesz);

  static CircleMeasure lebesgue(std::size_t grid = 1u << 14);
  static CircleMeasure dirac(const Rational& point, double mass);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& density() const { return density_; }
  const std::optional<RieszSpec>& riesz() const { return riesz_; }

  double atom_mass() const;
  double density_mass() const;
  double total_mass() const;

  Complex fourier_coefficient(long long n) const;
  // All coefficients for |n| <= N, indexed by n + N.  Uses one FFT for the
  // density part.
  std::vector<Complex> fourier_range(long long N) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> density_;
  std::optional<RieszSpec> riesz_;
};

struct FourierProfile {
  long long N = 0;
  long long N0 = 0;
  std::vector<Complex> coefficients;  // n = -N..N, index n + N
  std::vector<double> cesaro_sq;      // horizon N' = 0..N of mean |c(k)|^2
  std::vector<double> cesaro_abs;     // same with |c(k)|
  double tail_sup = 0.0;              // sup |c(n)| over N0 <= |n| <= N

  Complex coefficient(long long n) const { return coefficients[static_cast<std::size_t>(n + N)]; }
};

// Cesaro sequence of |mu^(k)|^2; terminal value approximates the atom energy
// sum of mass^2 (Wiener).
std::vector<double> wiener_atom_energy(const CircleMeasure& mu, long long N);

// Finite-horizon mixing diagnostic: never a verdict, just the decay profile.
FourierProfile rajchman_profile(const CircleMeasure& mu, long long N0, long long N);

// Cesaro averages of |mu^(k)|; vanishing terminal values are weak-mixing
// (non-atomicity) evidence at the horizon.
std::vector<double> weak_mixing_profile(const CircleMeasure& mu, long long N);

// Profile built from externally supplied coefficients c(-N..N) (e.g. rank-one
// correlation sequences).
FourierProfile profile_from_coefficients(std::vector<Complex> coefficients, long long N0);

// (Cesaro of |a_k|, Cesaro of |a_k|^2) at horizon N for a sequence indexed
// k = -N..N with declared bound B.
std::pair<double, double> cesaro_equivalence_check(const std::vector<double>& a, double bound,
                                                  long long N);

// JSON schema: {"atoms":[[t,m],...],"density":{"grid":G,"samples":[...]},
//               "riesz":{"freqs":[...],"coeffs":[...]}}.  Atom points given as
// strings "p/q" are kept exact.
CircleMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const CircleMeasure& mu);

// CSV with header n,re,im,abs.
std::string profile_to_csv(const FourierProfile& profile);

}  // namespace masalab::circle

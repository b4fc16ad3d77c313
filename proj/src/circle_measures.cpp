#include "masalab/circle_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "masalab/fft.hpp"

namespace masalab::circle {

using json = nlohmann::json;
using boost::multiprecision::cpp_int;

void RieszSpec::validate() const {
  if (frequencies.size() != coefficients.size())
    throw PreconditionError("RieszSpec: frequency/coefficient length mismatch");
  if (frequencies.empty()) throw PreconditionError("RieszSpec: empty frequency list");
  long long prev = 0;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const long long n = frequencies[j];
    if (n <= 0) throw PreconditionError("RieszSpec: frequencies must be positive");
    if (j > 0 && n < 3 * prev + 1)
      throw PreconditionError("RieszSpec: dissociateness n_{j+1} >= 3 n_j + 1 violated");
    if (std::abs(coefficients[j]) > 1.0 + 1e-15)
      throw PreconditionError("RieszSpec: |a_j| <= 1 required");
    prev = n;
  }
}

double RieszSpec::fourier_coefficient(long long n) const {
  // Greedy from the largest frequency; the dissociate gaps make this the
  // unique representation when one exists.
  std::vector<long long> prefix(frequencies.size() + 1, 0);
  for (std::size_t j = 0; j < frequencies.size(); ++j)
    prefix[j + 1] = prefix[j] + frequencies[j];

  long long r = n;
  double product = 1.0;
  for (std::size_t j = frequencies.size(); j-- > 0;) {
    if (std::llabs(r) > prefix[j]) {
      const long long sign = r > 0 ? 1 : -1;
      r -= sign * frequencies[j];
      product *= coefficients[j] / 2.0;
      if (std::llabs(r) > prefix[j]) return 0.0;  // unrepresentable
    }
  }
  return r == 0 ? product : 0.0;
}

CircleMeasure::CircleMeasure(std::vector<Atom> atoms, std::vector<double> density_samples,
                             std::optional<RieszSpec> riesz)
    : density_(std::move(density_samples)), riesz_(std::move(riesz)) {
  if (!density_.empty()) {
    const std::size_t g = density_.size();
    if ((g & (g - 1)) != 0) throw PreconditionError("CircleMeasure: grid size must be a power of two");
    for (double s : density_)
      if (s < 0.0) throw PreconditionError("CircleMeasure: density samples must be nonnegative");
  }
  if (riesz_) riesz_->validate();

  // merge coincident atoms (exact points compare exactly, floats bitwise)
  for (Atom& a : atoms) {
    if (!(a.mass > 0.0)) throw PreconditionError("CircleMeasure: atom masses must be positive");
    if (a.point < 0.0 || a.point >= 1.0) throw PreconditionError("CircleMeasure: atom point outside [0,1)");
    auto same = [&](const Atom& b) {
      if (a.exact && b.exact) return *a.exact == *b.exact;
      if (a.exact || b.exact) return false;
      return a.point == b.point;
    };
    auto hit = std::find_if(atoms_.begin(), atoms_.end(), same);
    if (hit != atoms_.end())
      hit->mass += a.mass;
    else
      atoms_.push_back(a);
  }
}

CircleMeasure CircleMeasure::lebesgue(std::size_t grid) {
  return CircleMeasure({}, std::vector<double>(grid, 1.0), std::nullopt);
}

CircleMeasure CircleMeasure::dirac(const Rational& point, double mass) {
  Atom a;
  a.exact = point;
  a.point = static_cast<double>(point);
  a.mass = mass;
  return CircleMeasure({a}, {}, std::nullopt);
}

double CircleMeasure::atom_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.mass;
  return m;
}

double CircleMeasure::density_mass() const {
  if (density_.empty()) return 0.0;
  return std::accumulate(density_.begin(), density_.end(), 0.0) /
         static_cast<double>(density_.size());
}

double CircleMeasure::total_mass() const {
  return atom_mass() + density_mass() + (riesz_ ? 1.0 : 0.0);
}

namespace {

// e^{2 pi i n t} with the fractional part of n*t reduced exactly for
// rational atom points; keeps |mu^| == mass exact-ish at large n.
Complex atom_phase(const Atom& a, long long n) {
  if (a.exact) {
    const cpp_int num = numerator(*a.exact) * n;
    const cpp_int den = denominator(*a.exact);
    cpp_int rem = num % den;
    if (rem < 0) rem += den;
    return unit_phase(static_cast<double>(Rational(rem, den)));
  }
  return unit_phase(std::fmod(static_cast<double>(n) * a.point, 1.0));
}

}  // namespace

Complex CircleMeasure::fourier_coefficient(long long n) const {
  Complex c(0.0, 0.0);
  for (const Atom& a : atoms_) c += a.mass * atom_phase(a, n);
  if (!density_.empty()) {
    const std::size_t g = density_.size();
    Complex s(0.0, 0.0);
    for (std::size_t x = 0; x < g; ++x) {
      const long long phase = (n % static_cast<long long>(g)) * static_cast<long long>(x);
      s += density_[x] * unit_phase(static_cast<double>(phase % static_cast<long long>(g)) /
                                    static_cast<double>(g));
    }
    c += s / static_cast<double>(g);
  }
  if (riesz_) c += riesz_->fourier_coefficient(n);
  return c;
}

std::vector<Complex> CircleMeasure::fourier_range(long long N) const {
  if (N < 0) throw PreconditionError("fourier_range: N >= 0 required");
  std::vector<Complex> out(static_cast<std::size_t>(2 * N + 1), Complex(0.0, 0.0));

  std::vector<Complex> bins;
  if (!density_.empty()) {
    bins.assign(density_.begin(), density_.end());
    fft_pow2(bins, +1);  // bins[k] = sum_x s_x e^{2 pi i x k / G}
    for (Complex& b : bins) b /= static_cast<double>(density_.size());
  }

  const long long g = static_cast<long long>(density_.size());
  for (long long n = -N; n <= N; ++n) {
    Complex c(0.0, 0.0);
    for (const Atom& a : atoms_) c += a.mass * atom_phase(a, n);
    if (!bins.empty()) {
      long long k = n % g;
      if (k < 0) k += g;
      c += bins[static_cast<std::size_t>(k)];
    }
    if (riesz_) c += riesz_->fourier_coefficient(n);
    out[static_cast<std::size_t>(n + N)] = c;
  }
  return out;
}

namespace {

std::vector<double> cesaro_of(const std::vector<Complex>& coeffs, long long N,
                              double (*weight)(const Complex&)) {
  std::vector<double> out(static_cast<std::size_t>(N + 1));
  double run = weight(coeffs[static_cast<std::size_t>(N)]);  // n = 0 term
  out[0] = run;
  for (long long h = 1; h <= N; ++h) {
    run += weight(coeffs[static_cast<std::size_t>(N - h)]) +
           weight(coeffs[static_cast<std::size_t>(N + h)]);
    out[static_cast<std::size_t>(h)] = run / static_cast<double>(2 * h + 1);
  }
  return out;
}

double abs_sq(const Complex& c) { return std::norm(c); }
double abs_val(const Complex& c) { return std::abs(c); }

}  // namespace

std::vector<double> wiener_atom_energy(const CircleMeasure& mu, long long N) {
  if (N < 1) throw PreconditionError("wiener_atom_energy: N >= 1 required");
  return cesaro_of(mu.fourier_range(N), N, abs_sq);
}

FourierProfile profile_from_coefficients(std::vector<Complex> coefficients, long long N0) {
  if (coefficients.empty() || coefficients.size() % 2 == 0)
    throw PreconditionError("profile_from_coefficients: need coefficients for n = -N..N");
  FourierProfile p;
  p.N = static_cast<long long>(coefficients.size() / 2);
  p.N0 = N0;
  p.coefficients = std::move(coefficients);
  p.cesaro_sq = cesaro_of(p.coefficients, p.N, abs_sq);
  p.cesaro_abs = cesaro_of(p.coefficients, p.N, abs_val);
  p.tail_sup = 0.0;
  for (long long n = N0; n <= p.N; ++n) {
    p.tail_sup = std::max(p.tail_sup, std::abs(p.coefficient(n)));
    p.tail_sup = std::max(p.tail_sup, std::abs(p.coefficient(-n)));
  }
  return p;
}

FourierProfile rajchman_profile(const CircleMeasure& mu, long long N0, long long N) {
  if (!(0 < N0 && N0 < N)) throw PreconditionError("rajchman_profile: 0 < N0 < N required");
  return profile_from_coefficients(mu.fourier_range(N), N0);
}

std::vector<double> weak_mixing_profile(const CircleMeasure& mu, long long N) {
  if (N < 1) throw PreconditionError("weak_mixing_profile: N >= 1 required");
  return cesaro_of(mu.fourier_range(N), N, abs_val);
}

std::pair<double, double> cesaro_equivalence_check(const std::vector<double>& a, double bound,
                                                  long long N) {
  if (a.size() != static_cast<std::size_t>(2 * N + 1))
    throw PreconditionError("cesaro_equivalence_check: sequence must cover k = -N..N");
  double s1 = 0.0, s2 = 0.0;
  for (double v : a) {
    if (std::abs(v) > bound)
      throw PreconditionError("cesaro_equivalence_check: declared bound violated");
    s1 += std::abs(v);
    s2 += v * v;
  }
  const double denom = static_cast<double>(2 * N + 1);
  return {s1 / denom, s2 / denom};
}

CircleMeasure measure_from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    for (const auto& pair : j.at("atoms")) {
      Atom a;
      if (pair.at(0).is_string()) {
        const std::string s = pair.at(0).get<std::string>();
        const auto slash = s.find('/');
        if (slash == std::string::npos)
          a.exact = Rational(cpp_int(s));
        else
          a.exact = Rational(cpp_int(s.substr(0, slash)), cpp_int(s.substr(slash + 1)));
        a.point = static_cast<double>(*a.exact);
      } else {
        a.point = pair.at(0).get<double>();
      }
      a.mass = pair.at(1).get<double>();
      atoms.push_back(a);
    }
  }
  std::vector<double> density;
  if (j.contains("density")) {
    density = j.at("density").at("samples").get<std::vector<double>>();
    const auto g = j.at("density").at("grid").get<std::size_t>();
    if (g != density.size())
      throw PreconditionError("measure_from_json: grid size does not match sample count");
  }
  std::optional<RieszSpec> riesz;
  if (j.contains("riesz")) {
    RieszSpec r;
    r.frequencies = j.at("riesz").at("freqs").get<std::vector<long long>>();
    r.coefficients = j.at("riesz").at("coeffs").get<std::vector<double>>();
    riesz = std::move(r);
  }
  return CircleMeasure(std::move(atoms), std::move(density), std::move(riesz));
}

std::string measure_to_json(const CircleMeasure& mu) {
  json j = json::object();
  json atoms = json::array();
  for (const Atom& a : mu.atoms()) {
    json pair = json::array();
    if (a.exact) {
      std::ostringstream os;
      os << numerator(*a.exact) << '/' << denominator(*a.exact);
      pair.push_back(os.str());
    } else {
      pair.push_back(a.point);
    }
    pair.push_back(a.mass);
    atoms.push_back(pair);
  }
  j["atoms"] = atoms;
  if (!mu.density().empty())
    j["density"] = {{"grid", mu.density().size()}, {"samples", mu.density()}};
  if (mu.riesz())
    j["riesz"] = {{"freqs", mu.riesz()->frequencies}, {"coeffs", mu.riesz()->coefficients}};
  return j.dump();
}

std::string profile_to_csv(const FourierProfile& profile) {
  std::ostringstream os;
  os.precision(12);
  os << "n,re,im,abs\n";
  for (long long n = -profile.N; n <= profile.N; ++n) {
    const Complex c = profile.coefficient(n);
    os << n << ',' << c.real() << ',' << c.imag() << ',' << std::abs(c) << '\n';
  }
  return os.str();
}

}  // namespace masalab::circle

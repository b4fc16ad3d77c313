#include "masalab/bimodule.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace masalab::bimodule {

using groups::Elem;
using groups::Int;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// DualSpace
// ---------------------------------------------------------------------------

long long DualSpace::size() const {
  long long n = 1;
  for (long long o : orders) n *= o;
  return n;
}

std::vector<long long> DualSpace::unflatten(long long index) const {
  std::vector<long long> c(orders.size());
  for (std::size_t j = 0; j < orders.size(); ++j) {
    c[j] = index % orders[j];
    index /= orders[j];
  }
  return c;
}

long long DualSpace::flatten(const std::vector<long long>& coords) const {
  long long index = 0;
  for (std::size_t j = orders.size(); j-- > 0;) index = index * orders[j] + coords[j] % orders[j];
  return index;
}

long long DualSpace::add(long long a, long long b) const {
  auto ca = unflatten(a), cb = unflatten(b);
  for (std::size_t j = 0; j < orders.size(); ++j) ca[j] = (ca[j] + cb[j]) % orders[j];
  return flatten(ca);
}

long long DualSpace::negate(long long a) const {
  auto c = unflatten(a);
  for (std::size_t j = 0; j < orders.size(); ++j) c[j] = (orders[j] - c[j]) % orders[j];
  return flatten(c);
}

Complex DualSpace::character(long long c, long long h) const {
  const auto cc = unflatten(c), ch = unflatten(h);
  double turns = 0.0;
  for (std::size_t j = 0; j < orders.size(); ++j)
    turns += static_cast<double>((cc[j] * ch[j]) % orders[j]) / static_cast<double>(orders[j]);
  return unit_phase(turns);
}

// ---------------------------------------------------------------------------
// BivariateMeasure
// ---------------------------------------------------------------------------

void BivariateMeasure::add(long long t, long long s, const Complex& m, double tol) {
  auto key = std::make_pair(t, s);
  auto it = mass.find(key);
  if (it == mass.end()) {
    if (std::abs(m) > tol) mass.emplace(key, m);
    return;
  }
  it->second += m;
  if (std::abs(it->second) <= tol) mass.erase(it);
}

Complex BivariateMeasure::total() const {
  Complex s(0.0, 0.0);
  for (const auto& [k, m] : mass) s += m;
  return s;
}

double BivariateMeasure::total_variation() const {
  double s = 0.0;
  for (const auto& [k, m] : mass) s += std::abs(m);
  return s;
}

BivariateMeasure BivariateMeasure::flip() const {
  BivariateMeasure out;
  out.space = space;
  for (const auto& [k, m] : mass) out.mass[{k.second, k.first}] = m;
  return out;
}

bool BivariateMeasure::support_subset_of(const BivariateMeasure& other, double tol) const {
  for (const auto& [k, m] : mass) {
    if (std::abs(m) <= tol) continue;
    auto it = other.mass.find(k);
    if (it == other.mass.end() || std::abs(it->second) <= tol) return false;
  }
  return true;
}

std::map<long long, Complex> BivariateMeasure::marginal(int axis) const {
  if (axis != 1 && axis != 2) throw PreconditionError("marginal: axis must be 1 or 2");
  std::map<long long, Complex> out;
  for (const auto& [k, m] : mass) out[axis == 1 ? k.first : k.second] += m;
  return out;
}

// ---------------------------------------------------------------------------
// disintegration
// ---------------------------------------------------------------------------

DisintegrationFibers disintegrate(const BivariateMeasure& beta, int axis) {
  if (axis != 1 && axis != 2) throw PreconditionError("disintegrate: axis must be 1 or 2");
  DisintegrationFibers out;
  out.axis = axis;
  out.space = beta.space;

  std::map<long long, std::map<long long, Complex>> rows;
  for (const auto& [k, m] : beta.mass) {
    const long long t = axis == 1 ? k.first : k.second;
    const long long s = axis == 1 ? k.second : k.first;
    rows[t][s] = m;
  }
  for (auto& [t, row] : rows) {
    Complex total(0.0, 0.0);
    for (const auto& [s, m] : row) total += m;
    if (std::abs(total) <= 1e-14)
      throw PreconditionError("disintegrate: fiber with vanishing total mass");
    out.base[t] = total;
    for (auto& [s, m] : row) m /= total;
    out.fibers[t] = std::move(row);
  }
  return out;
}

BivariateMeasure DisintegrationFibers::reconstruct() const {
  BivariateMeasure out;
  out.space = space;
  for (const auto& [t, row] : fibers) {
    const Complex w = base.at(t);
    for (const auto& [s, m] : row) {
      if (axis == 1)
        out.mass[{t, s}] = w * m;
      else
        out.mass[{s, t}] = w * m;
    }
  }
  return out;
}

FiberProfileSummary fiber_mixing_profile(const DisintegrationFibers& fibers, long long N0,
                                         long long N) {
  if (fibers.space.orders.size() != 1)
    throw PreconditionError("fiber_mixing_profile: no circle embedding (X must be cyclic)");
  const long long n = fibers.space.orders[0];

  FiberProfileSummary summary;
  for (const auto& [t, row] : fibers.fibers) {
    std::vector<circle::Atom> atoms;
    for (const auto& [s, m] : row) {
      if (std::abs(m.imag()) > 1e-10 || m.real() < -1e-10)
        throw PreconditionError("fiber_mixing_profile: fiber is not a positive measure");
      if (m.real() <= 0.0) continue;
      circle::Atom a;
      a.exact = circle::Rational(s, n);
      a.point = static_cast<double>(s) / static_cast<double>(n);
      a.mass = m.real();
      atoms.push_back(a);
    }
    const circle::CircleMeasure mu(std::move(atoms), {}, std::nullopt);
    const circle::FourierProfile profile = circle::rajchman_profile(mu, N0, N);
    summary.tail_sups.emplace_back(t, profile.tail_sup);
    summary.max_tail_sup = std::max(summary.max_tail_sup, profile.tail_sup);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// eta from group-algebra vectors
// ---------------------------------------------------------------------------

namespace {

// All elements of the finite abelian marked subgroup as group elements,
// indexed compatibly with DualSpace flattening over the generator orders.
std::vector<Elem> marked_elements(const GroupModel& model, const DualSpace& space) {
  const auto gens = model.marked->generators();
  const long long n = space.size();
  std::vector<Elem> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const auto coords = space.unflatten(i);
    Elem g = model.group->identity();
    for (std::size_t j = 0; j < gens.size(); ++j)
      g = model.group->mul(g, model.group->pow(gens[j], Int(coords[j])));
    out.push_back(g);
  }
  return out;
}

DualSpace marked_dual(const GroupModel& model) {
  if (model.marked->free_rank() != 0)
    throw PreconditionError("eta_from_vectors: marked subgroup must be finite abelian");
  DualSpace space;
  space.orders = model.marked->torsion_orders();
  if (space.orders.empty())
    throw PreconditionError("eta_from_vectors: marked subgroup is trivial");
  return space;
}

}  // namespace

BivariateMeasure eta_from_vectors(const GroupModel& model, const AlgebraElement& zeta1,
                                  const AlgebraElement& zeta2) {
  const DualSpace space = marked_dual(model);
  const auto elems = marked_elements(model, space);
  const long long n = space.size();
  check_budget(static_cast<std::size_t>(n * n), "eta_from_vectors pairings");

  const groups::Group& group = *model.group;
  const AlgebraElement z2star = masa::adjoint(group, zeta2);

  // kappa(h1,h2) = tau(zeta2* u_{h1} zeta1 u_{h2})
  std::vector<std::vector<Complex>> kappa(static_cast<std::size_t>(n),
                                          std::vector<Complex>(static_cast<std::size_t>(n)));
  for (long long i = 0; i < n; ++i) {
    const AlgebraElement left =
        masa::mul(group, z2star, masa::mul(group, masa::unit(elems[static_cast<std::size_t>(i)]), zeta1));
    for (long long j = 0; j < n; ++j)
      kappa[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = masa::trace(
          group, masa::mul(group, left, masa::unit(elems[static_cast<std::size_t>(j)])));
  }

  BivariateMeasure eta;
  eta.space = space;
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (long long t = 0; t < n; ++t) {
    for (long long s = 0; s < n; ++s) {
      Complex v(0.0, 0.0);
      for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j)
          v += space.character(t, i) * space.character(s, j) *
               kappa[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      eta.add(t, s, v * norm, 1e-13);
    }
  }
  return eta;
}

PolarizationReport polarization_check(const GroupModel& model, const AlgebraElement& zeta1,
                                      const AlgebraElement& zeta2) {
  const Complex i1(0.0, 1.0);
  const AlgebraElement plus = masa::add(zeta1, zeta2);
  const AlgebraElement minus = masa::add(zeta1, masa::scale(zeta2, Complex(-1.0, 0.0)));
  const AlgebraElement plus_i = masa::add(zeta1, masa::scale(zeta2, i1));
  const AlgebraElement minus_i = masa::add(zeta1, masa::scale(zeta2, -i1));

  const BivariateMeasure eta12 = eta_from_vectors(model, zeta1, zeta2);
  const BivariateMeasure e1 = eta_from_vectors(model, zeta1, zeta1);
  const BivariateMeasure e2 = eta_from_vectors(model, zeta2, zeta2);
  const BivariateMeasure ep = eta_from_vectors(model, plus, plus);
  const BivariateMeasure em = eta_from_vectors(model, minus, minus);
  const BivariateMeasure epi = eta_from_vectors(model, plus_i, plus_i);
  const BivariateMeasure emi = eta_from_vectors(model, minus_i, minus_i);

  auto at = [](const BivariateMeasure& m, const std::pair<long long, long long>& k) {
    auto it = m.mass.find(k);
    return it == m.mass.end() ? Complex(0.0, 0.0) : it->second;
  };

  std::set<std::pair<long long, long long>> points;
  for (const auto* m : {&eta12, &e1, &e2, &ep, &em, &epi, &emi})
    for (const auto& [k, v] : m->mass) points.insert(k);

  PolarizationReport report;
  for (const auto& k : points) {
    const Complex combo =
        (at(ep, k) - at(em, k)) + i1 * (at(epi, k) - at(emi, k));
    report.polarization_defect =
        std::max(report.polarization_defect, std::abs(4.0 * at(eta12, k) - combo));
    const double dom = std::abs(at(eta12, k)) - at(e1, k).real() - at(e2, k).real();
    report.domination_defect = std::max(report.domination_defect, dom);
  }
  report.domination_defect = std::max(report.domination_defect, 0.0);
  return report;
}

// ---------------------------------------------------------------------------
// Koopman models
// ---------------------------------------------------------------------------

void FiniteKoopmanModel::validate() const {
  const long long nx = xsize();
  if (nx == 0) throw PreconditionError("Koopman model: empty space");
  double total = 0.0;
  for (double w : nu) {
    if (w < 0.0) throw PreconditionError("Koopman model: nu must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw PreconditionError("Koopman model: nu must be a probability measure");
  if (generator_perms.size() != orders.size())
    throw PreconditionError("Koopman model: one permutation per generator required");

  for (std::size_t g = 0; g < generator_perms.size(); ++g) {
    const auto& p = generator_perms[g];
    if (static_cast<long long>(p.size()) != nx)
      throw PreconditionError("Koopman model: permutation size mismatch");
    std::vector<bool> seen(static_cast<std::size_t>(nx), false);
    for (long long x = 0; x < nx; ++x) {
      const long long y = p[static_cast<std::size_t>(x)];
      if (y < 0 || y >= nx || seen[static_cast<std::size_t>(y)])
        throw PreconditionError("Koopman model: generator is not a permutation");
      seen[static_cast<std::size_t>(y)] = true;
      if (std::abs(nu[static_cast<std::size_t>(y)] - nu[static_cast<std::size_t>(x)]) > 1e-12)
        throw PreconditionError("Koopman model: action does not preserve nu");
    }
    // order
    std::vector<long long> acc(p);
    for (long long k = 1; k < orders[g]; ++k)
      for (long long x = 0; x < nx; ++x)
        acc[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(acc[static_cast<std::size_t>(x)])];
    // acc = p^{orders[g]}
    for (long long x = 0; x < nx; ++x)
      if (acc[static_cast<std::size_t>(x)] != x)
        throw PreconditionError("Koopman model: generator order does not divide declared order");
  }
  // commutation
  for (std::size_t a = 0; a < generator_perms.size(); ++a)
    for (std::size_t b = a + 1; b < generator_perms.size(); ++b)
      for (long long x = 0; x < nx; ++x) {
        const auto& pa = generator_perms[a];
        const auto& pb = generator_perms[b];
        if (pa[static_cast<std::size_t>(pb[static_cast<std::size_t>(x)])] !=
            pb[static_cast<std::size_t>(pa[static_cast<std::size_t>(x)])])
          throw PreconditionError("Koopman model: generators do not commute");
      }
}

std::vector<long long> FiniteKoopmanModel::permutation(long long h) const {
  const long long nx = xsize();
  std::vector<long long> perm(static_cast<std::size_t>(nx));
  for (long long x = 0; x < nx; ++x) perm[static_cast<std::size_t>(x)] = x;
  const auto coords = h_space().unflatten(h);
  for (std::size_t g = 0; g < orders.size(); ++g)
    for (long long k = 0; k < coords[g]; ++k)
      for (long long x = 0; x < nx; ++x)
        perm[static_cast<std::size_t>(x)] =
            generator_perms[g][static_cast<std::size_t>(perm[static_cast<std::size_t>(x)])];
  return perm;
}

std::vector<Complex> FiniteKoopmanModel::koopman(long long h, const std::vector<Complex>& f) const {
  const auto perm = permutation(h);
  std::vector<Complex> out(f.size());
  // (U_h f)(sigma_h x) = f(x)
  for (std::size_t x = 0; x < f.size(); ++x) out[static_cast<std::size_t>(perm[x])] = f[x];
  return out;
}

Complex FiniteKoopmanModel::inner(const std::vector<Complex>& f,
                                  const std::vector<Complex>& g) const {
  Complex s(0.0, 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) s += nu[x] * f[x] * std::conj(g[x]);
  return s;
}

std::map<long long, Complex> FiniteKoopmanModel::spectral_measure(
    const std::vector<Complex>& f1, const std::vector<Complex>& f2) const {
  const DualSpace H = h_space();
  const long long nh = H.size();
  std::map<long long, Complex> mu;
  for (long long psi = 0; psi < nh; ++psi) {
    std::vector<Complex> proj(f1.size(), Complex(0.0, 0.0));
    for (long long h = 0; h < nh; ++h) {
      const Complex w = std::conj(H.character(psi, h));
      const auto uf = koopman(h, f1);
      for (std::size_t x = 0; x < proj.size(); ++x) proj[x] += w * uf[x];
    }
    for (Complex& c : proj) c /= static_cast<double>(nh);
    const Complex v = inner(proj, f2);
    if (std::abs(v) > 1e-15) mu[psi] = v;
  }
  return mu;
}

// ---------------------------------------------------------------------------
// SNAG / transport
// ---------------------------------------------------------------------------

namespace {

// element of the crossed product: sum_h alpha(a_h) w_h
using CPElement = std::map<long long, std::vector<Complex>>;

CPElement cp_unitary(const FiniteKoopmanModel& model, long long h) {
  return {{h, std::vector<Complex>(static_cast<std::size_t>(model.xsize()), Complex(1.0, 0.0))}};
}

CPElement cp_function(const std::vector<Complex>& f) { return {{0, f}}; }

CPElement cp_mul(const FiniteKoopmanModel& model, const CPElement& a, const CPElement& b) {
  const DualSpace H = model.h_space();
  CPElement out;
  for (const auto& [g, ag] : a) {
    for (const auto& [h, bh] : b) {
      const auto shifted = model.koopman(g, bh);
      auto& acc = out[H.add(g, h)];
      if (acc.empty()) acc.assign(ag.size(), Complex(0.0, 0.0));
      for (std::size_t x = 0; x < ag.size(); ++x) acc[x] += ag[x] * shifted[x];
    }
  }
  return out;
}

CPElement cp_adjoint(const FiniteKoopmanModel& model, const CPElement& a) {
  const DualSpace H = model.h_space();
  CPElement out;
  for (const auto& [g, ag] : a) {
    std::vector<Complex> conj(ag.size());
    for (std::size_t x = 0; x < ag.size(); ++x) conj[x] = std::conj(ag[x]);
    out[H.negate(g)] = model.koopman(H.negate(g), conj);
  }
  return out;
}

Complex cp_trace(const FiniteKoopmanModel& model, const CPElement& a) {
  auto it = a.find(0);
  if (it == a.end()) return {0.0, 0.0};
  Complex s(0.0, 0.0);
  for (std::size_t x = 0; x < it->second.size(); ++x) s += model.nu[x] * it->second[x];
  return s;
}

void require_mean_zero(const FiniteKoopmanModel& model, const std::vector<Complex>& f,
                       const char* name) {
  Complex mean(0.0, 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) mean += model.nu[x] * f[x];
  if (std::abs(mean) > 1e-12)
    throw PreconditionError(std::string("snag_identity_check: ") + name + " must be mean zero");
}

}  // namespace

SnagResult snag_identity_check(const FiniteKoopmanModel& model, const std::vector<Complex>& f1,
                               const std::vector<Complex>& f2, long long g1, long long g2,
                               long long h1, long long h2) {
  require_mean_zero(model, f1, "f1");
  require_mean_zero(model, f2, "f2");
  const DualSpace H = model.h_space();

  // LHS: explicit trace in the crossed product
  CPElement x = cp_mul(model, cp_unitary(model, g1), cp_function(f1));
  x = cp_mul(model, x, cp_unitary(model, h1));
  x = cp_mul(model, x, cp_unitary(model, g2));
  const CPElement y = cp_mul(model, cp_function(f2), cp_unitary(model, h2));
  const Complex lhs = cp_trace(model, cp_mul(model, cp_adjoint(model, y), x));

  // RHS: double character sum.  The lambda integral of chi(g1 g2 h1 h2^-1)
  // collapses to an indicator; the psi sum runs against the spectral measure
  // mu_{f1,f2}.  The right action enters through the opposite algebra, so g2
  // appears conjugated relative to the left leg.
  const long long constraint = H.add(H.add(g1, g2), H.add(h1, H.negate(h2)));
  Complex chi_avg(0.0, 0.0);
  const long long nh = H.size();
  for (long long chi = 0; chi < nh; ++chi) chi_avg += H.character(chi, constraint);
  chi_avg /= static_cast<double>(nh);

  const auto mu = model.spectral_measure(f1, f2);
  Complex psi_sum(0.0, 0.0);
  const long long shift = H.add(g2, H.add(h1, H.negate(h2)));
  for (const auto& [psi, m] : mu) psi_sum += std::conj(H.character(psi, shift)) * m;

  SnagResult result;
  result.lhs = lhs;
  result.rhs = chi_avg * psi_sum;
  result.defect = std::abs(result.lhs - result.rhs);
  return result;
}

BivariateMeasure transport_S(const DualSpace& dual, const std::map<long long, Complex>& mu) {
  BivariateMeasure out;
  out.space = dual;
  const long long n = dual.size();
  for (const auto& [psi, m] : mu)
    for (long long chi = 0; chi < n; ++chi)
      out.add(chi, dual.add(chi, psi), m / static_cast<double>(n), 1e-16);
  return out;
}

BivariateMeasure koopman_eta(const FiniteKoopmanModel& model, const std::vector<Complex>& f) {
  const DualSpace H = model.h_space();
  const long long nh = H.size();

  std::vector<Complex> c(static_cast<std::size_t>(nh));
  for (long long h = 0; h < nh; ++h) c[static_cast<std::size_t>(h)] = model.inner(model.koopman(h, f), f);

  BivariateMeasure eta;
  eta.space = H;
  const double norm = 1.0 / (static_cast<double>(nh) * static_cast<double>(nh));
  for (long long t = 0; t < nh; ++t) {
    for (long long s = 0; s < nh; ++s) {
      Complex v(0.0, 0.0);
      const long long d = H.add(t, H.negate(s));
      for (long long h = 0; h < nh; ++h) v += H.character(d, h) * c[static_cast<std::size_t>(h)];
      eta.add(t, s, v * norm, 1e-15);
    }
  }
  return eta;
}

std::pair<std::vector<Complex>, std::map<long long, Complex>> maximal_spectral_type(
    const FiniteKoopmanModel& model) {
  const long long nx = model.xsize();
  std::vector<Complex> best;
  std::map<long long, Complex> best_mu;
  std::size_t best_count = 0;
  for (long long x = 0; x < nx; ++x) {
    std::vector<Complex> f(static_cast<std::size_t>(nx), Complex(-model.nu[static_cast<std::size_t>(x)], 0.0));
    f[static_cast<std::size_t>(x)] += 1.0;
    auto mu = model.spectral_measure(f, f);
    std::size_t count = 0;
    for (const auto& [psi, m] : mu)
      if (std::abs(m) > 1e-12) ++count;
    if (count > best_count) {
      best_count = count;
      best = std::move(f);
      best_mu = std::move(mu);
    }
  }
  if (best.empty())
    throw PreconditionError("maximal_spectral_type: representation has no nonzero projections");
  return {best, best_mu};
}

// ---------------------------------------------------------------------------
// model builders
// ---------------------------------------------------------------------------

FiniteKoopmanModel translation_model(const std::vector<long long>& orders) {
  FiniteKoopmanModel m;
  m.orders = orders;
  const DualSpace H{orders};
  const long long n = H.size();
  m.nu.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  for (std::size_t g = 0; g < orders.size(); ++g) {
    std::vector<long long> unit(orders.size(), 0);
    unit[g] = 1;
    const long long u = H.flatten(unit);
    std::vector<long long> perm(static_cast<std::size_t>(n));
    for (long long x = 0; x < n; ++x) perm[static_cast<std::size_t>(x)] = H.add(x, u);
    m.generator_perms.push_back(std::move(perm));
  }
  m.validate();
  return m;
}

std::vector<std::vector<long long>> abelian_invariants_up_to(long long max_order) {
  // decompositions n = n_1 * n_2 * ... with n_i | n_{i+1} (invariant factors)
  std::vector<std::vector<long long>> out;
  std::function<void(long long, long long, std::vector<long long>&)> rec =
      [&](long long remaining, long long min_factor, std::vector<long long>& acc) {
        if (remaining == 1) {
          if (!acc.empty()) out.push_back(acc);
          return;
        }
        for (long long d = min_factor; d <= remaining; ++d) {
          if (remaining % d != 0) continue;
          // invariant factors: earlier ones divide later ones
          if (!acc.empty() && d % acc.back() != 0) continue;
          acc.push_back(d);
          rec(remaining / d, d, acc);
          acc.pop_back();
        }
      };
  for (long long n = 2; n <= max_order; ++n) {
    std::vector<long long> acc;
    rec(n, 2, acc);
  }
  return out;
}

namespace {

// subgroup of the finite abelian group generated by the given elements
std::set<long long> subgroup_closure(const DualSpace& H, const std::vector<long long>& gens) {
  std::set<long long> sub{0};
  std::vector<long long> frontier{0};
  while (!frontier.empty()) {
    std::vector<long long> next;
    for (long long x : frontier)
      for (long long g : gens) {
        const long long y = H.add(x, g);
        if (sub.insert(y).second) next.push_back(y);
      }
    frontier = std::move(next);
  }
  return sub;
}

}  // namespace

FiniteKoopmanModel random_koopman_model(std::mt19937& rng, long long max_size) {
  static const auto all_invariants = abelian_invariants_up_to(12);
  std::vector<std::vector<long long>> pool;
  for (const auto& inv : all_invariants) {
    long long n = 1;
    for (long long d : inv) n *= d;
    if (n <= max_size) pool.push_back(inv);
  }

  for (;;) {
    const auto& orders = pool[rng() % pool.size()];
    const DualSpace H{orders};
    const long long nh = H.size();

    // orbits: translation actions on coset spaces H/K
    const int norbits = 1 + static_cast<int>(rng() % 2);
    std::vector<std::vector<std::set<long long>>> orbit_cosets;
    long long total_x = 0;
    for (int o = 0; o < norbits; ++o) {
      std::vector<long long> kgens;
      const int ng = static_cast<int>(rng() % 2);  // trivial K half the time
      for (int i = 0; i < ng; ++i) kgens.push_back(static_cast<long long>(rng() % nh));
      const auto K = subgroup_closure(H, kgens);
      std::vector<std::set<long long>> cosets;
      std::set<long long> seen;
      for (long long x = 0; x < nh; ++x) {
        if (seen.count(x)) continue;
        std::set<long long> coset;
        for (long long k : K) coset.insert(H.add(x, k));
        seen.insert(coset.begin(), coset.end());
        cosets.push_back(std::move(coset));
      }
      total_x += static_cast<long long>(cosets.size());
      orbit_cosets.push_back(std::move(cosets));
    }
    if (total_x > max_size || total_x < 2) continue;

    FiniteKoopmanModel m;
    m.orders = orders;
    // orbit-constant weights (invariance), random orbit masses
    std::vector<double> orbit_weight;
    double total_w = 0.0;
    for (int o = 0; o < norbits; ++o) {
      const double w = 1.0 + static_cast<double>(rng() % 1000) / 500.0;
      orbit_weight.push_back(w);
      total_w += w;
    }
    std::vector<long long> point_orbit;  // orbit of each x
    std::vector<long long> point_coset;  // coset index within the orbit
    for (int o = 0; o < norbits; ++o)
      for (std::size_t c = 0; c < orbit_cosets[static_cast<std::size_t>(o)].size(); ++c) {
        m.nu.push_back(orbit_weight[static_cast<std::size_t>(o)] / total_w /
                       static_cast<double>(orbit_cosets[static_cast<std::size_t>(o)].size()));
        point_orbit.push_back(o);
        point_coset.push_back(static_cast<long long>(c));
      }

    for (std::size_t g = 0; g < orders.size(); ++g) {
      std::vector<long long> unit(orders.size(), 0);
      unit[g] = 1;
      const long long u = H.flatten(unit);
      std::vector<long long> perm(m.nu.size());
      for (std::size_t x = 0; x < m.nu.size(); ++x) {
        const auto& cosets = orbit_cosets[static_cast<std::size_t>(point_orbit[x])];
        const long long rep = *cosets[static_cast<std::size_t>(point_coset[x])].begin();
        const long long moved = H.add(rep, u);
        // locate the coset containing the translate
        long long target = -1;
        for (std::size_t c = 0; c < cosets.size(); ++c)
          if (cosets[c].count(moved)) target = static_cast<long long>(c);
        // global index of (orbit, target coset)
        long long base = 0;
        for (long long o = 0; o < point_orbit[x]; ++o)
          base += static_cast<long long>(orbit_cosets[static_cast<std::size_t>(o)].size());
        perm[x] = base + target;
      }
      m.generator_perms.push_back(std::move(perm));
    }
    m.validate();
    return m;
  }
}

std::vector<Complex> random_mean_zero(const FiniteKoopmanModel& model, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<Complex> f(model.nu.size());
  Complex mean(0.0, 0.0);
  for (std::size_t x = 0; x < f.size(); ++x) {
    f[x] = Complex(unif(rng), unif(rng));
    mean += model.nu[x] * f[x];
  }
  for (Complex& c : f) c -= mean;  // nu-mean zero since nu is a probability
  return f;
}

// ---------------------------------------------------------------------------
// fingerprints
// ---------------------------------------------------------------------------

MeasureClassFingerprint fingerprint(const std::vector<double>& weights, int n_max) {
  if (weights.empty()) throw PreconditionError("fingerprint: empty weight sequence");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0 || weights[i] > 1.0)
      throw PreconditionError("fingerprint: weights must lie in (0,1]");
    if (i > 0 && weights[i] >= weights[i - 1])
      throw PreconditionError("fingerprint: weights must be strictly decreasing");
    sum += weights[i];
  }
  // the truncated sum may fall short of 1 (remainder in the untruncated tail)
  // but may never exceed it
  if (sum > 1.0 + 1e-12) throw PreconditionError("fingerprint: weights sum beyond 1");

  MeasureClassFingerprint fp;
  const int blocks = std::min<int>(n_max, static_cast<int>(weights.size()));
  for (int n = 1; n <= blocks; ++n)
    fp.singular_blocks.emplace_back(weights[static_cast<std::size_t>(n - 1)], std::pow(0.5, n));
  std::sort(fp.singular_blocks.begin(), fp.singular_blocks.end(),
            [](const auto& a, const auto& b) { return a > b; });
  return fp;
}

bool compare(const MeasureClassFingerprint& a, const MeasureClassFingerprint& b) {
  return a.ac_mass == b.ac_mass && a.singular_blocks == b.singular_blocks;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string measure_to_json(const BivariateMeasure& eta) {
  json j;
  j["orders"] = eta.space.orders;
  json points = json::array();
  for (const auto& [k, m] : eta.mass)
    points.push_back({k.first, k.second, m.real(), m.imag()});
  j["points"] = points;
  return j.dump();
}

BivariateMeasure measure_from_json(const std::string& text) {
  json j = json::parse(text);
  BivariateMeasure out;
  out.space.orders = j.at("orders").get<std::vector<long long>>();
  for (const auto& p : j.at("points"))
    out.add(p.at(0).get<long long>(), p.at(1).get<long long>(),
            Complex(p.at(2).get<double>(), p.at(3).get<double>()), 0.0);
  return out;
}

std::string koopman_to_json(const FiniteKoopmanModel& model) {
  json j;
  j["orders"] = model.orders;
  j["nu"] = model.nu;
  j["generators"] = model.generator_perms;
  return j.dump();
}

FiniteKoopmanModel koopman_from_json(const std::string& text) {
  json j = json::parse(text);
  FiniteKoopmanModel model;
  model.orders = j.at("orders").get<std::vector<long long>>();
  model.nu = j.at("nu").get<std::vector<double>>();
  model.generator_perms = j.at("generators").get<std::vector<std::vector<long long>>>();
  model.validate();
  return model;
}

std::string fingerprint_to_json(const MeasureClassFingerprint& fp) {
  json j;
  j["ac"] = fp.ac_mass;
  json blocks = json::array();
  for (const auto& [m, w] : fp.singular_blocks) blocks.push_back({m, w});
  j["blocks"] = blocks;
  return j.dump();
}

MeasureClassFingerprint fingerprint_from_json(const std::string& text) {
  json j = json::parse(text);
  MeasureClassFingerprint fp;
  fp.ac_mass = j.at("ac").get<double>();
  for (const auto& b : j.at("blocks"))
    fp.singular_blocks.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  return fp;
}

}  // namespace masalab::bimodule

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "masalab/bimodule.hpp"

using namespace masalab;
using namespace masalab::bimodule;

namespace {

groups::GroupModel cyclic_model(long long n) {
  return groups::model_from_json(
      R"({"kind":"finite_cyclic","n":)" + std::to_string(n) + R"(,"marked":["a"]})");
}

masa::AlgebraElement random_vector(const groups::GroupModel& m, std::mt19937& rng, long long n,
                                   int terms) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  masa::AlgebraElement x;
  for (int i = 0; i < terms; ++i)
    x.add(m.group->pow(m.group->parse("a"), groups::Int(static_cast<long long>(rng() % n))),
          Complex(unif(rng), unif(rng)));
  return x;
}

}  // namespace

TEST_CASE("dual space arithmetic and characters") {
  const DualSpace H{{2, 4}};
  CHECK(H.size() == 8);
  for (long long x = 0; x < 8; ++x) CHECK(H.flatten(H.unflatten(x)) == x);
  CHECK(H.add(H.flatten({1, 3}), H.flatten({1, 2})) == H.flatten({0, 1}));
  CHECK(H.negate(H.flatten({1, 1})) == H.flatten({1, 3}));
  // orthogonality of characters
  for (long long c = 0; c < 8; ++c) {
    Complex sum(0.0, 0.0);
    for (long long h = 0; h < 8; ++h) sum += H.character(c, h);
    CHECK(std::abs(sum - (c == 0 ? Complex(8.0, 0.0) : Complex(0.0, 0.0))) < 1e-12);
  }
}

TEST_CASE("eta from vectors: defining pairings hold") {
  const auto m = cyclic_model(4);
  const auto& g = *m.group;
  std::mt19937 rng(13);
  const auto z1 = random_vector(m, rng, 4, 3);
  const auto z2 = random_vector(m, rng, 4, 3);
  const auto eta = eta_from_vectors(m, z1, z2);
  const DualSpace H{{4}};
  // integral of u_{h1}(t) u_{h2}(s) against eta equals <u_{h1} z1 u_{h2}, z2>
  for (long long h1 = 0; h1 < 4; ++h1) {
    for (long long h2 = 0; h2 < 4; ++h2) {
      const auto w1 = masa::unit(g.pow(g.parse("a"), groups::Int(h1)));
      const auto w2 = masa::unit(g.pow(g.parse("a"), groups::Int(h2)));
      const auto prod = masa::mul(g, masa::mul(g, w1, z1), w2);
      const Complex expected = masa::trace(g, masa::mul(g, masa::adjoint(g, z2), prod));
      Complex integral(0.0, 0.0);
      for (const auto& [k, v] : eta.mass)
        integral += v * H.character(k.first, (4 - h1) % 4) * H.character(k.second, (4 - h2) % 4);
      CHECK(std::abs(integral - expected) < 1e-12);
    }
  }
}

TEST_CASE("eta of a single unitary is uniform on the diagonal") {
  const auto m = cyclic_model(4);
  const auto z = masa::parse_element(*m.group, "u_a");
  const auto eta = eta_from_vectors(m, z, z);
  CHECK(eta.mass.size() == 4);
  for (const auto& [k, v] : eta.mass) {
    CHECK(k.first == k.second);
    CHECK(std::abs(v - Complex(0.25, 0.0)) < 1e-13);
  }
  CHECK(std::abs(eta.total() - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("eta vanishes for zero vectors") {
  const auto m = cyclic_model(4);
  CHECK(eta_from_vectors(m, {}, {}).mass.empty());
  const auto z = masa::parse_element(*m.group, "u_a");
  CHECK(eta_from_vectors(m, z, {}).mass.empty());
}

TEST_CASE("polarization and domination") {
  const auto m = cyclic_model(6);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto z1 = random_vector(m, rng, 6, 3);
    const auto z2 = random_vector(m, rng, 6, 3);
    const auto rep = polarization_check(m, z1, z2);
    CHECK(rep.polarization_defect < 1e-12);
    CHECK(rep.domination_defect < 1e-12);
  }
  // zeta2 = 0: cross measure vanishes
  const auto z = random_vector(m, rng, 6, 2);
  CHECK(eta_from_vectors(m, z, {}).total_variation() == 0.0);
  // zeta1 = zeta2 recovers the diagonal positive measure
  const auto self = eta_from_vectors(m, z, z);
  for (const auto& [k, v] : self.mass) {
    (void)k;
    CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-13));
  }
}

TEST_CASE("flip symmetry of self-etas on supports") {
  const auto m = cyclic_model(6);
  std::mt19937 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto z = random_vector(m, rng, 6, 3);
    const auto eta = eta_from_vectors(m, z, z);
    CHECK(eta.flip().support_subset_of(eta));
    CHECK(eta.support_subset_of(eta.flip()));
  }
}

TEST_CASE("disintegration of the three-point measure") {
  BivariateMeasure beta;
  beta.space = DualSpace{{4}};
  beta.add(1, 1, Complex(1.0 / 3.0, 0.0));
  beta.add(1, 2, Complex(1.0 / 3.0, 0.0));
  beta.add(2, 2, Complex(1.0 / 3.0, 0.0));
  const auto fibers = disintegrate(beta, 1);
  CHECK(std::abs(fibers.base.at(1) - Complex(2.0 / 3.0, 0.0)) < 1e-14);
  CHECK(std::abs(fibers.base.at(2) - Complex(1.0 / 3.0, 0.0)) < 1e-14);
  CHECK(std::abs(fibers.fibers.at(1).at(1) - Complex(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(fibers.fibers.at(1).at(2) - Complex(0.5, 0.0)) < 1e-14);
  CHECK(std::abs(fibers.fibers.at(2).at(2) - Complex(1.0, 0.0)) < 1e-14);
  // reconstruction is exact
  const auto back = fibers.reconstruct();
  for (const auto& [k, v] : beta.mass) CHECK(std::abs(back.mass.at(k) - v) < 1e-15);
  CHECK(back.mass.size() == beta.mass.size());
}

TEST_CASE("disintegration of product and zero measures") {
  BivariateMeasure prod;
  prod.space = DualSpace{{3}};
  for (long long t = 0; t < 3; ++t)
    for (long long s = 0; s < 3; ++s)
      prod.add(t, s, Complex((t + 1) * (s + 1) / 36.0, 0.0));
  const auto fibers = disintegrate(prod, 1);
  for (long long t = 0; t < 3; ++t)
    for (long long s = 0; s < 3; ++s)
      CHECK(std::abs(fibers.fibers.at(t).at(s) - Complex((s + 1) / 6.0, 0.0)) < 1e-14);

  const auto empty = disintegrate(BivariateMeasure{DualSpace{{3}}, {}}, 1);
  CHECK(empty.base.empty());
  CHECK(empty.fibers.empty());
}

TEST_CASE("lemma 2.3 fiber identities on group models") {
  const auto m = cyclic_model(6);
  const auto& g = *m.group;
  const DualSpace H{{6}};
  std::mt19937 rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    const auto z1 = random_vector(m, rng, 6, 3);
    const auto z2 = random_vector(m, rng, 6, 3);
    const auto eta = eta_from_vectors(m, z1, z2);
    const auto fibers = disintegrate(eta, 1);

    // 1: base masses are lambda(t) times the Fourier values of E_A(z1 z2*)
    const auto ea = masa::conditional_expectation(m, masa::mul(g, z1, masa::adjoint(g, z2)));
    for (long long t = 0; t < 6; ++t) {
      Complex value(0.0, 0.0);
      for (const auto& [w, c] : ea.support) {
        const long long h = m.marked->coordinates(w)->torsion[0].first;
        value += c * H.character(t, (6 - h) % 6);
      }
      const auto it = fibers.base.find(t);
      const Complex base = it == fibers.base.end() ? Complex(0.0, 0.0) : it->second;
      CHECK(std::abs(base - value / 6.0) < 1e-13);
    }

    // 3: ||E_A(b z1 w z2*)||_2^2 = sum_t |b(t)|^2 |eta^t(1 (x) w)|^2 lambda(t)
    const auto b = random_vector(m, rng, 6, 2);
    const long long h0 = static_cast<long long>(rng() % 6);
    const auto w = masa::unit(g.pow(g.parse("a"), groups::Int(h0)));
    const auto prod = masa::mul(g, masa::mul(g, masa::mul(g, b, z1), w), masa::adjoint(g, z2));
    const double lhs_norm = masa::norm2(masa::conditional_expectation(m, prod));
    double rhs = 0.0;
    for (long long t = 0; t < 6; ++t) {
      Complex bt(0.0, 0.0);
      for (const auto& [wd, c] : b.support) {
        const long long h = m.marked->coordinates(wd)->torsion[0].first;
        bt += c * H.character(t, (6 - h) % 6);
      }
      Complex et(0.0, 0.0);
      for (long long s = 0; s < 6; ++s) {
        const auto it = eta.mass.find({t, s});
        if (it != eta.mass.end()) et += it->second * H.character(s, (6 - h0) % 6);
      }
      et *= 6.0;
      rhs += std::norm(bt) * std::norm(et) / 6.0;
    }
    CHECK(std::abs(lhs_norm * lhs_norm - rhs) < 1e-11);
  }
}

TEST_CASE("fiber mixing profile") {
  BivariateMeasure beta;
  beta.space = DualSpace{{8}};
  // fiber 0: uniform on the cyclic coordinate (vanishing nonzero coefficients);
  // fiber 1: a point mass
  for (long long s = 0; s < 8; ++s) beta.add(0, s, Complex(1.0 / 16.0, 0.0));
  beta.add(1, 3, Complex(0.5, 0.0));
  const auto fibers = disintegrate(beta, 1);
  const auto summary = fiber_mixing_profile(fibers, 1, 7);
  CHECK(summary.tail_sups.size() == 2);
  CHECK(summary.tail_sups[0].second < 1e-12);   // uniform fiber
  CHECK(summary.tail_sups[1].second == doctest::Approx(1.0));  // unit point mass
  CHECK(summary.max_tail_sup == doctest::Approx(1.0));
}

TEST_CASE("koopman model validation and spectral resolution") {
  const auto model = translation_model({2, 4});
  model.validate();
  CHECK(model.xsize() == 8);
  std::mt19937 rng(29);
  const auto f = random_mean_zero(model, rng);
  // spectral projections resolve f: sum of mu_{f,f} masses equals ||f||^2
  const auto mu = model.spectral_measure(f, f);
  Complex total(0.0, 0.0);
  for (const auto& [psi, v] : mu) {
    (void)psi;
    total += v;
  }
  CHECK(std::abs(total - model.inner(f, f)) < 1e-12);
  // the trivial character carries no mass on mean-zero functions
  CHECK((mu.count(0) == 0 || std::abs(mu.at(0)) < 1e-12));
}

TEST_CASE("snag identity: norm case and random trials") {
  const auto model = translation_model({4});
  std::vector<Complex> f(4, Complex(-0.25, 0.0));
  f[0] += 1.0;  // delta_0 - 1/4
  const auto r = snag_identity_check(model, f, f, 0, 0, 0, 0);
  CHECK(std::abs(r.lhs - model.inner(f, f)) < 1e-12);
  CHECK(r.defect < 1e-12);

  const auto z6 = translation_model({6});
  std::mt19937 rng(31);
  double maxdef = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto f1 = random_mean_zero(z6, rng);
    const auto f2 = random_mean_zero(z6, rng);
    const auto res = snag_identity_check(z6, f1, f2, rng() % 6, rng() % 6, rng() % 6, rng() % 6);
    maxdef = std::max(maxdef, res.defect);
  }
  CHECK(maxdef < 1e-10);

  std::vector<Complex> bad(6, Complex(1.0, 0.0));
  CHECK_THROWS_AS(snag_identity_check(z6, bad, bad, 0, 0, 0, 0), PreconditionError);
}

TEST_CASE("transport map examples") {
  const DualSpace H{{4}};
  // uniform mu: S is bijective, pushforward uniform on dual x dual
  std::map<long long, Complex> uniform;
  for (long long p = 0; p < 4; ++p) uniform[p] = Complex(0.25, 0.0);
  const auto tp = transport_S(H, uniform);
  CHECK(tp.mass.size() == 16);
  for (const auto& [k, v] : tp.mass) {
    (void)k;
    CHECK(std::abs(v - Complex(1.0 / 16.0, 0.0)) < 1e-14);
  }

  // mu = delta_{psi0}: uniform mass on the shifted diagonal {(chi, chi psi0)}
  std::map<long long, Complex> delta{{3, Complex(1.0, 0.0)}};
  const auto shifted = transport_S(H, delta);
  CHECK(shifted.mass.size() == 4);
  for (const auto& [k, v] : shifted.mass) {
    CHECK(k.second == H.add(k.first, 3));
    CHECK(std::abs(v - Complex(0.25, 0.0)) < 1e-14);
  }
}

TEST_CASE("transport equals koopman eta on translation models") {
  for (const auto& orders : {std::vector<long long>{4}, {2, 4}, {8}, {2, 2, 2}}) {
    const auto model = translation_model(orders);
    const auto [f0, mu] = maximal_spectral_type(model);
    const auto tp = transport_S(model.h_space(), mu);
    const auto eta = koopman_eta(model, f0);
    double defect = 0.0;
    for (const auto& [k, v] : eta.mass) {
      const auto it = tp.mass.find(k);
      defect = std::max(defect,
                        std::abs(v - (it == tp.mass.end() ? Complex(0.0, 0.0) : it->second)));
    }
    for (const auto& [k, v] : tp.mass)
      if (!eta.mass.count(k)) defect = std::max(defect, std::abs(v));
    CHECK(defect < 1e-12);
  }
}

TEST_CASE("lemma 4.5 finite analogue: support equality forces the full dual") {
  for (const auto& orders : {std::vector<long long>{8}, {2, 4}, {12}}) {
    const DualSpace H{orders};
    const long long n = H.size();
    // enumerate all subgroups as closures of subsets of a generating pool
    std::set<std::set<long long>> subgroups;
    for (long long mask = 0; mask < (1LL << std::min<long long>(n, 12)); ++mask) {
      std::set<long long> closure{0};
      std::vector<long long> frontier{0};
      for (long long i = 0; i < n; ++i)
        if (mask & (1LL << i)) frontier.push_back(i);
      for (long long g : frontier) closure.insert(g);
      bool grew = true;
      while (grew) {
        grew = false;
        std::vector<long long> elems(closure.begin(), closure.end());
        for (long long x : elems)
          for (long long y : elems)
            if (closure.insert(H.add(x, y)).second) grew = true;
      }
      subgroups.insert(closure);
    }
    CHECK(subgroups.size() > 1);
    for (const auto& sub : subgroups) {
      // normalized counting measure of sub has support sub; support equality
      // with the Haar measure of the dual group forces sub = everything
      if (sub.size() == static_cast<std::size_t>(n)) continue;
      CHECK(sub.size() < static_cast<std::size_t>(n));
      // index divides the order (Lagrange, exact)
      CHECK(n % static_cast<long long>(sub.size()) == 0);
    }
  }
}

TEST_CASE("fingerprint construction and comparison") {
  // single weight 1 at n_max=1: one singular block (1, 1/2)
  const auto one = fingerprint({1.0}, 1);
  CHECK(one.ac_mass == doctest::Approx(1.0));
  CHECK(one.singular_blocks.size() == 1);
  CHECK(one.singular_blocks[0].first == doctest::Approx(1.0));
  CHECK(one.singular_blocks[0].second == doctest::Approx(0.5));

  // alpha = 2^-n vs beta = (2/3)(1/3)^{n-1}: first block masses differ
  std::vector<double> alpha, beta;
  for (int k = 1; k <= 10; ++k) {
    alpha.push_back(std::pow(0.5, k));
    beta.push_back((2.0 / 3.0) * std::pow(1.0 / 3.0, k - 1));
  }
  const auto fa = fingerprint(alpha, 10);
  const auto fb = fingerprint(beta, 10);
  CHECK(compare(fa, fa));
  CHECK_FALSE(compare(fa, fb));
  CHECK(fa.singular_blocks[0].first == doctest::Approx(0.5));
  CHECK(fb.singular_blocks[0].first == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(fingerprint({0.5, 0.6}, 2), PreconditionError);   // not decreasing
  CHECK_THROWS_AS(fingerprint({0.9, 0.5}, 2), PreconditionError);   // oversums
}

TEST_CASE("serialization round trips") {
  BivariateMeasure beta;
  beta.space = DualSpace{{2, 3}};
  beta.add(1, 4, Complex(0.5, -0.25));
  beta.add(0, 2, Complex(0.25, 0.0));
  const auto back = measure_from_json(measure_to_json(beta));
  CHECK(back.space.orders == beta.space.orders);
  for (const auto& [k, v] : beta.mass) CHECK(std::abs(back.mass.at(k) - v) < 1e-12);

  const auto model = translation_model({2, 3});
  const auto model2 = koopman_from_json(koopman_to_json(model));
  model2.validate();
  CHECK(model2.orders == model.orders);
  CHECK(model2.generator_perms == model.generator_perms);

  const auto fp = fingerprint({0.5, 0.25}, 8);
  const auto fp2 = fingerprint_from_json(fingerprint_to_json(fp));
  CHECK(compare(fp, fp2));
}

TEST_CASE("random koopman models validate and satisfy snag") {
  std::mt19937 rng(41);
  double maxdef = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto model = random_koopman_model(rng, 12);
    model.validate();
    const long long nh = model.h_space().size();
    const auto f1 = random_mean_zero(model, rng);
    const auto f2 = random_mean_zero(model, rng);
    const auto r = snag_identity_check(model, f1, f2, rng() % nh, rng() % nh, rng() % nh,
                                       rng() % nh);
    maxdef = std::max(maxdef, r.defect);
  }
  CHECK(maxdef < 1e-10);
}

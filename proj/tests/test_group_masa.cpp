#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "masalab/group_masa.hpp"

using namespace masalab;
using groups::Elem;
using groups::GroupModel;
using masa::AlgebraElement;

namespace {

GroupModel f2_model() {
  return groups::model_from_json(R"({"kind":"free","rank":2,"marked":["a"]})");
}

GroupModel z2_model() {
  return groups::model_from_json(R"({"kind":"abelian","invariants":[0,0],"marked":["a"]})");
}

GroupModel semidirect_model() {
  return groups::model_from_json(
      R"({"kind":"semidirect","matrix":[[2,1],[1,1]],"marked":"acting_Z"})");
}

AlgebraElement random_element(const groups::Group& g, std::mt19937& rng, int terms) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto gens = g.generators();
  AlgebraElement x;
  for (int i = 0; i < terms; ++i) {
    Elem w = g.identity();
    const int len = static_cast<int>(rng() % 4);
    for (int j = 0; j < len; ++j) {
      Elem f = gens[rng() % gens.size()];
      if (rng() % 2) f = g.inv(f);
      w = g.mul(w, f);
    }
    x.add(w, Complex(unif(rng), unif(rng)));
  }
  return x;
}

// Supports kept off the masa: a support word inside Gamma_0 makes the k-sum
// of the summability identity genuinely infinite.
AlgebraElement random_transversal_element(const GroupModel& m, std::mt19937& rng, int terms) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto& g = *m.group;
  const auto gens = g.generators();
  AlgebraElement x;
  while (static_cast<int>(x.support.size()) < terms) {
    Elem w = g.identity();
    const int len = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < len; ++j) {
      Elem f = gens[rng() % gens.size()];
      if (rng() % 2) f = g.inv(f);
      w = g.mul(w, f);
    }
    if (m.in_marked(w)) continue;
    x.add(w, Complex(unif(rng), unif(rng)));
  }
  return x;
}

}  // namespace

TEST_CASE("conditional expectation on words") {
  const auto m = f2_model();
  const auto& g = *m.group;

  const auto kept = masa::conditional_expectation(m, masa::parse_element(g, "u_a^2"));
  CHECK(kept.support.size() == 1);
  CHECK(kept.support.count(g.parse("a^2")) == 1);

  const auto killed = masa::conditional_expectation(
      m, masa::mul(g, masa::mul(g, masa::unit(g.parse("b")), masa::unit(g.parse("a"))),
                   masa::unit(g.parse("b^-1"))));
  CHECK(killed.is_zero());

  const auto z2 = z2_model();
  const auto& zg = *z2.group;
  const auto commuted = masa::conditional_expectation(
      z2, masa::mul(zg, masa::mul(zg, masa::unit(zg.parse("b")), masa::unit(zg.parse("a^3"))),
                    masa::unit(zg.parse("b^-1"))));
  CHECK(commuted.support.size() == 1);
  CHECK(commuted.support.count(zg.parse("a^3")) == 1);
}

TEST_CASE("conditional expectation properties on random inputs") {
  for (const auto& m : {f2_model(), z2_model(), semidirect_model()}) {
    const auto& g = *m.group;
    std::mt19937 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
      const auto x = random_element(g, rng, 4);
      const auto ex = masa::conditional_expectation(m, x);
      // idempotent
      const auto exx = masa::conditional_expectation(m, ex);
      CHECK(masa::norm2(masa::add(exx, masa::scale(ex, Complex(-1.0, 0.0)))) == 0.0);
      // trace preserving
      CHECK(std::abs(masa::trace(g, ex) - masa::trace(g, x)) == 0.0);
      // contractive in 2-norm
      CHECK(masa::norm2(ex) <= masa::norm2(x) + 1e-15);
      // bimodular over marked generators
      for (const Elem& h : m.marked->generators()) {
        const auto lhs = masa::conditional_expectation(
            m, masa::mul(g, masa::mul(g, masa::unit(h), x), masa::unit(g.inv(h))));
        const auto rhs = masa::mul(g, masa::mul(g, masa::unit(h), ex), masa::unit(g.inv(h)));
        CHECK(masa::norm2(masa::add(lhs, masa::scale(rhs, Complex(-1.0, 0.0)))) < 1e-14);
      }
    }
  }
}

TEST_CASE("masa l1 norm is dominated by the l2 norm") {
  for (const auto& m : {f2_model(), z2_model()}) {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
      const auto y = masa::conditional_expectation(m, random_element(*m.group, rng, 5));
      const double l1 = masa::masa_l1_norm(m, y);
      CHECK(l1 <= masa::norm2(y) + 1e-12);
      if (!y.is_zero()) CHECK(l1 > 0.0);
    }
  }
}

TEST_CASE("cesaro diagnostics examples") {
  const auto m = f2_model();
  const auto d = masa::cesaro_diagnostics(m, masa::parse_element(*m.group, "u_b"),
                                          m.group->parse("a"), 50);
  CHECK(d.avg_l2_sq == 0.0);
  CHECK(d.avg_l2 == 0.0);
  CHECK(d.avg_l1_sq == 0.0);
  CHECK(d.avg_l1 == 0.0);
  CHECK(d.all_vanish);

  const auto z2 = z2_model();
  const auto dz = masa::cesaro_diagnostics(z2, masa::parse_element(*z2.group, "u_b"),
                                           z2.group->parse("a"), 50);
  CHECK(dz.avg_l2_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dz.avg_l2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dz.avg_l1_sq == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(dz.avg_l1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(dz.all_vanish);

  const auto zero = masa::cesaro_diagnostics(m, AlgebraElement{}, m.group->parse("a"), 10);
  CHECK(zero.all_vanish);

  CHECK_THROWS_AS(
      masa::cesaro_diagnostics(m, masa::parse_element(*m.group, "u_a"), m.group->parse("a"), 10),
      PreconditionError);
}

TEST_CASE("cesaro l2/l1 horizon inequalities on random mean-zero inputs") {
  for (const auto& m : {f2_model(), z2_model(), semidirect_model()}) {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
      auto x = random_element(*m.group, rng, 4);
      const auto ex = masa::conditional_expectation(m, x);
      x = masa::add(x, masa::scale(ex, Complex(-1.0, 0.0)));
      const Elem v = m.group->kind() == "semidirect" ? m.group->parse("((0,0),1)")
                                                     : m.group->parse("a");
      const auto d = masa::cesaro_diagnostics(m, x, v, 12);
      // ||.||_1 <= ||.||_2 termwise, and Cauchy-Schwarz for the averages
      CHECK(d.avg_l1 <= d.avg_l2 + 1e-12);
      CHECK(d.avg_l1_sq <= d.avg_l2_sq + 1e-12);
      CHECK(d.avg_l2 * d.avg_l2 <= d.avg_l2_sq + 1e-12);
      CHECK(d.avg_l1 * d.avg_l1 <= d.avg_l1_sq + 1e-12);
      CHECK((d.avg_l2_sq == 0.0) == (d.avg_l1_sq == 0.0));
    }
  }
}

TEST_CASE("st condition verdicts") {
  const auto m = f2_model();
  const auto report = masa::st_condition(
      m, {m.group->parse("b"), m.group->parse("b^-1")}, 8, 8);
  CHECK(report.verdict == masa::STReport::Verdict::kHoldsWithE);
  CHECK(report.exceptional.empty());
  CHECK(report.finite_horizon);

  const auto z2 = z2_model();
  const auto violation = masa::st_condition(
      z2, {z2.group->parse("b"), z2.group->parse("b^-1")}, 8, 8);
  CHECK(violation.verdict == masa::STReport::Verdict::kViolation);
  CHECK_FALSE(violation.witnesses.empty());
  for (const auto& w : violation.witnesses)
    CHECK(z2.in_marked(z2.group->mul(z2.group->mul(w.g, w.g0), w.h)));

  const auto sd = semidirect_model();
  const auto finite_e = masa::st_condition(
      sd, {sd.group->parse("((1,0),0)"), sd.group->parse("((-1,0),0)")}, 10, 10);
  CHECK(finite_e.verdict == masa::STReport::Verdict::kHoldsWithE);

  CHECK_THROWS_AS(masa::st_condition(m, {m.group->parse("a")}, 4, 4), PreconditionError);
}

TEST_CASE("stabilizer K_g") {
  const auto m = f2_model();
  const auto trivial = masa::stabilizer_kg(m, m.group->parse("b"), 6);
  CHECK(trivial.trivial());
  CHECK(trivial.certificate == masa::KgReport::Certificate::kExact);

  const auto prod = groups::model_from_json(
      R"json({"kind":"direct_product",
          "factors":[{"kind":"free","rank":2},{"kind":"finite_cyclic","n":2}],
          "marked":["(a,e)","(e,a)"]})json");
  const auto torsion = masa::stabilizer_kg(prod, prod.group->parse("(b,e)"), 6);
  CHECK(torsion.pairs.size() == 2);
  CHECK_FALSE(torsion.boundary_hit);

  const auto z2 = z2_model();
  const auto infinite = masa::stabilizer_kg(z2, z2.group->parse("b"), 6);
  CHECK(infinite.pairs.size() > 2);
  CHECK(infinite.boundary_hit);

  CHECK_THROWS_AS(masa::stabilizer_kg(m, m.group->parse("a^2"), 4), PreconditionError);
}

TEST_CASE("malnormality and icc") {
  const auto m = f2_model();
  const auto mal = masa::malnormality_check(m, 5);
  CHECK(mal.malnormal);
  CHECK_FALSE(mal.witness.has_value());

  const auto z2 = z2_model();
  const auto not_mal = masa::malnormality_check(z2, 3);
  CHECK_FALSE(not_mal.malnormal);
  CHECK(not_mal.witness.has_value());

  const auto icc = masa::icc_check(m, 3);
  CHECK(icc.evidence);
  CHECK(icc.min_class_size > icc.threshold);

  const auto z_icc = masa::icc_check(z2, 3);
  CHECK_FALSE(z_icc.evidence);  // abelian: classes are singletons
}

TEST_CASE("ahp subsequence") {
  const auto m = f2_model();
  const auto& g = *m.group;
  const auto r = masa::ahp_subsequence(
      m, {masa::parse_element(g, "u_b"), masa::parse_element(g, "u_b^2")}, g.parse("a"), 5, 100);
  CHECK(r.conclusive);
  CHECK(r.indices == std::vector<long long>{1, 2, 3, 4, 5});

  const auto empty = masa::ahp_subsequence(m, {}, g.parse("a"), 4, 100);
  CHECK(empty.conclusive);
  CHECK(empty.indices == std::vector<long long>{1, 2, 3, 4});

  const auto z2 = z2_model();
  const auto stuck = masa::ahp_subsequence(
      z2, {masa::parse_element(*z2.group, "u_b")}, z2.group->parse("a"), 3, 50);
  CHECK_FALSE(stuck.conclusive);
}

TEST_CASE("wandering vectors") {
  const auto m = f2_model();
  const auto& g = *m.group;
  const auto yes = masa::wandering_test(m, masa::parse_element(g, "u_b"), g.parse("a"), 50);
  CHECK(yes.wandering);
  CHECK(yes.max_defect == 0.0);

  // cross term b a^{n-1} b^-1 lands on the identity at n = 1
  const auto no = masa::wandering_test(m, masa::parse_element(g, "u_b + u_b*a"), g.parse("a"), 50);
  CHECK_FALSE(no.wandering);
  CHECK(no.max_defect > 0.0);
  CHECK(std::abs(no.worst_n) == 1);

  const auto zero = masa::wandering_test(m, AlgebraElement{}, g.parse("a"), 10);
  CHECK(zero.wandering);
  CHECK(zero.max_defect == 0.0);
}

TEST_CASE("summability identity examples") {
  const auto m = f2_model();
  const auto& g = *m.group;
  const Elem v = g.parse("a");

  const auto [z1, z2] = masa::summability_identity(m, AlgebraElement{}, AlgebraElement{}, v);
  CHECK(z1 == 0.0);
  CHECK(z2 == 0.0);

  const auto ub = masa::parse_element(g, "u_b");
  const auto [l, r] = masa::summability_identity(m, ub, ub, v);
  CHECK(l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r == doctest::Approx(1.0).epsilon(1e-12));

  const auto [l2, r2] = masa::summability_identity(m, ub, masa::parse_element(g, "u_b^-1"), v);
  CHECK(l2 == 0.0);
  CHECK(r2 == 0.0);
}

TEST_CASE("summability identity on random pairs") {
  const auto m = f2_model();
  const auto sd = semidirect_model();
  std::mt19937 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x1 = random_transversal_element(m, rng, 3);
    const auto x2 = random_transversal_element(m, rng, 3);
    const auto [l, r] = masa::summability_identity(m, x1, x2, m.group->parse("a"));
    CHECK(std::abs(l - r) < 1e-10);

    const auto y1 = random_transversal_element(sd, rng, 3);
    const auto y2 = random_transversal_element(sd, rng, 3);
    const auto [ls, rs] = masa::summability_identity(sd, y1, y2, sd.group->parse("((0,0),1)"));
    CHECK(std::abs(ls - rs) < 1e-10);
  }
}

TEST_CASE("summability rejects non-summable inputs") {
  const auto z2 = z2_model();
  const auto ub = masa::parse_element(*z2.group, "u_b");
  // b a^k b^-1 = a^k lies in the masa for every k: infinitely many terms
  CHECK_THROWS_AS(masa::summability_identity(z2, ub, ub, z2.group->parse("a")),
                  PreconditionError);
}

TEST_CASE("algebra element parsing and formatting") {
  const auto m = f2_model();
  const auto& g = *m.group;
  const auto x = masa::parse_element(g, "1.0*b + (0,1)*a*b^-1");
  CHECK(x.support.size() == 2);
  CHECK(x.support.at(g.parse("b")) == Complex(1.0, 0.0));
  CHECK(x.support.at(g.parse("a*b^-1")) == Complex(0.0, 1.0));
  const auto y = masa::parse_element(g, masa::format_element(g, x));
  CHECK(masa::norm2(masa::add(x, masa::scale(y, Complex(-1.0, 0.0)))) < 1e-12);
}

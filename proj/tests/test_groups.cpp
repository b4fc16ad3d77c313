#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "masalab/groups.hpp"

using namespace masalab;
using groups::Elem;
using groups::GroupModel;
using groups::Int;

namespace {

Elem rand_elem(const groups::Group& g, std::mt19937& rng) {
  const auto gens = g.generators();
  Elem x = g.identity();
  const int len = static_cast<int>(rng() % 6);
  for (int i = 0; i < len; ++i) {
    Elem f = gens[rng() % gens.size()];
    if (rng() % 2) f = g.inv(f);
    x = g.mul(x, f);
  }
  return x;
}

void check_group_laws(const groups::Group& g, unsigned seed) {
  std::mt19937 rng(seed);
  for (int trial = 0; trial < 300; ++trial) {
    const Elem a = rand_elem(g, rng), b = rand_elem(g, rng), c = rand_elem(g, rng);
    CHECK(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
    CHECK(g.mul(a, g.inv(a)) == g.identity());
    CHECK(g.mul(g.identity(), a) == a);
    CHECK(g.mul(a, g.identity()) == a);
    // normal forms are canonical under parse/format round trips
    CHECK(g.parse(g.format(a)) == a);
  }
}

}  // namespace

TEST_CASE("free group word reduction") {
  const auto f2 = groups::make_free(2);
  CHECK(f2->mul(f2->parse("a"), f2->parse("a^-1")) == f2->identity());
  CHECK(f2->format(f2->mul(f2->parse("a*b"), f2->parse("b^-1*a"))) == "a^2");
  CHECK(f2->format(f2->inv(f2->parse("a*b^-2"))) == "b^2*a^-1");
  check_group_laws(*f2, 1);
}

TEST_CASE("abelian groups") {
  const auto z2 = groups::make_abelian({Int(0), Int(0)});
  CHECK(z2->format(z2->mul(z2->parse("(3,-1)"), z2->parse("(-1,4)"))) == "(2,3)");
  check_group_laws(*z2, 2);

  const auto z4 = groups::make_finite_cyclic(4);
  CHECK(z4->mul(z4->parse("a^3"), z4->parse("a^2")) == z4->parse("a"));
  check_group_laws(*z4, 3);
}

TEST_CASE("direct product") {
  const auto g = groups::make_direct_product({groups::make_free(2), groups::make_finite_cyclic(2)});
  const Elem x = g->parse("(b,a)");
  CHECK(g->mul(x, x) == g->parse("(b^2,e)"));
  check_group_laws(*g, 4);
}

TEST_CASE("free product") {
  const auto g = groups::make_free_product(
      {groups::make_finite_cyclic(2), groups::make_finite_cyclic(3)});
  // order-2 letter a, order-3 letter b; (ab)^3 reduces but never to identity
  const Elem ab = g->mul(g->parse("a"), g->parse("b"));
  Elem p = g->identity();
  for (int i = 0; i < 3; ++i) p = g->mul(p, ab);
  CHECK_FALSE(g->is_identity(p));
  CHECK(g->mul(g->parse("a"), g->parse("a")) == g->identity());
  check_group_laws(*g, 5);
}

TEST_CASE("semidirect product with hyperbolic matrix") {
  const auto g = groups::make_semidirect({{2, 1}, {1, 1}});
  // (0,1)*((1,0),0)*(0,-1) = ((A(1,0)),0) = ((2,1),0)
  const Elem lhs = g->mul(g->mul(g->parse("((0,0),1)"), g->parse("((1,0),0)")),
                          g->parse("((0,0),-1)"));
  CHECK(lhs == g->parse("((2,1),0)"));
  check_group_laws(*g, 6);

  CHECK_THROWS_AS(groups::make_semidirect({{2, 0}, {0, 2}}), PreconditionError);
}

TEST_CASE("marked subgroup membership") {
  const auto f2 = groups::make_free(2);
  const auto cyc = groups::mark_cyclic(f2, f2->parse("a"));
  CHECK(cyc->contains(f2->parse("a^5")));
  CHECK_FALSE(cyc->contains(f2->parse("b*a*b^-1")));
  CHECK(cyc->coordinates(f2->parse("a^-3"))->free[0] == Int(-3));

  const auto z2 = groups::make_abelian({Int(0), Int(0)});
  const auto lat = groups::mark_lattice(z2, {z2->parse("(2,0)"), z2->parse("(0,3)")});
  CHECK(lat->contains(z2->parse("(4,-3)")));
  CHECK_FALSE(lat->contains(z2->parse("(1,0)")));

  const auto sd = groups::make_semidirect({{2, 1}, {1, 1}});
  const auto act = groups::mark_acting_z(sd);
  CHECK(act->contains(sd->parse("((0,0),3)")));
  CHECK_FALSE(act->contains(sd->parse("((1,0),3)")));
}

TEST_CASE("ball sizes in the free group") {
  const auto f2 = groups::make_free(2);
  CHECK(groups::ball(*f2, 0).size() == 1);
  CHECK(groups::ball(*f2, 1).size() == 5);
  CHECK(groups::ball(*f2, 2).size() == 17);
  // |ball(free(k), R)| = 1 + sum_{r<=R} 2k (2k-1)^{r-1}
  for (int k = 1; k <= 3; ++k) {
    const auto fk = groups::make_free(k);
    for (int R = 0; R <= 3; ++R) {
      std::size_t expected = 1;
      std::size_t shell = static_cast<std::size_t>(2 * k);
      for (int r = 1; r <= R; ++r) {
        expected += shell;
        shell *= static_cast<std::size_t>(2 * k - 1);
      }
      CHECK(groups::ball(*fk, R).size() == expected);
    }
  }
}

TEST_CASE("ball radii are word lengths") {
  const auto f2 = groups::make_free(2);
  for (const auto& [g, r] : groups::ball_with_radius(*f2, f2->generators(), 3))
    CHECK(f2->length(g) == r);
}

TEST_CASE("model json round trips") {
  const std::vector<std::string> models = {
      R"({"kind":"free","rank":2,"marked":["a"]})",
      R"({"kind":"abelian","invariants":[0,0],"marked":["a"]})",
      R"({"kind":"finite_cyclic","n":4,"marked":["a"]})",
      R"({"kind":"semidirect","matrix":[[2,1],[1,1]],"marked":"acting_Z"})",
  };
  for (const auto& text : models) {
    const GroupModel m = groups::model_from_json(text);
    const GroupModel m2 = groups::model_from_json(groups::model_to_json(m));
    CHECK(m.group->kind() == m2.group->kind());
    std::mt19937 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      const Elem x = rand_elem(*m.group, rng);
      CHECK(m.in_marked(x) == m2.in_marked(x));
    }
  }
}

TEST_CASE("direct product model with torsion marked subgroup") {
  const GroupModel m = groups::model_from_json(
      R"json({"kind":"direct_product",
          "factors":[{"kind":"free","rank":2},{"kind":"finite_cyclic","n":2}],
          "marked":["(a,e)","(e,a)"]})json");
  CHECK(m.in_marked(m.group->parse("(a^3,a)")));
  CHECK_FALSE(m.in_marked(m.group->parse("(b,a)")));
  CHECK(m.marked->free_rank() == 1);
  CHECK(m.marked->torsion_orders() == std::vector<long long>{2});
}

TEST_CASE("marked generators must commute") {
  const auto f2 = groups::make_free(2);
  CHECK_THROWS_AS(groups::mark_subgroup(f2, {f2->parse("a"), f2->parse("b")}),
                  PreconditionError);
}

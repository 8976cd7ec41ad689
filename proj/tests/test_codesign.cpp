#include <doctest.h>

#include <cmath>
#include <random>

#include "codei/codesign/codei_diagram.hpp"
#include "codei/oracle.hpp"
#include "codei_fixtures.hpp"

using namespace codei;
using namespace codei::codesign;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Elem n(double x) { return Elem::number(x); }
Elem t1(double x) { return Elem::tuple({n(x)}); }
Elem t2(double a, double b) { return Elem::tuple({n(a), n(b)}); }

Antichain merged(const PosetPtr& P, const std::vector<Elem>& v) {
  std::vector<Point> pts;
  for (const auto& e : v) pts.push_back({e, {}});
  return antichain_merge(P, pts);
}

PosetPtr pair_poset() { return product({numeric("a"), numeric("b")}); }

// Two computers as a single-block diagram: compute -> price.
Mdpi computers(bool with_zero = false) {
  auto F = product({numeric("GFLOPS")}), R = product({numeric("CHF")});
  std::vector<CatalogEntry> e{{t1(1), t1(100), "A"}, {t1(2), t1(300), "B"}};
  if (with_zero) e.push_back({t1(0), t1(0), "Z"});
  return catalog_mdpi("computing", F, R, e);
}

Diagram computer_diagram() {
  Diagram d("one");
  d.add_block("computing", {{"compute", numeric("GFLOPS")}}, {{"price", numeric("CHF")}}, computers());
  d.expose_functionality("compute", {"computing", "compute"});
  d.expose_resource("price", {"computing", "price"});
  d.set_functionality_grid({t1(0), t1(0.5), t1(1), t1(1.5), t1(2)});
  d.validate();
  return d;
}

}  // namespace

TEST_CASE("poset laws on samples") {
  std::vector<std::pair<PosetPtr, std::vector<Elem>>> cases;
  cases.push_back({numeric("m"), {n(0), n(1), n(2.5), n(kInf)}});
  cases.push_back({opposite(numeric("m")), {n(0), n(1), n(3)}});
  cases.push_back({set_inclusion("s"),
                   {Elem::set({}), Elem::set({"a"}), Elem::set({"b"}), Elem::set({"a", "b"})}});
  cases.push_back({flat("f"), {Elem::token(""), Elem::token("x"), Elem::token("y")}});
  cases.push_back({discrete("d"), {Elem::token("x"), Elem::token("y")}});
  std::vector<Elem> prods;
  for (double a : {0.0, 1.0, 2.0})
    for (double b : {0.0, 1.0}) prods.push_back(t2(a, b));
  cases.push_back({pair_poset(), prods});
  for (const auto& [P, xs] : cases) {
    for (const auto& a : xs) {
      CHECK(P->leq(a, a));
      for (const auto& b : xs) {
        if (P->leq(a, b) && P->leq(b, a)) CHECK(a == b);
        for (const auto& c : xs)
          if (P->leq(a, b) && P->leq(b, c)) CHECK(P->leq(a, c));
        if (auto j = P->join(a, b)) {
          CHECK(P->leq(a, *j));
          CHECK(P->leq(b, *j));
        }
      }
      if (auto bot = P->bottom()) CHECK(P->leq(*bot, a));
      if (auto top = P->top()) CHECK(P->leq(a, *top));
    }
  }
  CHECK(opposite(numeric("m"))->leq(n(3), n(1)));
  CHECK_FALSE(flat("f")->leq(Elem::token("x"), Elem::token("y")));
}

TEST_CASE("antichain_merge examples") {
  auto P = pair_poset();
  auto a = merged(P, {t2(1, 2), t2(2, 1), t2(2, 2)});
  CHECK(a.values() == std::vector<Elem>{t2(1, 2), t2(2, 1)});
  CHECK(is_antichain(a));
  CHECK(merged(P, {t2(3, 3)}).values() == std::vector<Elem>{t2(3, 3)});
  CHECK(merged(numeric("x"), {n(3), n(1), n(2)}).values() == std::vector<Elem>{n(1)});
  CHECK(merged(P, {}).empty());

  // Equal values pool implementations.
  auto pooled = antichain_merge(P, {{t2(1, 1), {{"x"}}}, {t2(1, 1), {{"y"}}}, {t2(2, 2), {{"z"}}}});
  REQUIRE(pooled.size() == 1);
  CHECK(pooled.points[0].impls == std::vector<Impl>{{"x"}, {"y"}});
}

TEST_CASE("antichain_merge is idempotent and minimal") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(0, 6);
  auto P = pair_poset();
  for (int it = 0; it < 200; ++it) {
    std::vector<Elem> xs;
    for (int k = 0; k < 12; ++k) xs.push_back(t2(d(rng), d(rng)));
    auto a = merged(P, xs);
    CHECK(is_antichain(a));
    CHECK(same_values(antichain_merge(P, a.points), a));
    for (const auto& x : xs) {
      bool above = false;
      for (const auto& p : a.points) above = above || P->leq(p.value, x);
      CHECK(above);
    }
  }
}

TEST_CASE("catalog mdpi and the two-computer queries") {
  auto c = computers();
  auto r1 = fix_fun_min_res(c, t1(1));
  REQUIRE(r1.size() == 1);
  CHECK(r1.points[0].value == t1(100));
  CHECK(r1.points[0].impls == std::vector<Impl>{{"computing=A"}});
  auto r15 = fix_fun_min_res(c, t1(1.5));
  REQUIRE(r15.size() == 1);
  CHECK(r15.points[0].value == t1(300));
  CHECK(fix_fun_min_res(c, t1(2.5)).empty());
  CHECK(fix_fun_min_res(c, t1(0)).values() == std::vector<Elem>{t1(100)});

  CHECK(fix_res_max_fun(c, t1(150)).values() == std::vector<Elem>{t1(1)});
  CHECK(fix_res_max_fun(computers(true), t1(0)).values() == std::vector<Elem>{t1(0)});
  CHECK(fix_res_max_fun(c, t1(kInf)).values() == std::vector<Elem>{t1(2)});

  // Per-coordinate minimal vectors at zero demand.
  auto P = pair_poset();
  auto two = catalog_mdpi("two", product({numeric("GFLOPS")}), P,
                          {{t1(1), t2(100, 5), "A"}, {t1(2), t2(300, 1), "B"}, {t1(3), t2(400, 6), "C"}});
  CHECK(fix_fun_min_res(two, t1(0)).values() == std::vector<Elem>{t2(100, 5), t2(300, 1)});
}

TEST_CASE("two-computer diagram") {
  auto d = computer_diagram();
  CHECK(solve_fix_fun_min_res(d, t1(1)).values() == std::vector<Elem>{t1(100)});
  CHECK(solve_fix_fun_min_res(d, t1(1.5)).values() == std::vector<Elem>{t1(300)});
  CHECK(solve_fix_fun_min_res(d, t1(3)).empty());
  CHECK(solve_fix_res_max_fun(d, t1(150)).values() == std::vector<Elem>{t1(1)});
  CHECK(solve_fix_res_max_fun(d, t1(kInf)).values() == std::vector<Elem>{t1(2)});
  CHECK(solve_fix_res_max_fun(d, t1(50)).empty());
}

TEST_CASE("series composition") {
  auto X = product({numeric("x")}), Y = product({numeric("y")}), Z = product({numeric("z")});
  auto first = function_mdpi("first", X, Y, [](const Elem&) { return t1(2); });
  auto table = catalog_mdpi("table", Y, Z, {{t1(1), t1(10), "k1"}, {t1(2), t1(20), "k2"}, {t1(3), t1(30), "k3"}});
  auto s = compose_series(first, table);
  auto r = s.h(t1(0));
  CHECK(r.values() == std::vector<Elem>{t1(20)});

  auto id = compose_series(table, identity_mdpi("id", Z));
  for (double f : {0.0, 1.0, 1.5, 3.0, 4.0}) CHECK(same_values(id.h(t1(f)), table.h(t1(f))));

  auto never = catalog_mdpi("never", X, Y, {});
  CHECK(compose_series(never, table).h(t1(0)).empty());
  CHECK_THROWS_AS(compose_series(table, table), PosetMismatch);
}

TEST_CASE("parallel composition") {
  auto X = numeric("x"), Y = numeric("y");
  auto ix = identity_mdpi("ix", X), iy = identity_mdpi("iy", Y);
  auto p = compose_parallel(ix, iy);
  CHECK(p.h(t2(1, 2)).values() == std::vector<Elem>{t2(1, 2)});

  auto none = catalog_mdpi("none", X, Y, {});
  CHECK(compose_parallel(none, iy).h(t2(0, 0)).empty());

  auto two = catalog_mdpi("two", X, product({Y, Y}),
                          {{n(1), t2(1, 2), "a1"}, {n(1), t2(2, 1), "a2"}});
  auto b = function_mdpi("b", X, Y, [](const Elem&) { return n(7); });
  auto r = compose_parallel(two, b).h(t2(0, 0));
  REQUIRE(r.size() == 2);
  CHECK(r.points[0].value == Elem::tuple({t2(1, 2), n(7)}));
  CHECK(r.points[1].value == Elem::tuple({t2(2, 1), n(7)}));
}

TEST_CASE("composed maps are monotone") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> d(0, 5);
  auto F = product({numeric("f")}), M = pair_poset(), R = product({numeric("r"), numeric("s")});
  for (int it = 0; it < 40; ++it) {
    std::vector<CatalogEntry> e1, e2;
    for (int k = 0; k < 8; ++k) {
      e1.push_back({t1(d(rng)), t2(d(rng), d(rng)), "u" + std::to_string(k)});
      e2.push_back({t2(d(rng), d(rng)), t2(d(rng), d(rng)), "v" + std::to_string(k)});
    }
    auto a = catalog_mdpi("a", F, M, e1);
    auto b = catalog_mdpi("b", M, R, e2);
    auto s = compose_series(a, b);
    auto p = compose_parallel(a, b);
    for (int lo = 0; lo <= 5; ++lo)
      for (int hi = lo; hi <= 5; ++hi) {
        CHECK(upper_leq(s.h(t1(lo)), s.h(t1(hi))));
        CHECK(upper_leq(p.h(Elem::tuple({t1(lo), t2(lo, 0)})), p.h(Elem::tuple({t1(hi), t2(hi, 1)}))));
      }
  }
}

TEST_CASE("kleene agrees with a feedback scan") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> d(0, 4);
  auto F0 = numeric("f"), X = numeric("x"), R0 = numeric("r");
  auto F = product({F0, X}), R = product({R0, X});
  for (int it = 0; it < 100; ++it) {
    std::vector<CatalogEntry> e;
    for (int k = 0; k < 6; ++k) e.push_back({t2(d(rng), d(rng)), t2(d(rng), d(rng)), "e" + std::to_string(k)});
    auto m = catalog_mdpi("m", F, R, e);
    auto loop = compose_loop(m);
    for (int f0 = 0; f0 <= 4; ++f0) {
      // (r0, x) is feasible when some design at feedback x needs at most (r0, x).
      std::vector<Elem> want;
      for (int x = 0; x <= 4; ++x)
        for (const auto& p : m.h(t2(f0, x)).points)
          if (p.value[1].num() <= x) want.push_back(p.value[0]);
      auto got = loop.h(n(f0));
      CHECK(got.values() == merged(R0, want).values());
      auto k = kleene(m, n(f0));
      CHECK(k.iterations <= 10);
      for (const auto& s : k.fixed_point.points) CHECK_FALSE(s.impls.empty());
    }
  }
}

TEST_CASE("kleene reports divergence") {
  auto X = numeric("x");
  auto F = product({numeric("f"), X}), R = product({numeric("r"), X});
  auto up = function_mdpi("up", F, R, [](const Elem& f) { return t2(0, f[1].num() + 1); });
  try {
    kleene(up, n(0), 50);
    FAIL("no divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.loop == "up");
    CHECK(e.iterations == 50);
  }
}

TEST_CASE("diagram errors") {
  auto x = numeric("x"), y = numeric("y");
  auto blk = [&](const std::string& name) { return identity_mdpi(name, product({x})); };
  SUBCASE("cycle without a loop flag") {
    Diagram d;
    d.add_block("a", {{"in", x}}, {{"out", x}}, blk("a"));
    d.add_block("b", {{"in", x}}, {{"out", x}}, blk("b"));
    d.connect({"a", "out"}, {"b", "in"});
    d.connect({"b", "out"}, {"a", "in"});
    CHECK_THROWS(d.order());
    CHECK_THROWS(d.validate());
  }
  SUBCASE("dangling resource") {
    Diagram d;
    d.add_block("a", {{"in", x}}, {{"out", x}}, blk("a"));
    d.expose_functionality("in", {"a", "in"});
    CHECK_THROWS(d.validate());
  }
  SUBCASE("wire poset mismatch") {
    Diagram d;
    d.add_block("a", {{"in", x}}, {{"out", x}}, blk("a"));
    d.add_block("b", {{"in", y}}, {{"out", y}}, identity_mdpi("b", product({y})));
    CHECK_THROWS_AS(d.connect({"a", "out"}, {"b", "in"}), PosetMismatch);
  }
  SUBCASE("block ports must match its problem") {
    Diagram d;
    CHECK_THROWS_AS(d.add_block("a", {{"in", y}}, {{"out", x}}, blk("a")), PosetMismatch);
  }
}

TEST_CASE("series diagram equals composed problems") {
  auto x = numeric("x"), y = numeric("y"), z = numeric("z");
  auto a = catalog_mdpi("a", product({x}), product({y}), {{t1(1), t1(3), "a1"}, {t1(2), t1(5), "a2"}});
  auto b = catalog_mdpi("b", product({y}), product({z}), {{t1(4), t1(10), "b1"}, {t1(6), t1(12), "b2"}});
  Diagram d;
  d.add_block("a", {{"x", x}}, {{"y", y}}, a);
  d.add_block("b", {{"y", y}}, {{"z", z}}, b);
  d.connect({"a", "y"}, {"b", "y"});
  d.expose_functionality("x", {"a", "x"});
  d.expose_resource("z", {"b", "z"});
  d.validate();
  CHECK(d.order() == std::vector<std::string>{"a", "b"});
  auto s = compose_series(a, b);
  for (double f : {0.0, 1.0, 2.0, 3.0}) {
    auto got = solve_fix_fun_min_res(d, t1(f));
    CHECK(got.values() == s.h(t1(f)).values());
  }
  auto r = solve_fix_fun_min_res(d, t1(2));
  REQUIRE(r.size() == 1);
  CHECK(r.points[0].value == t1(12));
  CHECK(r.points[0].impls == std::vector<Impl>{{"a=a2", "b=b2"}});
}

TEST_CASE("codei diagram on a single path") {
  auto p = fixtures::tiny_codei(1, 1, 1);
  p.catalog.computers.resize(1);
  auto cd = build_codei_diagram(p);
  SolveStats st;
  auto r = solve_fix_fun_min_res(cd.diagram, codei_demand(0, 0), &st);
  REQUIRE_FALSE(r.empty());
  CHECK(st.kleene_iterations <= 50);

  auto& m = *cd.model;
  const auto& body = p.catalog.bodies[0];
  const auto& comp = p.catalog.computers[0];
  const auto& run = m.run(p.catalog.planners[0].id, body.id);
  REQUIRE(run.reached);
  std::vector<Elem> want;
  for (const auto& ids : m.front_designs(p.catalog.planners[0].id, body.id, body.id)) {
    double price = comp.price, mass = comp.mass, power = comp.power, gf = 0;
    for (const auto& id : ids) {
      const auto& pp = m.pipeline_of(id);
      price += pp.price;
      mass += pp.mass;
      power += pp.power;
      gf += pp.detector_gflops;
    }
    gf = design::snap(design::snap(gf) + run.compute_gflops);
    if (gf > comp.gflops) continue;
    want.push_back(Elem::tuple({n(design::snap(price)), n(design::snap(mass)), n(design::snap(power)), n(gf),
                                n(body.fixed_cost), n(design::snap(body.op_cost * run.distance_m))}));
  }
  CHECK(r.values() == merged(cd.diagram.R(), want).values());
  for (const auto& s : design_solutions(r)) {
    CHECK(s.resources.size() == kCodeiResources.size());
    REQUIRE_FALSE(s.impls.empty());
  }
}

TEST_CASE("codei diagram without pipelines is infeasible") {
  auto p = fixtures::tiny_codei(1, 1, 1);
  p.catalog.pipelines.clear();
  auto cd = build_codei_diagram(p);
  auto& m = *cd.model;
  auto id = p.catalog.planners[0].id, b = p.catalog.bodies[0].id;
  if (!m.requirements(id, b, b).empty()) CHECK(solve_fix_fun_min_res(cd.diagram, codei_demand(0, 0)).empty());
}

TEST_CASE("codei diagram rejects unresolved references") {
  auto p = fixtures::tiny_codei(1, 1, 1);
  p.classes.clear();
  CHECK_THROWS_WITH_AS(build_codei_diagram(p), doctest::Contains("class car"), std::invalid_argument);
}

TEST_CASE("codei diagram matches design enumeration") {
  auto cd = build_codei_diagram(fixtures::tiny_codei());
  Antichain prev;
  for (double speed : {0.0, 10.0, 21.0, 22.0}) {
    SolveStats st;
    auto r = solve_fix_fun_min_res(cd.diagram, codei_demand(speed, 0), &st);
    CHECK(st.kleene_iterations <= 50);
    auto e = oracle::enumerate_codei(*cd.model, speed, 0);
    CHECK(e.tuples <= 200);
    std::vector<std::vector<double>> got;
    for (const auto& s : design_solutions(r)) got.push_back(s.resources);
    CHECK(got == e.front);
    if (!prev.points.empty() || prev.poset) CHECK(upper_leq(prev, r));
    prev = r;
  }
  CHECK(solve_fix_fun_min_res(cd.diagram, codei_demand(0, 1e9)).empty());
}

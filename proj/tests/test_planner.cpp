#include <doctest.h>

#include <cmath>
#include <random>

#include "codei/dubins.hpp"
#include "codei/planner.hpp"
#include "fixtures.hpp"

using namespace codei;
using namespace codei::planner;
using fixtures::box;
using geom::kPi;

namespace {
world::ClassMap classes() { return {{"car", fixtures::car_class()}}; }

world::Task road_task(const std::vector<std::uint64_t>& seeds, double lambda = 0.0) {
  world::Task t;
  for (auto s : seeds) t.add(world::sample_instance(fixtures::road(60, 8, lambda), classes(), s));
  return t;
}

PlannerSpec kind_spec(PlannerKind k, int budget = 30, double horizon = 1.0) {
  PlannerSpec p = fixtures::lattice(horizon);
  p.kind = k;
  p.budget = budget;
  p.id = to_string(k);
  return p;
}
}  // namespace

TEST_CASE("dubins paths end at the target") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10, 10), a(-kPi, kPi);
  for (int i = 0; i < 2000; ++i) {
    Pose2 from{u(rng), u(rng), a(rng)}, to{u(rng), u(rng), a(rng)};
    double rho = 0.5 + (i % 5);
    auto best = dubins_shortest(from, to, rho);
    REQUIRE(best);
    Pose2 e = best->end();
    CHECK(std::hypot(e.x - to.x, e.y - to.y) < 1e-6);
    CHECK(std::abs(geom::normalize_angle(e.theta - to.theta)) < 1e-6);
    CHECK(best->length() >= std::hypot(to.x - from.x, to.y - from.y) - 1e-9);
    for (auto w : {DubinsWord::LSL, DubinsWord::RSR, DubinsWord::LSR, DubinsWord::RSL,
                   DubinsWord::RLR, DubinsWord::LRL}) {
      auto p = dubins_word(from, to, rho, w);
      if (!p) continue;
      Pose2 pe = p->end();
      CHECK(std::hypot(pe.x - to.x, pe.y - to.y) < 1e-6);
      CHECK(best->length() <= p->length() + 1e-12);
    }
  }
}

TEST_CASE("dubins straight line") {
  auto p = dubins_shortest({0, 0, 0}, {10, 0, 0}, 2.0);
  REQUIRE(p);
  CHECK(p->length() == doctest::Approx(10.0));
  Pose2 mid = p->sample(4.0);
  CHECK(mid.x == doctest::Approx(4.0));
  CHECK(mid.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("query quantization round trip") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-50, 50), a(-kPi, kPi), t(0, 2);
  for (int i = 0; i < 1000; ++i) {
    OccupancyQuery q{{u(rng), u(rng), a(rng)}, t(rng), world::env_from_code(i % 4),
                     {u(rng), u(rng), a(rng)}};
    QueryKey k = quantize(q);
    CHECK(quantize(dequantize(k)) == k);
    auto d = dequantize(k);
    CHECK(std::abs(d.pose.x - q.pose.x) <= 0.05 + 1e-9);
    CHECK(std::abs(d.tau - q.tau) <= 0.05 + 1e-9);
    CHECK(std::abs(geom::normalize_angle(d.pose.theta - q.pose.theta)) <= kPi / 180 + 1e-9);
  }
  OccupancyQuery wrap{{0, 0, kPi - 1e-6}, 0, {}, {}};
  OccupancyQuery wrap2{{0, 0, -kPi}, 0, {}, {}};
  CHECK(quantize(wrap) == quantize(wrap2));
}

TEST_CASE("lattice planner reaches the goal on an empty road") {
  auto task = road_task({1});
  const auto& inst = task.instances[0];
  auto body = fixtures::small_car();
  auto spec = fixtures::lattice(1.0);
  auto res = plan(spec, body, inst, ground_truth_oracle(body, inst));
  CHECK(res.outcome == Outcome::reached);
  CHECK(!res.log.keys.empty());
  const double bound = spec.horizon * body.limits.v_max + 0.1;
  for (const auto& k : res.log.keys) {
    auto q = dequantize(k);
    CHECK(std::hypot(q.pose.x, q.pose.y) <= bound);
    CHECK(q.tau >= 0.0);
    CHECK(q.tau <= spec.horizon + 1e-9);
  }
  auto v = average_speed({res});
  REQUIRE(v);
  CHECK(*v > 2.0);
  CHECK(*v <= 8.0 + 1e-9);
}

TEST_CASE("all planner kinds reach the goal and respect the horizon") {
  auto task = road_task({2});
  const auto& inst = task.instances[0];
  auto body = fixtures::small_car();
  for (auto k : {PlannerKind::lattice_astar, PlannerKind::rrt, PlannerKind::rrt_star}) {
    CAPTURE(to_string(k));
    auto spec = kind_spec(k, 40, 2.0);
    auto res = plan(spec, body, inst, ground_truth_oracle(body, inst));
    CHECK(res.outcome == Outcome::reached);
    for (const auto& key : res.log.keys) {
      auto q = dequantize(key);
      CHECK(q.tau <= spec.horizon + 0.05 + 1e-9);
      CHECK(std::hypot(q.pose.x, q.pose.y) <= spec.horizon * body.limits.v_max + 0.1);
    }
    for (std::size_t i = 1; i < res.trajectory.size(); ++i)
      CHECK(res.trajectory[i].t > res.trajectory[i - 1].t);
  }
}

TEST_CASE("goal containing the start is reached immediately") {
  auto spec_s = fixtures::road();
  spec_s.goal = box(-2, -2, 2, 2);
  auto inst = world::sample_instance(spec_s, classes(), 1);
  auto body = fixtures::small_car();
  auto res = plan(fixtures::lattice(), body, inst, ground_truth_oracle(body, inst));
  CHECK(res.outcome == Outcome::reached);
  CHECK(res.trajectory.empty());
  CHECK(res.log.keys.empty());
}

TEST_CASE("blocked road ends stuck or timed out, never reached") {
  auto spec_s = fixtures::road();
  spec_s.obstacles.push_back(box(6, -15, 8, 15));
  auto inst = world::sample_instance(spec_s, classes(), 1);
  auto body = fixtures::small_car();
  for (auto k : {PlannerKind::lattice_astar, PlannerKind::rrt, PlannerKind::rrt_star}) {
    auto res = plan(kind_spec(k), body, inst, ground_truth_oracle(body, inst));
    CHECK(res.outcome != Outcome::reached);
    CHECK_FALSE(average_speed({res}).has_value());
  }
}

TEST_CASE("plan is deterministic") {
  auto task = road_task({3}, 2.0);
  const auto& inst = task.instances[0];
  auto body = fixtures::small_car();
  for (auto k : {PlannerKind::lattice_astar, PlannerKind::rrt, PlannerKind::rrt_star}) {
    auto spec = kind_spec(k);
    auto a = plan(spec, body, inst, ground_truth_oracle(body, inst));
    auto b = plan(spec, body, inst, ground_truth_oracle(body, inst));
    CHECK(a.log.keys == b.log.keys);
    CHECK(a.log.checks == b.log.checks);
    CHECK(a.log.checks_per_replan == b.log.checks_per_replan);
    CHECK(a.trajectory.size() == b.trajectory.size());
  }
}

TEST_CASE("task_queries union semantics") {
  auto body = fixtures::small_car();
  auto spec = fixtures::lattice();
  CHECK(task_queries(spec, body, world::Task{}).empty());

  auto t2 = road_task({1, 2, 3}, 1.0);
  auto t1 = t2.subset({"road-1", "road-3"});
  auto q1 = task_queries(spec, body, t1);
  auto q2 = task_queries(spec, body, t2);
  CHECK(query_subset(q1, q2));
  CHECK_FALSE(query_subset(q2, q1));

  auto single = t2.subset({"road-2"});
  const auto& inst = single.instances[0];
  auto res = plan(spec, body, inst, ground_truth_oracle(body, inst));
  auto qs = task_queries(spec, body, single);
  REQUIRE(qs.size() == 1);
  CHECK(qs.at("road-2") == res.log.keys);
}

TEST_CASE("average_speed pools length and time") {
  auto straight = [](double len, double dur) {
    PlanResult r;
    r.outcome = Outcome::reached;
    r.trajectory = {{0, {0, 0, 0}, 0}, {dur, {len, 0, 0}, 0}};
    return r;
  };
  CHECK(*average_speed({straight(10, 2)}) == doctest::Approx(5.0));
  CHECK(*average_speed({straight(10, 2), straight(30, 4)}) == doctest::Approx(40.0 / 6.0));
  auto stuck = straight(10, 2);
  stuck.outcome = Outcome::stuck;
  CHECK_FALSE(average_speed({straight(10, 2), stuck}).has_value());
}

TEST_CASE("rrt_star with a larger budget asks a superset of queries") {
  auto task = road_task({4}, 3.0);
  const auto& inst = task.instances[0];
  auto body = fixtures::small_car();
  auto oracle = ground_truth_oracle(body, inst);
  world::MotionState s0{inst.start, 3.0};
  for (int b : {5, 10, 20, 40}) {
    auto small = replan_once(kind_spec(PlannerKind::rrt_star, b, 2.0), body, inst, oracle, s0, 0);
    auto big = replan_once(kind_spec(PlannerKind::rrt_star, 2 * b, 2.0), body, inst, oracle, s0, 0);
    CHECK(std::includes(big.keys.begin(), big.keys.end(), small.keys.begin(), small.keys.end()));
    CHECK(big.keys.size() >= small.keys.size());
  }
}

TEST_CASE("planner compute scales with checks per replan") {
  auto task = road_task({1});
  auto body = fixtures::small_car();
  auto spec = fixtures::lattice();
  auto res = run_task(spec, body, task);
  double g = planner_compute_gflops(spec, res);
  std::uint32_t worst = 0;
  for (auto c : res[0].log.checks_per_replan) worst = std::max(worst, c);
  CHECK(worst > 0);
  CHECK(g == doctest::Approx(worst * spec.gflop_per_check / spec.replan_period));
}

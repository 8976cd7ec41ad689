#include <doctest.h>

#include <cmath>

#include "codei/world.hpp"

using namespace codei;
using namespace codei::world;
using geom::kPi;

namespace {
std::vector<Vec2> square(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

ObjectClass car_class() {
  ObjectClass c;
  c.id = "car";
  c.limits = {10.0, 2.0, 4.0, 5.0};
  c.footprint = Footprint::rectangle(4.5, 1.8);
  c.appearances = {{{4.5, 1.8, 1.5, 0.6, Tone::light}, 2.0}, {{4.2, 1.7, 1.4, 0.3, Tone::dark}, 1.0}};
  return c;
}

ScenarioSpec road_spec(double lambda) {
  ScenarioSpec s;
  s.name = "road";
  s.workspace = {-10, -20, 100, 20};
  s.start = {0, 0, 0};
  s.goal = square(80, -5, 90, 5);
  s.envs = {{{Light::day, Weather::dry}, 1.0}, {{Light::night, Weather::rain}, 1.0}};
  s.spawns = {{"car", lambda}};
  s.priors["car"].regions.push_back({square(-10, 8, 100, 20), -kPi, kPi});
  s.nominal_speed = 8.0;
  return s;
}
}  // namespace

TEST_CASE("in_prior examples") {
  Prior empty;
  CHECK_FALSE(in_prior(empty, {0, 0, 0}));
  Prior full;
  full.regions.push_back({square(-100, -100, 100, 100), -kPi, kPi});
  CHECK(in_prior(full, {3, -4, 2.5}));
  CHECK(in_prior(full, {3, -4, -kPi}));
  Prior unit;
  unit.regions.push_back({square(0, 0, 1, 1), -0.1, 0.1});
  CHECK(in_prior(unit, {0.5, 0.5, 0}));
  CHECK_FALSE(in_prior(unit, {0.5, 0.5, kPi}));
  CHECK_FALSE(in_prior(unit, {0.5, 0.5, 0.1}));
  CHECK(in_prior(unit, {0.5, 0.5, -0.1}));
}

TEST_CASE("heading intervals may wrap through pi") {
  CHECK(in_heading_interval(3.0, -3.0, kPi - 0.01));
  CHECK(in_heading_interval(3.0, -3.0, -kPi));
  CHECK_FALSE(in_heading_interval(3.0, -3.0, 0.0));
}

TEST_CASE("step examples") {
  DynamicsLimits L{5.0, 1.0, 2.0, 1.0};
  MotionState s{{1, 2, 0.3}, 0.0};
  auto n = step(L, s, {0.0, 0.5}, 0.1);
  CHECK(n.pose.x == s.pose.x);
  CHECK(n.pose.y == s.pose.y);
  CHECK(n.pose.theta == s.pose.theta);
  CHECK(n.speed == 0.0);

  auto m = step(L, {{0, 0, 0}, 1.0}, {0.0, 0.0}, 1.0);
  CHECK(m.pose.x == doctest::Approx(1.0));
  CHECK(m.pose.y == 0.0);

  MotionState c{{0, 0, 0}, 1.0};
  int steps = static_cast<int>(std::llround(2 * kPi / 0.01));
  for (int i = 0; i < steps; ++i) c = step(L, c, {0.0, 1.0}, 0.01);
  CHECK(std::hypot(c.pose.x, c.pose.y) < 0.05);
}

TEST_CASE("step enforces limits") {
  DynamicsLimits L{5.0, 1.0, 2.0, 2.0};
  MotionState s{{}, 4.9};
  CHECK_THROWS(step(L, s, {1.5, 0.0}, 0.1));
  CHECK_THROWS(step(L, s, {-2.5, 0.0}, 0.1));
  CHECK_THROWS(step(L, s, {0.0, 0.6}, 0.1));
  CHECK_THROWS(step(L, s, {0.0, 0.0}, 0.0));
  CHECK(step(L, s, {1.0, 0.5}, 1.0).speed == 5.0);
  CHECK(step(L, {{}, 0.5}, {-2.0, 0.0}, 1.0).speed == 0.0);
  DynamicsLimits free_turn{1.0, 1.0, 1.0, 0.0};
  CHECK_NOTHROW(step(free_turn, s, {0.0, 100.0}, 0.1));
}

TEST_CASE("sample_instance with zero rate has no objects") {
  ClassMap classes{{"car", car_class()}};
  auto inst = sample_instance(road_spec(0.0), classes, 42);
  CHECK(inst.objects.empty());
  CHECK(inst.id == "road-42");
}

TEST_CASE("sample_instance is deterministic") {
  ClassMap classes{{"car", car_class()}};
  auto a = sample_instance(road_spec(3.0), classes, 9);
  auto b = sample_instance(road_spec(3.0), classes, 9);
  REQUIRE(a.objects.size() == b.objects.size());
  CHECK(a.env == b.env);
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    CHECK(a.objects[i].initial.x == b.objects[i].initial.x);
    CHECK(a.objects[i].initial.theta == b.objects[i].initial.theta);
    CHECK(a.objects[i].appearance_index == b.objects[i].appearance_index);
    CHECK(a.objects[i].track.back().x == b.objects[i].track.back().x);
  }
}

TEST_CASE("sample_instance object counts follow the Poisson mean") {
  ClassMap classes{{"car", car_class()}};
  auto spec = road_spec(4.0);
  spec.script_duration = 2.0;
  double total = 0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) total += sample_instance(spec, classes, s).objects.size();
  double mean = total / n;
  CHECK(mean >= 3.8);
  CHECK(mean <= 4.2);
}

TEST_CASE("sampled instances satisfy their invariants") {
  ClassMap classes{{"car", car_class()}};
  auto spec = road_spec(2.5);
  for (int s = 0; s < 300; ++s) {
    auto inst = sample_instance(spec, classes, 1000 + s);
    CHECK_NOTHROW(inst.validate());
    for (const auto& o : inst.objects) {
      CHECK(in_prior(inst.priors.at("car"), o.initial));
      CHECK(o.appearance_index >= 0);
      CHECK(o.appearance_index < 2);
      CHECK(o.initial_speed <= classes.at("car").limits.v_max);
      CHECK(o.track.size() == 201);
    }
  }
}

TEST_CASE("sample_instance rejects empty priors") {
  ClassMap classes{{"car", car_class()}};
  auto spec = road_spec(50.0);
  spec.priors["car"].regions.clear();
  CHECK_THROWS(sample_instance(spec, classes, 1));
  spec.priors["car"].regions.push_back({square(500, 500, 501, 501), -kPi, kPi});
  CHECK_THROWS(sample_instance(spec, classes, 1));
}

TEST_CASE("object tracks respect class dynamics") {
  ClassMap classes{{"car", car_class()}};
  auto inst = sample_instance(road_spec(3.0), classes, 77);
  for (const auto& o : inst.objects) {
    for (std::size_t i = 1; i < o.track.size(); ++i) {
      double d = std::hypot(o.track[i].x - o.track[i - 1].x, o.track[i].y - o.track[i - 1].y);
      CHECK(d <= 10.0 * kTrackDt + 1e-9);
    }
    CHECK(o.pose_at(1e6).x == o.track.back().x);
  }
}

TEST_CASE("Task keeps instances sorted and unique") {
  ClassMap classes{{"car", car_class()}};
  Task t;
  t.add(sample_instance(road_spec(0), classes, 3));
  t.add(sample_instance(road_spec(0), classes, 1));
  CHECK_THROWS(t.add(sample_instance(road_spec(0), classes, 1)));
  REQUIRE(t.instances.size() == 2);
  CHECK(t.instances[0].id == "road-1");
  CHECK(t.subset({"road-3"}).instances.size() == 1);
  CHECK_THROWS(t.subset({"nope"}));
}

TEST_CASE("env tokens round trip") {
  for (std::uint8_t c = 0; c < 4; ++c) {
    auto e = env_from_code(c);
    CHECK(env_code(e) == c);
    CHECK(env_from_string(to_string(e)) == e);
  }
  CHECK_THROWS(env_from_string("dusk-dry"));
}

#pragma once

#include "codei/planner.hpp"
#include "codei/world.hpp"

namespace fixtures {

using namespace codei;

inline std::vector<geom::Vec2> box(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

inline planner::RobotBody small_car() {
  planner::RobotBody b;
  b.id = "small";
  b.footprint = geom::Footprint::rectangle(4.0, 2.0);
  b.height_profile = {{b.footprint, 1.5}};
  b.limits = {12.0, 3.0, 6.0, 5.0};
  b.mount_points = {{"roof", {0.0, 0.0, 1.7}}, {"front", {2.0, 0.0, 0.8}}};
  b.payload_max = 50;
  b.aux_power = 500;
  b.driving_range = 100000;
  b.fixed_cost = 20000;
  b.op_cost = 0.1;
  return b;
}

inline world::ObjectClass car_class() {
  world::ObjectClass c;
  c.id = "car";
  c.limits = {10.0, 2.0, 4.0, 5.0};
  c.footprint = geom::Footprint::rectangle(4.5, 1.8);
  c.appearances = {{{4.5, 1.8, 1.5, 0.6, world::Tone::light}, 1.0}};
  return c;
}

// Straight open road along +x with the goal at the far end.
inline world::ScenarioSpec road(double length = 60.0, double speed = 8.0, double lambda = 0.0) {
  world::ScenarioSpec s;
  s.name = "road";
  s.workspace = {-10, -15, length + 10, 15};
  s.start = {0, 0, 0};
  s.goal = box(length - 5, -4, length + 5, 4);
  s.envs = {{{world::Light::day, world::Weather::dry}, 1.0}};
  s.spawns = {{"car", lambda}};
  s.priors["car"].regions.push_back({box(-10, 6, length + 10, 15), -geom::kPi, geom::kPi});
  s.nominal_speed = speed;
  s.script_duration = 20.0;
  s.time_limit = 40.0;
  return s;
}

inline planner::PlannerSpec lattice(double horizon = 1.0) {
  planner::PlannerSpec p;
  p.id = "lattice";
  p.kind = planner::PlannerKind::lattice_astar;
  p.horizon = horizon;
  p.replan_period = 0.5;
  p.budget = 30;
  p.seed = 5;
  return p;
}

}  // namespace fixtures

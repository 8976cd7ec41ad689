#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "codei/geom.hpp"

namespace codei::world {

using geom::Footprint;
using geom::Pose2;
using geom::Vec2;

struct DynamicsLimits {
  double v_max = 0.0;
  double a_max = 0.0;
  double d_max = 0.0;
  double turn_radius_min = 0.0;

  void validate() const;
  // +inf when turn_radius_min == 0.
  double max_curvature() const;
};

enum class Tone { light, dark };

struct Appearance {
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double reflectivity = 0.5;
  Tone tone = Tone::light;

  void validate() const;
};

struct WeightedAppearance {
  Appearance appearance;
  double weight = 1.0;
};

struct ObjectClass {
  std::string id;
  DynamicsLimits limits;
  Footprint footprint;
  std::vector<WeightedAppearance> appearances;

  void validate() const;
};

using ClassMap = std::map<std::string, ObjectClass>;

struct PriorRegion {
  std::vector<Vec2> polygon;
  double heading_lo = -geom::kPi;
  double heading_hi = geom::kPi;
};

struct Prior {
  std::vector<PriorRegion> regions;
};

bool in_heading_interval(double lo, double hi, double theta);
bool in_prior(const Prior& prior, const Pose2& q);

enum class Light { day, night };
enum class Weather { dry, rain };

struct EnvCondition {
  Light light = Light::day;
  Weather weather = Weather::dry;

  auto operator<=>(const EnvCondition&) const = default;
};

std::string to_string(EnvCondition env);
EnvCondition env_from_string(const std::string& s);
std::uint8_t env_code(EnvCondition env);
EnvCondition env_from_code(std::uint8_t code);

struct Rect {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  bool contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
};

struct ControlSegment {
  double duration = 0.0;
  double accel = 0.0;
  double curvature = 0.0;
};

struct MotionState {
  Pose2 pose;
  double speed = 0.0;
};

struct Control {
  double accel = 0.0;
  double curvature = 0.0;
};

// Euler step of the unicycle model. Throws on controls outside the limits.
MotionState step(const DynamicsLimits& limits, const MotionState& s, const Control& u, double dt);
// Same integration without the limit checks; dt may be negative.
MotionState step_unchecked(const DynamicsLimits& limits, const MotionState& s, const Control& u,
                           double dt);

inline constexpr double kTrackDt = 0.1;

struct ObjectInstance {
  std::string class_id;
  int appearance_index = 0;
  Appearance appearance;
  Pose2 initial;
  double initial_speed = 0.0;
  std::vector<ControlSegment> script;
  // World poses every kTrackDt seconds; the last pose holds afterwards.
  std::vector<Pose2> track;

  Pose2 pose_at(double t) const;
  Footprint footprint() const;
};

void build_track(ObjectInstance& obj, const DynamicsLimits& limits, double duration);

struct ScenarioInstance {
  std::string id;
  std::string scenario;
  std::uint64_t seed = 0;
  Rect workspace;
  std::vector<std::vector<Vec2>> obstacles;
  Pose2 start;
  std::vector<Vec2> goal;
  EnvCondition env;
  std::vector<ObjectInstance> objects;
  std::map<std::string, Prior> priors;
  double nominal_speed = 0.0;
  double time_limit = 60.0;

  void validate() const;
};

struct ClassSpawn {
  std::string class_id;
  double lambda = 0.0;
};

struct EnvWeight {
  EnvCondition env;
  double weight = 1.0;
};

struct ScenarioSpec {
  std::string name;
  Rect workspace;
  std::vector<std::vector<Vec2>> obstacles;
  Pose2 start;
  std::vector<Vec2> goal;
  std::vector<EnvWeight> envs;
  std::vector<ClassSpawn> spawns;
  std::map<std::string, Prior> priors;
  double nominal_speed = 0.0;
  double script_duration = 20.0;
  double time_limit = 60.0;
};

// Poisson object counts and rejection-sampled initial poses. Deterministic in seed.
ScenarioInstance sample_instance(const ScenarioSpec& spec, const ClassMap& classes,
                                 std::uint64_t seed);

struct Task {
  std::vector<ScenarioInstance> instances;  // sorted by id

  void add(ScenarioInstance inst);
  Task subset(const std::vector<std::string>& ids) const;
};

}  // namespace codei::world

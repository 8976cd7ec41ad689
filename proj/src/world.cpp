#include "codei/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/random/discrete_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "codei/hash.hpp"

namespace codei::world {

using geom::kPi;
using geom::normalize_angle;

namespace {
constexpr double kLimitTol = 1e-9;
// Curvature used for scripted objects whose class has no turning limit.
constexpr double kScriptCurvatureCap = 0.2;
constexpr double kScriptSegment = 2.0;
constexpr int kRejectionBudget = 10000;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
}  // namespace

void DynamicsLimits::validate() const {
  if (!finite_nonneg(v_max) || !finite_nonneg(a_max) || !finite_nonneg(d_max) ||
      !(turn_radius_min >= 0.0))
    throw std::invalid_argument("DynamicsLimits: values must be finite and >= 0");
}

double DynamicsLimits::max_curvature() const {
  if (turn_radius_min == 0.0) return INFINITY;
  if (std::isinf(turn_radius_min)) return 0.0;
  return 1.0 / turn_radius_min;
}

void Appearance::validate() const {
  if (!(length > 0) || !(width > 0) || !(height > 0))
    throw std::invalid_argument("Appearance: extents must be positive");
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0))
    throw std::invalid_argument("Appearance: reflectivity must be in [0,1]");
}

void ObjectClass::validate() const {
  limits.validate();
  if (appearances.empty()) throw std::invalid_argument("ObjectClass " + id + ": no appearances");
  for (const auto& a : appearances) {
    a.appearance.validate();
    if (!(a.weight > 0) || !std::isfinite(a.weight))
      throw std::invalid_argument("ObjectClass " + id + ": appearance weights must be positive");
  }
  if (footprint.empty()) throw std::invalid_argument("ObjectClass " + id + ": missing footprint");
}

bool in_heading_interval(double lo, double hi, double theta) {
  theta = normalize_angle(theta);
  if (lo <= hi) return theta >= lo && theta < hi;
  return theta >= lo || theta < hi;  // wraps through pi
}

bool in_prior(const Prior& prior, const Pose2& q) {
  for (const auto& r : prior.regions) {
    if (geom::point_in_convex(r.polygon, {q.x, q.y}) &&
        in_heading_interval(r.heading_lo, r.heading_hi, q.theta))
      return true;
  }
  return false;
}

std::string to_string(EnvCondition env) {
  return std::string(env.light == Light::day ? "day" : "night") + "-" +
         (env.weather == Weather::dry ? "dry" : "rain");
}

EnvCondition env_from_string(const std::string& s) {
  auto dash = s.find('-');
  if (dash == std::string::npos) throw std::invalid_argument("bad env token: " + s);
  std::string l = s.substr(0, dash), w = s.substr(dash + 1);
  EnvCondition e;
  if (l == "day")
    e.light = Light::day;
  else if (l == "night")
    e.light = Light::night;
  else
    throw std::invalid_argument("bad light token: " + l);
  if (w == "dry")
    e.weather = Weather::dry;
  else if (w == "rain")
    e.weather = Weather::rain;
  else
    throw std::invalid_argument("bad weather token: " + w);
  return e;
}

std::uint8_t env_code(EnvCondition env) {
  return static_cast<std::uint8_t>((env.light == Light::night ? 2 : 0) +
                                   (env.weather == Weather::rain ? 1 : 0));
}

EnvCondition env_from_code(std::uint8_t code) {
  if (code > 3) throw std::invalid_argument("bad env code");
  return {code & 2 ? Light::night : Light::day, code & 1 ? Weather::rain : Weather::dry};
}

MotionState step_unchecked(const DynamicsLimits& limits, const MotionState& s, const Control& u,
                           double dt) {
  MotionState n;
  double v = s.speed;
  n.pose.x = s.pose.x + v * std::cos(s.pose.theta) * dt;
  n.pose.y = s.pose.y + v * std::sin(s.pose.theta) * dt;
  n.pose.theta = normalize_angle(s.pose.theta + v * u.curvature * dt);
  n.speed = std::clamp(v + u.accel * dt, 0.0, limits.v_max);
  return n;
}

MotionState step(const DynamicsLimits& limits, const MotionState& s, const Control& u, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("step: dt must be positive");
  if (u.accel > limits.a_max + kLimitTol || u.accel < -limits.d_max - kLimitTol)
    throw std::invalid_argument("step: acceleration outside limits");
  if (std::abs(u.curvature) > limits.max_curvature() * (1 + kLimitTol) + kLimitTol)
    throw std::invalid_argument("step: curvature outside limits");
  return step_unchecked(limits, s, u, dt);
}

Pose2 ObjectInstance::pose_at(double t) const {
  if (track.empty()) return initial;
  if (t <= 0) return track.front();
  auto i = static_cast<std::size_t>(std::llround(t / kTrackDt));
  return track[std::min(i, track.size() - 1)];
}

Footprint ObjectInstance::footprint() const {
  return Footprint::rectangle(appearance.length, appearance.width);
}

void build_track(ObjectInstance& obj, const DynamicsLimits& limits, double duration) {
  obj.track.clear();
  MotionState s{obj.initial, std::min(obj.initial_speed, limits.v_max)};
  obj.track.push_back(s.pose);
  std::size_t seg = 0;
  double seg_t = 0.0;
  int steps = static_cast<int>(std::llround(duration / kTrackDt));
  for (int k = 0; k < steps; ++k) {
    while (seg < obj.script.size() && seg_t >= obj.script[seg].duration - 1e-12) {
      seg_t = 0.0;
      ++seg;
    }
    Control u;
    if (seg < obj.script.size()) u = {obj.script[seg].accel, obj.script[seg].curvature};
    s = step_unchecked(limits, s, u, kTrackDt);
    obj.track.push_back(s.pose);
    seg_t += kTrackDt;
  }
}

void ScenarioInstance::validate() const {
  if (goal.size() < 3) throw std::invalid_argument("instance " + id + ": goal polygon too small");
  for (const Vec2& g : goal)
    if (!workspace.contains(g))
      throw std::invalid_argument("instance " + id + ": goal outside workspace");
  for (const auto& ob : obstacles)
    if (geom::point_in_convex(ob, {start.x, start.y}))
      throw std::invalid_argument("instance " + id + ": start inside an obstacle");
  for (const auto& o : objects) {
    auto it = priors.find(o.class_id);
    if (it == priors.end() || !in_prior(it->second, o.initial))
      throw std::invalid_argument("instance " + id + ": object violates its prior");
  }
}

ScenarioInstance sample_instance(const ScenarioSpec& spec, const ClassMap& classes,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(hash_string(seed, spec.name));
  ScenarioInstance inst;
  inst.scenario = spec.name;
  inst.seed = seed;
  inst.id = spec.name + "-" + std::to_string(seed);
  inst.workspace = spec.workspace;
  inst.obstacles = spec.obstacles;
  inst.start = spec.start;
  inst.goal = spec.goal;
  inst.priors = spec.priors;
  inst.nominal_speed = spec.nominal_speed;
  inst.time_limit = spec.time_limit;

  if (spec.envs.empty()) {
    inst.env = {};
  } else {
    std::vector<double> w;
    for (const auto& e : spec.envs) w.push_back(e.weight);
    boost::random::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    inst.env = spec.envs[pick(rng)].env;
  }

  boost::random::uniform_real_distribution<double> ux(spec.workspace.x_min, spec.workspace.x_max);
  boost::random::uniform_real_distribution<double> uy(spec.workspace.y_min, spec.workspace.y_max);
  boost::random::uniform_real_distribution<double> uth(-kPi, kPi);
  boost::random::uniform_real_distribution<double> u01(0.0, 1.0);

  for (const auto& spawn : spec.spawns) {
    if (!(spawn.lambda >= 0) || !std::isfinite(spawn.lambda))
      throw std::invalid_argument("spawn rate must be >= 0");
    auto cit = classes.find(spawn.class_id);
    if (cit == classes.end()) throw std::invalid_argument("unknown class " + spawn.class_id);
    const ObjectClass& cls = cit->second;
    int count = 0;
    if (spawn.lambda > 0) {
      boost::random::poisson_distribution<int, double> pois(spawn.lambda);
      count = pois(rng);
    }
    if (count == 0) continue;
    auto pit = spec.priors.find(spawn.class_id);
    if (pit == spec.priors.end() || pit->second.regions.empty())
      throw std::invalid_argument("scenario " + spec.name + ": empty prior for class " +
                                  spawn.class_id);
    std::vector<double> aw;
    for (const auto& a : cls.appearances) aw.push_back(a.weight);
    boost::random::discrete_distribution<std::size_t> pick_app(aw.begin(), aw.end());
    double kmax = std::min(cls.limits.max_curvature(), kScriptCurvatureCap);

    for (int n = 0; n < count; ++n) {
      ObjectInstance obj;
      obj.class_id = cls.id;
      obj.appearance_index = static_cast<int>(pick_app(rng));
      obj.appearance = cls.appearances[obj.appearance_index].appearance;
      bool placed = false;
      for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
        Pose2 q{ux(rng), uy(rng), uth(rng)};
        if (in_prior(pit->second, q)) {
          obj.initial = q;
          placed = true;
          break;
        }
      }
      if (!placed)
        throw std::runtime_error("scenario " + spec.name + ": rejection budget exhausted for " +
                                 cls.id);
      obj.initial_speed = u01(rng) * cls.limits.v_max;
      int segs = static_cast<int>(std::ceil(spec.script_duration / kScriptSegment));
      for (int s = 0; s < segs; ++s) {
        double a = -cls.limits.d_max + u01(rng) * (cls.limits.a_max + cls.limits.d_max);
        double k = (2 * u01(rng) - 1) * kmax;
        obj.script.push_back({kScriptSegment, a, k});
      }
      build_track(obj, cls.limits, spec.script_duration);
      inst.objects.push_back(std::move(obj));
    }
  }
  inst.validate();
  return inst;
}

void Task::add(ScenarioInstance inst) {
  auto it = std::lower_bound(instances.begin(), instances.end(), inst.id,
                             [](const ScenarioInstance& a, const std::string& id) { return a.id < id; });
  if (it != instances.end() && it->id == inst.id)
    throw std::invalid_argument("Task: duplicate instance id " + inst.id);
  instances.insert(it, std::move(inst));
}

Task Task::subset(const std::vector<std::string>& ids) const {
  Task t;
  for (const auto& id : ids) {
    auto it = std::find_if(instances.begin(), instances.end(),
                           [&](const ScenarioInstance& s) { return s.id == id; });
    if (it == instances.end()) throw std::invalid_argument("Task::subset: unknown instance " + id);
    t.add(*it);
  }
  return t;
}

}  // namespace codei::world

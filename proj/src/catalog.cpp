#include "codei/catalog.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace codei::catalog {

using nlohmann::json;

namespace {

template <class T>
void check_unique(const std::vector<T>& xs, const char* what) {
  std::set<std::string> seen;
  std::string dups;
  for (const auto& x : xs)
    if (!seen.insert(x.id).second) dups += (dups.empty() ? "" : ", ") + x.id;
  if (!dups.empty()) throw std::invalid_argument(std::string("duplicate ") + what + " ids: " + dups);
  if (xs.empty()) throw std::invalid_argument(std::string("catalog has no ") + what);
}

template <class T>
const T& find(const std::vector<T>& xs, const std::string& id, const char* what) {
  for (const auto& x : xs)
    if (x.id == id) return x;
  throw std::invalid_argument(std::string("unknown ") + what + " id: " + id);
}

json vec2(geom::Vec2 v) { return json::array({v.x, v.y}); }
geom::Vec2 vec2(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json polygon(const std::vector<geom::Vec2>& p) {
  json a = json::array();
  for (auto v : p) a.push_back(vec2(v));
  return a;
}
std::vector<geom::Vec2> polygon(const json& j) {
  std::vector<geom::Vec2> p;
  for (const auto& v : j) p.push_back(vec2(v));
  return p;
}

json pose(const geom::Pose2& p) { return {{"x_m", p.x}, {"y_m", p.y}, {"theta_rad", p.theta}}; }
geom::Pose2 pose(const json& j) {
  return {j.at("x_m").get<double>(), j.at("y_m").get<double>(), j.value("theta_rad", 0.0)};
}

json limits(const world::DynamicsLimits& l) {
  return {{"v_max_mps", l.v_max},
          {"a_max_mps2", l.a_max},
          {"d_max_mps2", l.d_max},
          {"turn_radius_min_m", l.turn_radius_min}};
}
world::DynamicsLimits limits(const json& j) {
  return {j.at("v_max_mps").get<double>(), j.at("a_max_mps2").get<double>(),
          j.at("d_max_mps2").get<double>(), j.at("turn_radius_min_m").get<double>()};
}

json body(const planner::RobotBody& b) {
  json hp = json::array();
  for (const auto& e : b.height_profile)
    hp.push_back({{"footprint_m", polygon(e.footprint.vertices())}, {"height_m", e.height}});
  json mounts = json::array();
  for (const auto& m : b.mount_points)
    mounts.push_back({{"name", m.name}, {"position_m", {m.position.x, m.position.y, m.position.z}}});
  return {{"id", b.id},
          {"footprint_m", polygon(b.footprint.vertices())},
          {"height_profile", hp},
          {"limits", limits(b.limits)},
          {"mount_points", mounts},
          {"payload_max_kg", b.payload_max},
          {"aux_power_w", b.aux_power},
          {"driving_range_m", b.driving_range},
          {"fixed_cost_chf", b.fixed_cost},
          {"op_cost_chf_per_m", b.op_cost}};
}

planner::RobotBody body(const json& j) {
  planner::RobotBody b;
  b.id = j.at("id").get<std::string>();
  b.footprint = geom::Footprint(polygon(j.at("footprint_m")));
  for (const auto& e : j.at("height_profile"))
    b.height_profile.push_back({geom::Footprint(polygon(e.at("footprint_m"))), e.at("height_m").get<double>()});
  b.limits = limits(j.at("limits"));
  for (const auto& m : j.at("mount_points")) {
    const auto& p = m.at("position_m");
    b.mount_points.push_back({m.at("name").get<std::string>(),
                              {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()}});
  }
  b.payload_max = j.at("payload_max_kg").get<double>();
  b.aux_power = j.at("aux_power_w").get<double>();
  b.driving_range = j.at("driving_range_m").get<double>();
  b.fixed_cost = j.at("fixed_cost_chf").get<double>();
  b.op_cost = j.at("op_cost_chf_per_m").get<double>();
  return b;
}

json coeffs(const percperf::Coeffs& c) { return json(std::vector<double>(c.begin(), c.end())); }
percperf::Coeffs coeffs(const json& j) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != percperf::kFeatures)
    throw std::invalid_argument("calibration needs " + std::to_string(percperf::kFeatures) + " coefficients");
  percperf::Coeffs c{};
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

json number_or_inf(double x) { return std::isinf(x) ? json("inf") : json(x); }
double number_or_inf(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json pipeline(const percperf::PerceptionPipeline& p) {
  return {{"id", p.id},
          {"kind", percperf::to_string(p.kind)},
          {"fov_h_rad", p.fov_h},
          {"fov_v_rad", p.fov_v},
          {"range_max_m", p.range_max},
          {"n_azimuth", p.n_azimuth},
          {"n_elevation", p.n_elevation},
          {"price_chf", p.price},
          {"mass_kg", p.mass},
          {"power_w", p.power},
          {"detector_gflops", p.detector_gflops},
          {"calib",
           {{"fnr", coeffs(p.calib.fnr)},
            {"fpr", coeffs(p.calib.fpr)},
            {"pseudo_count", number_or_inf(p.calib.pseudo_count)}}}};
}

percperf::PerceptionPipeline pipeline(const json& j) {
  percperf::PerceptionPipeline p;
  p.id = j.at("id").get<std::string>();
  p.kind = percperf::sensor_kind_from_string(j.at("kind").get<std::string>());
  p.fov_h = j.at("fov_h_rad").get<double>();
  p.fov_v = j.at("fov_v_rad").get<double>();
  p.range_max = j.at("range_max_m").get<double>();
  p.n_azimuth = j.at("n_azimuth").get<int>();
  p.n_elevation = j.at("n_elevation").get<int>();
  p.price = j.at("price_chf").get<double>();
  p.mass = j.at("mass_kg").get<double>();
  p.power = j.at("power_w").get<double>();
  p.detector_gflops = j.at("detector_gflops").get<double>();
  const auto& c = j.at("calib");
  p.calib.fnr = coeffs(c.at("fnr"));
  p.calib.fpr = coeffs(c.at("fpr"));
  p.calib.pseudo_count = number_or_inf(c.at("pseudo_count"));
  return p;
}

json planner_spec(const planner::PlannerSpec& p) {
  return {{"id", p.id},
          {"kind", planner::to_string(p.kind)},
          {"horizon_s", p.horizon},
          {"replan_period_s", p.replan_period},
          {"budget", p.budget},
          {"primitive_duration_s", p.primitive_duration},
          {"substeps", p.substeps},
          {"goal_bias", p.goal_bias},
          {"gflop_per_check", p.gflop_per_check},
          {"seed", p.seed}};
}

planner::PlannerSpec planner_spec(const json& j) {
  planner::PlannerSpec p;
  p.id = j.at("id").get<std::string>();
  p.kind = planner::planner_kind_from_string(j.at("kind").get<std::string>());
  p.horizon = j.at("horizon_s").get<double>();
  p.replan_period = j.at("replan_period_s").get<double>();
  p.budget = j.at("budget").get<int>();
  p.primitive_duration = j.value("primitive_duration_s", p.primitive_duration);
  p.substeps = j.value("substeps", p.substeps);
  p.goal_bias = j.value("goal_bias", p.goal_bias);
  p.gflop_per_check = j.value("gflop_per_check", p.gflop_per_check);
  p.seed = j.value("seed", p.seed);
  return p;
}

json appearance(const world::WeightedAppearance& w) {
  const auto& a = w.appearance;
  return {{"length_m", a.length},
          {"width_m", a.width},
          {"height_m", a.height},
          {"reflectivity", a.reflectivity},
          {"tone", a.tone == world::Tone::light ? "light" : "dark"},
          {"weight", w.weight}};
}

world::WeightedAppearance appearance(const json& j) {
  world::WeightedAppearance w;
  w.appearance.length = j.at("length_m").get<double>();
  w.appearance.width = j.at("width_m").get<double>();
  w.appearance.height = j.at("height_m").get<double>();
  w.appearance.reflectivity = j.value("reflectivity", 0.5);
  const auto tone = j.value("tone", std::string("light"));
  if (tone != "light" && tone != "dark") throw std::invalid_argument("unknown tone " + tone);
  w.appearance.tone = tone == "light" ? world::Tone::light : world::Tone::dark;
  w.weight = j.value("weight", 1.0);
  return w;
}

void check_schema(const json& j, const char* what) {
  const int v = j.value("schema_version", -1);
  if (v != kSchemaVersion)
    throw std::invalid_argument(std::string(what) + ": unsupported schema_version " + std::to_string(v));
}

}  // namespace

void Catalog::validate() const {
  check_unique(bodies, "body");
  check_unique(pipelines, "pipeline");
  check_unique(computers, "computer");
  check_unique(planners, "planner");
  if (yaws.empty() || pitches.empty()) throw std::invalid_argument("catalog needs yaw and pitch options");
  for (const auto& b : bodies) b.validate();
  for (const auto& p : pipelines) p.validate();
  for (const auto& p : planners) p.validate();
  for (const auto& c : computers)
    if (!(c.gflops >= 0 && c.price >= 0 && c.mass >= 0 && c.power >= 0))
      throw std::invalid_argument("computer " + c.id + ": negative attribute");
  grid.validate();
  if (!(epsilon >= 0 && epsilon <= 1)) throw std::invalid_argument("catalog epsilon must be in [0, 1]");
  if (n_weights < 1) throw std::invalid_argument("catalog n_weights must be positive");
  if (normalizers.size() != 4) throw std::invalid_argument("catalog needs 4 normalizers");
  for (double n : normalizers)
    if (!(n > 0)) throw std::invalid_argument("normalizers must be positive");
  if (!(speed_step_kmh > 0)) throw std::invalid_argument("speed_step_kmh must be positive");
}

const planner::RobotBody& Catalog::body(const std::string& id) const { return find(bodies, id, "body"); }
const percperf::PerceptionPipeline& Catalog::pipeline(const std::string& id) const {
  return find(pipelines, id, "pipeline");
}
const planner::PlannerSpec& Catalog::planner(const std::string& id) const {
  return find(planners, id, "planner");
}
const Computer& Catalog::computer(const std::string& id) const { return find(computers, id, "computer"); }

std::vector<percperf::MountedPipeline> mounted_candidates(const Catalog& c, const planner::RobotBody& b) {
  std::vector<percperf::MountedPipeline> out;
  for (const auto& p : c.pipelines)
    for (const auto& m : b.mount_points)
      for (double yaw : c.yaws)
        for (double pitch : c.pitches) out.push_back({p.id, b.id, m.name, yaw, pitch});
  return out;
}

json to_json(const geom::PolarGridSpec& g) {
  return {{"r_min_m", g.r_min},
          {"r_max_m", g.r_max},
          {"n_radial", g.n_radial},
          {"n_angular", g.n_angular},
          {"n_theta", g.n_theta}};
}

geom::PolarGridSpec grid_from_json(const json& j) {
  geom::PolarGridSpec g;
  g.r_min = j.at("r_min_m").get<double>();
  g.r_max = j.at("r_max_m").get<double>();
  g.n_radial = j.at("n_radial").get<int>();
  g.n_angular = j.at("n_angular").get<int>();
  g.n_theta = j.at("n_theta").get<int>();
  g.validate();
  return g;
}

json to_json(const Catalog& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  for (const auto& b : c.bodies) j["bodies"].push_back(body(b));
  for (const auto& p : c.pipelines) j["pipelines"].push_back(pipeline(p));
  for (const auto& x : c.computers)
    j["computers"].push_back({{"id", x.id},
                              {"gflops", x.gflops},
                              {"memory_gb", x.memory_gb},
                              {"price_chf", x.price},
                              {"mass_kg", x.mass},
                              {"power_w", x.power}});
  for (const auto& p : c.planners) j["planners"].push_back(planner_spec(p));
  j["yaw_options_rad"] = c.yaws;
  j["pitch_options_rad"] = c.pitches;
  j["grid"] = to_json(c.grid);
  j["epsilon"] = c.epsilon;
  j["n_weights"] = c.n_weights;
  j["normalizers"] = {{"price_chf", c.normalizers[0]},
                      {"mass_kg", c.normalizers[1]},
                      {"power_w", c.normalizers[2]},
                      {"compute_gflops", c.normalizers[3]}};
  j["speed_step_kmh"] = c.speed_step_kmh;
  return j;
}

Catalog catalog_from_json(const json& j) {
  check_schema(j, "catalog");
  Catalog c;
  for (const auto& b : j.at("bodies")) c.bodies.push_back(body(b));
  for (const auto& p : j.at("pipelines")) c.pipelines.push_back(pipeline(p));
  for (const auto& x : j.at("computers"))
    c.computers.push_back({x.at("id").get<std::string>(), x.at("gflops").get<double>(),
                           x.value("memory_gb", 0.0), x.at("price_chf").get<double>(),
                           x.at("mass_kg").get<double>(), x.at("power_w").get<double>()});
  for (const auto& p : j.at("planners")) c.planners.push_back(planner_spec(p));
  c.yaws = j.at("yaw_options_rad").get<std::vector<double>>();
  c.pitches = j.value("pitch_options_rad", std::vector<double>{0.0});
  c.grid = grid_from_json(j.at("grid"));
  c.epsilon = j.at("epsilon").get<double>();
  c.n_weights = j.value("n_weights", c.n_weights);
  if (j.contains("normalizers")) {
    const auto& n = j.at("normalizers");
    c.normalizers = {n.at("price_chf").get<double>(), n.at("mass_kg").get<double>(),
                     n.at("power_w").get<double>(), n.at("compute_gflops").get<double>()};
  }
  c.speed_step_kmh = j.value("speed_step_kmh", c.speed_step_kmh);
  c.validate();
  return c;
}

void TaskFile::validate() const {
  if (classes.empty() && !scenarios.empty()) throw std::invalid_argument("task has no classes");
  for (const auto& [id, c] : classes) c.validate();
  for (const auto& s : scenarios) {
    if (s.instances < 0) throw std::invalid_argument("scenario " + s.spec.name + ": negative instances");
    for (const auto& sp : s.spec.spawns)
      if (!classes.count(sp.class_id))
        throw std::invalid_argument("scenario " + s.spec.name + " spawns unknown class " + sp.class_id);
  }
}

world::Task TaskFile::sample() const {
  world::Task t;
  for (const auto& s : scenarios)
    for (int k = 0; k < s.instances; ++k)
      t.add(world::sample_instance(s.spec, classes, s.seed + static_cast<std::uint64_t>(k)));
  return t;
}

json to_json(const TaskFile& t) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["classes"] = json::array();
  for (const auto& [id, c] : t.classes) {
    json a = json::array();
    for (const auto& w : c.appearances) a.push_back(appearance(w));
    j["classes"].push_back({{"id", id},
                            {"limits", limits(c.limits)},
                            {"footprint_m", polygon(c.footprint.vertices())},
                            {"appearances", a}});
  }
  j["scenarios"] = json::array();
  for (const auto& b : t.scenarios) {
    const auto& s = b.spec;
    json sc;
    sc["name"] = s.name;
    sc["instances"] = b.instances;
    sc["seed"] = b.seed;
    sc["workspace_m"] = {{"x_min", s.workspace.x_min},
                         {"y_min", s.workspace.y_min},
                         {"x_max", s.workspace.x_max},
                         {"y_max", s.workspace.y_max}};
    sc["obstacles_m"] = json::array();
    for (const auto& o : s.obstacles) sc["obstacles_m"].push_back(polygon(o));
    sc["start"] = pose(s.start);
    sc["goal_m"] = polygon(s.goal);
    sc["envs"] = json::array();
    for (const auto& e : s.envs) sc["envs"].push_back({{"env", world::to_string(e.env)}, {"weight", e.weight}});
    sc["spawns"] = json::array();
    for (const auto& sp : s.spawns) sc["spawns"].push_back({{"class", sp.class_id}, {"lambda", sp.lambda}});
    sc["priors"] = json::object();
    for (const auto& [cls, prior] : s.priors) {
      json regions = json::array();
      for (const auto& r : prior.regions)
        regions.push_back({{"polygon_m", polygon(r.polygon)},
                           {"heading_lo_rad", r.heading_lo},
                           {"heading_hi_rad", r.heading_hi}});
      sc["priors"][cls] = regions;
    }
    sc["nominal_speed_mps"] = s.nominal_speed;
    sc["script_duration_s"] = s.script_duration;
    sc["time_limit_s"] = s.time_limit;
    j["scenarios"].push_back(sc);
  }
  const auto& r = t.requirements;
  j["requirements"] = {{"n_traj", r.pcp.n_traj},
                       {"seed", r.pcp.seed},
                       {"control_dt_s", r.pcp.control_dt},
                       {"integration_dt_s", r.pcp.integration_dt},
                       {"n_traj_per_class", r.n_traj}};
  return j;
}

TaskFile task_from_json(const json& j) {
  check_schema(j, "task");
  TaskFile t;
  for (const auto& c : j.at("classes")) {
    world::ObjectClass oc;
    oc.id = c.at("id").get<std::string>();
    oc.limits = limits(c.at("limits"));
    oc.footprint = geom::Footprint(polygon(c.at("footprint_m")));
    for (const auto& a : c.at("appearances")) oc.appearances.push_back(appearance(a));
    const auto id = oc.id;
    if (!t.classes.emplace(id, std::move(oc)).second) throw std::invalid_argument("duplicate class " + id);
  }
  for (const auto& sc : j.at("scenarios")) {
    ScenarioBatch b;
    auto& s = b.spec;
    s.name = sc.at("name").get<std::string>();
    b.instances = sc.value("instances", 1);
    b.seed = sc.value("seed", std::uint64_t{0});
    const auto& w = sc.at("workspace_m");
    s.workspace = {w.at("x_min").get<double>(), w.at("y_min").get<double>(), w.at("x_max").get<double>(),
                   w.at("y_max").get<double>()};
    for (const auto& o : sc.value("obstacles_m", json::array())) s.obstacles.push_back(polygon(o));
    s.start = pose(sc.at("start"));
    s.goal = polygon(sc.at("goal_m"));
    for (const auto& e : sc.at("envs"))
      s.envs.push_back({world::env_from_string(e.at("env").get<std::string>()), e.value("weight", 1.0)});
    for (const auto& sp : sc.value("spawns", json::array()))
      s.spawns.push_back({sp.at("class").get<std::string>(), sp.at("lambda").get<double>()});
    const json priors = sc.value("priors", json::object());
    for (const auto& [cls, regions] : priors.items()) {
      auto& prior = s.priors[cls];
      for (const auto& r : regions)
        prior.regions.push_back({polygon(r.at("polygon_m")), r.value("heading_lo_rad", -geom::kPi),
                                 r.value("heading_hi_rad", geom::kPi)});
    }
    s.nominal_speed = sc.at("nominal_speed_mps").get<double>();
    s.script_duration = sc.value("script_duration_s", s.script_duration);
    s.time_limit = sc.value("time_limit_s", s.time_limit);
    t.scenarios.push_back(std::move(b));
  }
  if (j.contains("requirements")) {
    const auto& r = j.at("requirements");
    t.requirements.pcp.n_traj = r.value("n_traj", t.requirements.pcp.n_traj);
    t.requirements.pcp.seed = r.value("seed", t.requirements.pcp.seed);
    t.requirements.pcp.control_dt = r.value("control_dt_s", t.requirements.pcp.control_dt);
    t.requirements.pcp.integration_dt = r.value("integration_dt_s", t.requirements.pcp.integration_dt);
    t.requirements.n_traj = r.value("n_traj_per_class", std::map<std::string, int>{});
  }
  t.validate();
  return t;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::invalid_argument("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(p.string() + ": " + e.what());
  }
}

namespace {
template <class F>
auto with_context(const std::filesystem::path& p, F f) {
  try {
    return f(read_json(p));
  } catch (const json::exception& e) {
    throw std::invalid_argument(p.string() + ": " + e.what());
  }
}
}  // namespace

Catalog load_catalog(const std::filesystem::path& p) {
  return with_context(p, [](const json& j) { return catalog_from_json(j); });
}
TaskFile load_task(const std::filesystem::path& p) {
  return with_context(p, [](const json& j) { return task_from_json(j); });
}
geom::PolarGridSpec load_grid(const std::filesystem::path& p) {
  return with_context(p, [](const json& j) { return grid_from_json(j.contains("grid") ? j.at("grid") : j); });
}

}  // namespace codei::catalog

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codei/geom.hpp"
#include "codei/world.hpp"

namespace codei::planner {

using geom::Footprint;
using geom::Pose2;
using geom::Vec2;
using geom::Vec3;
using world::EnvCondition;

struct Extrusion {
  Footprint footprint;
  double height = 0.0;
};

struct MountPoint {
  std::string name;
  Vec3 position;
};

struct RobotBody {
  std::string id;
  Footprint footprint;
  std::vector<Extrusion> height_profile;
  world::DynamicsLimits limits;
  std::vector<MountPoint> mount_points;
  double payload_max = 0.0;
  double aux_power = 0.0;
  double driving_range = 0.0;
  double fixed_cost = 0.0;
  double op_cost = 0.0;  // CHF per meter

  void validate() const;
  const MountPoint& mount(const std::string& name) const;
};

enum class PlannerKind { lattice_astar, rrt, rrt_star };

std::string to_string(PlannerKind k);
PlannerKind planner_kind_from_string(const std::string& s);

struct PlannerSpec {
  std::string id;
  PlannerKind kind = PlannerKind::lattice_astar;
  double horizon = 1.0;
  double replan_period = 0.5;
  int budget = 40;  // A* expansions or tree iterations per replan
  double primitive_duration = 0.5;
  int substeps = 2;
  double goal_bias = 0.05;
  double gflop_per_check = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct OccupancyQuery {
  Pose2 pose;  // ego frame
  double tau = 0.0;
  EnvCondition env;
  Pose2 ego_world_pose;
};

inline constexpr double kQuantPos = 0.1;
inline constexpr double kQuantHeadingDeg = 2.0;
inline constexpr double kQuantTau = 0.1;

// Quantized query. The ego anchor is part of the key so that the world-frame
// position of a query survives deduplication.
struct QueryKey {
  std::int32_t x = 0, y = 0, theta = 0, tau = 0;
  std::uint8_t env = 0;
  std::int32_t ex = 0, ey = 0, etheta = 0;

  auto operator<=>(const QueryKey&) const = default;
};

QueryKey quantize(const OccupancyQuery& q);
OccupancyQuery dequantize(const QueryKey& k);
std::uint64_t key_hash(const QueryKey& k);

struct QueryLog {
  std::string instance_id;
  std::vector<QueryKey> keys;          // sorted, unique
  std::vector<std::uint32_t> checks;   // per key: times the key was asked
  std::vector<std::uint32_t> checks_per_replan;
};

// Append-only recorder used during a run.
class QueryRecorder {
 public:
  explicit QueryRecorder(std::string instance_id) : instance_id_(std::move(instance_id)) {}
  void record(const OccupancyQuery& q);
  void end_replan();
  QueryLog finish() const;

 private:
  std::string instance_id_;
  std::vector<QueryKey> raw_;
  std::vector<std::uint32_t> per_replan_;
  std::uint32_t current_ = 0;
};

// true when the footprint would be in collision; t_now is the simulation time
// at which the query was issued.
using OccupancyOracle = std::function<bool(const OccupancyQuery& q, double t_now)>;

OccupancyOracle ground_truth_oracle(const RobotBody& body, const world::ScenarioInstance& inst);

enum class Outcome { reached, timeout, stuck };
std::string to_string(Outcome o);

struct TrajectorySample {
  double t = 0.0;
  Pose2 pose;
  double speed = 0.0;
};

struct PlanResult {
  std::string instance_id;
  std::vector<TrajectorySample> trajectory;
  QueryLog log;
  Outcome outcome = Outcome::stuck;
};

PlanResult plan(const PlannerSpec& spec, const RobotBody& body,
                const world::ScenarioInstance& instance, const OccupancyOracle& oracle);

// A single search from `state` at simulation time t_now; returns its queries.
QueryLog replan_once(const PlannerSpec& spec, const RobotBody& body,
                     const world::ScenarioInstance& instance, const OccupancyOracle& oracle,
                     const world::MotionState& state, double t_now);

// Per-instance, deduplicated. Key: instance id.
using QuerySet = std::map<std::string, std::vector<QueryKey>>;

QuerySet query_set(const std::vector<QueryLog>& logs);
std::vector<PlanResult> run_task(const PlannerSpec& spec, const RobotBody& body,
                                 const world::Task& task);
QuerySet task_queries(const PlannerSpec& spec, const RobotBody& body, const world::Task& task);
bool query_subset(const QuerySet& a, const QuerySet& b);
std::size_t query_count(const QuerySet& q);

double trajectory_length(const std::vector<TrajectorySample>& traj);
double trajectory_duration(const std::vector<TrajectorySample>& traj);
// Pooled length / pooled time in m/s; nullopt when any outcome is not reached.
std::optional<double> average_speed(const std::vector<PlanResult>& results);
// Worst-case checks per replan times the per-check cost, per replan period.
double planner_compute_gflops(const PlannerSpec& spec, const std::vector<PlanResult>& results);

}  // namespace codei::planner

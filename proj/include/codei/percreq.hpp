#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "codei/geom.hpp"
#include "codei/planner.hpp"
#include "codei/world.hpp"

namespace codei::percreq {

using geom::Cell;
using geom::CellSet;
using geom::Footprint;
using geom::PolarGridSpec;
using geom::Pose2;
using planner::QueryKey;
using world::EnvCondition;

// The parts of an object class that collision prediction depends on.
struct ClassShape {
  std::string class_id;
  world::DynamicsLimits limits;
  Footprint footprint;
  int appearance = 0;
};

ClassShape class_shape(const world::ObjectClass& c);

// Unbounded curvature (turn radius 0) is sampled from this range instead.
inline constexpr double kCurvatureCap = 2.0;

// Representative class poses (ego frame) whose footprint touches the robot at ego_pose.
std::vector<Pose2> collision(const Pose2& ego_pose, const Footprint& class_fp,
                             const Footprint& robot_fp, const PolarGridSpec& grid);

struct TimedPose {
  double t = 0.0;
  Pose2 pose;
};

struct CollidingTrajectory {
  std::string class_id;
  int appearance = 0;
  std::vector<TimedPose> samples;  // ego frame of the issuing query, t from 0 to tau
  double tau = 0.0;
  EnvCondition env;
  Pose2 ego_world_pose;
};

struct PcpOptions {
  int n_traj = 32;
  std::uint64_t seed = 0;
  double control_dt = 0.2;
  double integration_dt = 0.05;
};

std::vector<CollidingTrajectory> pcp(const std::vector<QueryKey>& queries, const ClassShape& cls,
                                     const Footprint& robot_fp, const PolarGridSpec& grid,
                                     const PcpOptions& opt);

// Start poses (ego frame) of the trajectories that stay inside the prior and do
// not begin in strict overlap with the robot.
std::vector<Pose2> prior_check(const std::vector<CollidingTrajectory>& trajs,
                               const world::Prior& prior, const Footprint& class_fp,
                               const Footprint& robot_fp);

struct ReqKey {
  std::string class_id;
  EnvCondition env;

  auto operator<=>(const ReqKey&) const = default;
};

// Cells carry the theta interval as their third index, so one CellSet per
// (class, env) holds every theta-interval entry.
class RequirementSet {
 public:
  RequirementSet() = default;
  explicit RequirementSet(const PolarGridSpec& grid) : grid_(grid) {}

  const PolarGridSpec& grid() const { return grid_; }
  const std::map<ReqKey, CellSet>& entries() const { return entries_; }
  CellSet get(const ReqKey& k) const;
  // Cells of one theta interval.
  CellSet get(const ReqKey& k, int theta_idx) const;

  void insert(const ReqKey& k, const Cell& c);
  void insert(const ReqKey& k, const CellSet& cells);
  void merge(const RequirementSet& other);
  std::size_t atom_count() const;
  bool empty() const { return atom_count() == 0; }

  bool operator==(const RequirementSet& o) const;

 private:
  PolarGridSpec grid_;
  std::map<ReqKey, CellSet> entries_;
};

bool requirement_subset(const RequirementSet& a, const RequirementSet& b);

struct RequirementOptions {
  PcpOptions pcp;
  std::map<std::string, int> n_traj;  // per class, overrides pcp.n_traj
  // Robot shape used by collision and the start-overlap filter; defaults to the body footprint.
  std::optional<Footprint> robot_shape;
  // Per-class footprint override.
  std::map<std::string, Footprint> class_footprint;
};

struct InfeasibleTask : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Queries of each instance are matched against that instance's priors. Classes
// without a prior in an instance contribute nothing for it.
RequirementSet requirements_from_queries(const planner::QuerySet& queries, const world::Task& task,
                                         const world::ClassMap& classes, const Footprint& robot_fp,
                                         const PolarGridSpec& grid, const RequirementOptions& opt);
RequirementSet requirements_from_queries_serial(const planner::QuerySet& queries,
                                                const world::Task& task,
                                                const world::ClassMap& classes,
                                                const Footprint& robot_fp,
                                                const PolarGridSpec& grid,
                                                const RequirementOptions& opt);
// Straight composition of pcp and prior_check per query; slow, used to check the above.
RequirementSet requirements_reference(const planner::QuerySet& queries, const world::Task& task,
                                      const world::ClassMap& classes, const Footprint& robot_fp,
                                      const PolarGridSpec& grid, const RequirementOptions& opt);

// Plans every instance, then derives requirements. Throws InfeasibleTask when an
// instance is not reached.
RequirementSet perception_requirements(const planner::PlannerSpec& spec,
                                       const planner::RobotBody& body, const world::Task& task,
                                       const world::ClassMap& classes, const PolarGridSpec& grid,
                                       const RequirementOptions& opt);

}  // namespace codei::percreq

#pragma once

#include <array>
#include <string>
#include <vector>

#include "codei/geom.hpp"
#include "codei/planner.hpp"
#include "codei/world.hpp"

namespace codei::percperf {

using geom::CellSet;
using geom::PolarGridSpec;
using geom::Pose2;
using geom::Vec3;
using planner::RobotBody;
using world::Appearance;
using world::EnvCondition;

enum class SensorKind { lidar, camera };
std::string to_string(SensorKind k);
SensorKind sensor_kind_from_string(const std::string& s);

// Feature order: bias, range m, |bearing| rad, visible fraction, log1p(hits),
// night, rain, size m (cube root of the box volume).
inline constexpr int kFeatures = 8;
using Coeffs = std::array<double, kFeatures>;

struct PerfCalib {
  Coeffs fnr{};
  Coeffs fpr{};
  double pseudo_count = 100.0;  // +inf gives zero-width intervals

  void validate() const;
};

struct PerceptionPipeline {
  std::string id;
  SensorKind kind = SensorKind::lidar;
  double fov_h = 2 * geom::kPi;
  double fov_v = 0.5;
  double range_max = 60.0;
  int n_azimuth = 360;   // rays or pixel columns
  int n_elevation = 16;  // channels or pixel rows
  double price = 0.0;
  double mass = 0.0;
  double power = 0.0;
  double detector_gflops = 0.0;
  PerfCalib calib;

  void validate() const;
};

struct MountedPipeline {
  std::string pipeline_id;
  std::string body_id;
  std::string mount;
  double yaw = 0.0;
  double pitch = 0.0;  // positive tilts the boresight down

  std::string id() const;
};

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit, body frame
  double azimuth = 0.0;    // sensor frame
  double elevation = 0.0;  // sensor frame
};

// Rays of the sensor's angular grid expressed in the body frame.
std::vector<Ray> sensor_rays(const PerceptionPipeline& pp, const RobotBody& body,
                             const MountedPipeline& m);

// Sensor pose projected to the ground plane, in the body frame.
Pose2 sensor_pose2(const RobotBody& body, const MountedPipeline& m);

struct TargetBox {
  Pose2 pose;  // body frame, box centered on the pose
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
};

TargetBox target_box(const Pose2& q, const Appearance& a);

struct VisibilityReport {
  int hit_count = 0;
  int unoccluded_count = 0;  // rays that would hit without the body
  double visible_fraction = 0.0;
  bool in_fov = false;
};

VisibilityReport cast_rays(const PerceptionPipeline& pp, const RobotBody& body,
                           const MountedPipeline& m, const TargetBox& target);
// Tests every ray; same result, used as a reference.
VisibilityReport cast_rays_all(const PerceptionPipeline& pp, const RobotBody& body,
                               const MountedPipeline& m, const TargetBox& target);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct PerfIntervals {
  Interval fnr;
  Interval fpr;
};

double logistic(double x);
Coeffs features(const Pose2& q_sensor, const Appearance& a, EnvCondition env,
                const VisibilityReport& vis);
double linear_predictor(const Coeffs& c, const Coeffs& f);
// 95% Wilson score interval around p with n pseudo-observations.
Interval wilson(double p, double n);
inline constexpr double kWilsonZ = 1.959963984540054;

// q_sensor is the target pose in the sensor frame.
PerfIntervals ppp(const Pose2& q_sensor, const Appearance& a, const PerceptionPipeline& pp,
                  EnvCondition env, const VisibilityReport& vis);

// Worst fnr/fpr upper bound per cell over the cell's representatives.
struct CoverageTable {
  PolarGridSpec grid;
  std::vector<double> worst;  // indexed by geom::cell_index

  CellSet covered(double epsilon) const;
};

// Cell centers and corners at every theta-interval edge, each pose once.
std::vector<Pose2> representative_poses(const PolarGridSpec& grid);
// Indices into representative_poses: center and 4 corners at both theta edges.
std::array<std::size_t, 10> cell_representatives(const PolarGridSpec& grid, const geom::Cell& c);

// Ray-cast results at every representative pose of the grid: cell centers and
// corners, at every theta-interval edge. Environment independent.
struct VisibilityTable {
  PolarGridSpec grid;
  std::vector<Pose2> q_sensor;
  std::vector<VisibilityReport> vis;
};

VisibilityTable visibility_table(const Appearance& a, const PerceptionPipeline& pp,
                                 const RobotBody& body, const MountedPipeline& m,
                                 const PolarGridSpec& grid);
VisibilityTable visibility_table_serial(const Appearance& a, const PerceptionPipeline& pp,
                                        const RobotBody& body, const MountedPipeline& m,
                                        const PolarGridSpec& grid);

CoverageTable coverage_table(const VisibilityTable& vt, const Appearance& a,
                             const PerceptionPipeline& pp, EnvCondition env);

// Cells where every representative has both upper bounds strictly below epsilon.
CellSet mppcc(const Appearance& a, const PerceptionPipeline& pp, const RobotBody& body,
              const MountedPipeline& m, EnvCondition env, double epsilon,
              const PolarGridSpec& grid);

// Coverage of a class: a cell counts only when every appearance of the class is covered.
CellSet class_coverage(const world::ObjectClass& cls, const PerceptionPipeline& pp,
                       const RobotBody& body, const MountedPipeline& m, EnvCondition env,
                       double epsilon, const PolarGridSpec& grid);

}  // namespace codei::percperf

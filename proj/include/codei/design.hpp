#pragma once

#include <functional>
#include <string>
#include <vector>

#include "codei/catalog.hpp"
#include "codei/percperf.hpp"
#include "codei/percreq.hpp"
#include "codei/planner.hpp"
#include "codei/select.hpp"

// Orchestration shared by the CLI commands and the co-design diagram.
namespace codei::design {

// Rounds to a 1e-6 grid so that sums formed along different paths compare exactly.
double snap(double x);
// Floors a speed in m/s onto the km/h grid; +inf stays +inf.
double speed_kmh(double mps, double step_kmh);

struct PlannerRun {
  std::vector<planner::PlanResult> results;
  planner::QuerySet queries;
  bool reached = false;
  double speed_kmh = 0.0;
  double distance_m = 0.0;
  double compute_gflops = 0.0;
};

PlannerRun run_planner(const planner::PlannerSpec& spec, const planner::RobotBody& body,
                       const world::Task& task, double speed_step_kmh);

// Coverage of one mounted pipeline for the given (class, env) keys.
select::CoverageSet coverage_set(const percperf::PerceptionPipeline& pp, const planner::RobotBody& body,
                                 const percperf::MountedPipeline& m, const world::ClassMap& classes,
                                 const std::vector<percreq::ReqKey>& keys, double epsilon,
                                 const geom::PolarGridSpec& grid);

struct SelectionProblem {
  std::vector<percperf::MountedPipeline> mounted;  // candidate l of the instance
  select::CoverInstance instance;
};

// Candidates are every catalog pipeline on every mount and yaw/pitch option of the body.
// Raw resources: price CHF, mass kg, power W, detector GFLOPS.
// Optional source of coverage sets, e.g. a cache in front of coverage_set.
using CoverageFn = std::function<select::CoverageSet(const percperf::MountedPipeline&,
                                                     const std::vector<percreq::ReqKey>&)>;
SelectionProblem selection_problem(const catalog::Catalog& cat, const planner::RobotBody& body,
                                   const world::ClassMap& classes, const percreq::RequirementSet& req,
                                   double epsilon, const CoverageFn& coverage = {});

}  // namespace codei::design

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "codei/geom.hpp"
#include "codei/percperf.hpp"
#include "codei/percreq.hpp"
#include "codei/planner.hpp"
#include "codei/world.hpp"

namespace codei::catalog {

inline constexpr int kSchemaVersion = 1;

struct Computer {
  std::string id;
  double gflops = 0.0;
  double memory_gb = 0.0;
  double price = 0.0;
  double mass = 0.0;
  double power = 0.0;
};

struct Catalog {
  std::vector<planner::RobotBody> bodies;
  std::vector<percperf::PerceptionPipeline> pipelines;
  std::vector<Computer> computers;
  std::vector<planner::PlannerSpec> planners;
  std::vector<double> yaws;
  std::vector<double> pitches{0.0};
  geom::PolarGridSpec grid;
  double epsilon = 0.1;
  int n_weights = 32;
  // Divides price, mass, power and compute before the weighted sum in select.
  std::vector<double> normalizers{1000.0, 1.0, 10.0, 1.0};
  double speed_step_kmh = 1.0;

  void validate() const;
  const planner::RobotBody& body(const std::string& id) const;
  const percperf::PerceptionPipeline& pipeline(const std::string& id) const;
  const planner::PlannerSpec& planner(const std::string& id) const;
  const Computer& computer(const std::string& id) const;
};

// Every pipeline on every mount point at every yaw and pitch option.
std::vector<percperf::MountedPipeline> mounted_candidates(const Catalog& c, const planner::RobotBody& b);

struct ScenarioBatch {
  world::ScenarioSpec spec;
  int instances = 1;
  std::uint64_t seed = 0;  // instance k uses seed + k
};

struct TaskFile {
  world::ClassMap classes;
  std::vector<ScenarioBatch> scenarios;
  percreq::RequirementOptions requirements;

  void validate() const;
  world::Task sample() const;
};

nlohmann::json to_json(const Catalog& c);
Catalog catalog_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaskFile& t);
TaskFile task_from_json(const nlohmann::json& j);
nlohmann::json to_json(const geom::PolarGridSpec& g);
geom::PolarGridSpec grid_from_json(const nlohmann::json& j);

Catalog load_catalog(const std::filesystem::path& p);
TaskFile load_task(const std::filesystem::path& p);
geom::PolarGridSpec load_grid(const std::filesystem::path& p);
nlohmann::json read_json(const std::filesystem::path& p);

}  // namespace codei::catalog

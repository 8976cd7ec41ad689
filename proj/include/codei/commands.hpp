#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace codei::commands {

struct Options {
  std::filesystem::path catalog, task;
  std::optional<std::filesystem::path> grid;  // replaces the catalog grid
  std::optional<std::uint64_t> seed;          // replaces every scenario batch seed
  std::optional<double> epsilon;
  std::optional<int> weights;
  std::filesystem::path out = "codei-store";
  bool oracle = false;
  std::string format = "both";  // csv, svg or both
};

struct CommandResult {
  int exit_code = 0;  // 0 ok, 1 error, 2 infeasible or not all goals reached
  std::vector<std::filesystem::path> artifacts;
  bool cache_hit = false;
  std::string message;
};

// Plans every task instance; one query-log artifact.
CommandResult cmd_simulate(const Options& o, const std::string& planner_id, const std::string& body_id);
// Requirements from query-log artifacts, unioned with the latest requirement set for the same
// (catalog, task, body).
CommandResult cmd_requirements(const Options& o, const std::vector<std::filesystem::path>& logs);
// Pareto sweep of sensor selections for a requirement artifact.
CommandResult cmd_select(const Options& o, const std::filesystem::path& requirements);
// FixFunMinRes on the co-design diagram for a speed (km/h) and range (m) demand.
CommandResult cmd_codesign(const Options& o, double speed_kmh, double range_m);

}  // namespace codei::commands

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "codei/commands.hpp"

using namespace codei::commands;

namespace {

void common(CLI::App* app, Options& o, std::string& grid, std::uint64_t& seed) {
  app->add_option("--catalog", o.catalog, "catalog JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--task", o.task, "task JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--grid", grid, "polar grid JSON, replaces the catalog grid")->check(CLI::ExistingFile);
  app->add_option("--seed", seed, "base seed for the scenario batches");
  app->add_option("--out", o.out, "store directory (CODEI_STORE overrides)");
}

int report(const CommandResult& r) {
  for (const auto& a : r.artifacts) std::cout << a.string() << "\n";
  if (r.cache_hit) std::cerr << "cache hit\n";
  if (!r.message.empty()) std::cerr << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-design of robot perception, planning and hardware"};
  app.require_subcommand(1);
  Options o;
  std::string grid;
  std::uint64_t seed = 0;
  std::string planner, body;
  std::vector<std::filesystem::path> logs;
  std::filesystem::path req;
  double speed = 0.0, range = 0.0;
  double epsilon = 0.0;
  int weights = 0;

  auto* sim = app.add_subcommand("simulate", "plan every task instance and log occupancy queries");
  common(sim, o, grid, seed);
  sim->add_option("--planner", planner)->required();
  sim->add_option("--body", body)->required();

  auto* rq = app.add_subcommand("requirements", "perception requirements from query logs");
  common(rq, o, grid, seed);
  rq->add_option("--logs", logs, "query-log artifacts")->required()->check(CLI::ExistingFile);

  auto* sel = app.add_subcommand("select", "Pareto front of sensor selections");
  common(sel, o, grid, seed);
  sel->add_option("--requirements", req, "requirement artifact")->required()->check(CLI::ExistingFile);

  auto* cd = app.add_subcommand("codesign", "minimal resources for a speed and range demand");
  common(cd, o, grid, seed);
  cd->add_option("--speed", speed, "average speed demand, km/h")->required();
  cd->add_option("--range", range, "driving range demand, m");

  for (auto* s : {sel, cd}) {
    s->add_option("--epsilon", epsilon, "FNR/FPR threshold");
    s->add_option("--weights", weights, "number of Halton weight vectors")->check(CLI::PositiveNumber);
    s->add_flag("--oracle", o.oracle, "cross-check by enumeration (small instances)");
    s->add_option("--format", o.format, "report format")->check(CLI::IsMember({"csv", "svg", "both"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (!grid.empty()) o.grid = grid;
  for (auto* s : {sim, rq, sel, cd})
    if (s->count("--seed")) o.seed = seed;
  for (auto* s : {sel, cd}) {
    if (s->count("--epsilon")) o.epsilon = epsilon;
    if (s->count("--weights")) o.weights = weights;
  }
  if (const char* env = std::getenv("CODEI_STORE"); env && *env) o.out = env;

  if (*sim) return report(cmd_simulate(o, planner, body));
  if (*rq) return report(cmd_requirements(o, logs));
  if (*sel) return report(cmd_select(o, req));
  return report(cmd_codesign(o, speed, range));
}

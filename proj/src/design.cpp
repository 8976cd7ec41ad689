#include "codei/design.hpp"

#include <cmath>

namespace codei::design {

double snap(double x) {
  if (!std::isfinite(x)) return x;
  double y = std::round(x * 1e6) / 1e6;
  return y == 0.0 ? 0.0 : y;
}

double speed_kmh(double mps, double step_kmh) {
  if (std::isinf(mps)) return mps;
  return snap(std::floor(mps * 3.6 / step_kmh + 1e-9) * step_kmh);
}

PlannerRun run_planner(const planner::PlannerSpec& spec, const planner::RobotBody& body,
                       const world::Task& task, double speed_step_kmh) {
  PlannerRun r;
  r.results = planner::run_task(spec, body, task);
  std::vector<planner::QueryLog> logs;
  double len = 0.0;
  for (const auto& x : r.results) {
    logs.push_back(x.log);
    len += planner::trajectory_length(x.trajectory);
  }
  r.queries = planner::query_set(logs);
  auto v = planner::average_speed(r.results);
  r.reached = v.has_value();
  r.speed_kmh = v ? speed_kmh(*v, speed_step_kmh) : 0.0;
  r.distance_m = snap(len);
  r.compute_gflops = snap(planner::planner_compute_gflops(spec, r.results));
  return r;
}

select::CoverageSet coverage_set(const percperf::PerceptionPipeline& pp, const planner::RobotBody& body,
                                 const percperf::MountedPipeline& m, const world::ClassMap& classes,
                                 const std::vector<percreq::ReqKey>& keys, double epsilon,
                                 const geom::PolarGridSpec& grid) {
  select::CoverageSet out;
  out.mpp_id = m.id();
  out.epsilon = epsilon;
  // Visibility does not depend on the environment, so one table per appearance.
  std::map<std::string, std::vector<percperf::VisibilityTable>> tables;
  for (const auto& k : keys) {
    const auto& cls = classes.at(k.class_id);
    auto& vts = tables[k.class_id];
    if (vts.empty())
      for (const auto& w : cls.appearances)
        vts.push_back(percperf::visibility_table(w.appearance, pp, body, m, grid));
    geom::CellSet cells(grid);
    for (std::size_t i = 0; i < cls.appearances.size(); ++i) {
      auto c = percperf::coverage_table(vts[i], cls.appearances[i].appearance, pp, k.env).covered(epsilon);
      cells = i == 0 ? c : cells.intersect(c);
    }
    out.entries[k] = std::move(cells);
  }
  return out;
}

SelectionProblem selection_problem(const catalog::Catalog& cat, const planner::RobotBody& body,
                                   const world::ClassMap& classes, const percreq::RequirementSet& req,
                                   double epsilon, const CoverageFn& coverage) {
  SelectionProblem sp;
  sp.mounted = catalog::mounted_candidates(cat, body);
  std::vector<percreq::ReqKey> keys;
  for (const auto& [k, cells] : req.entries())
    if (!cells.empty()) keys.push_back(k);
  std::vector<select::CoverageSet> cov;
  std::vector<select::Candidate> cands;
  for (const auto& m : sp.mounted) {
    const auto& pp = cat.pipeline(m.pipeline_id);
    cov.push_back(coverage ? coverage(m, keys) : coverage_set(pp, body, m, classes, keys, epsilon, req.grid()));
    cands.push_back({m.id(), m.mount, {}, {pp.price, pp.mass, pp.power, pp.detector_gflops}});
  }
  sp.instance = select::build_instance(req, cov, std::move(cands), cat.normalizers);
  return sp;
}

}  // namespace codei::design

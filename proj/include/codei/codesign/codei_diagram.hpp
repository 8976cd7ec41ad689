#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "codei/catalog.hpp"
#include "codei/codesign/diagram.hpp"
#include "codei/design.hpp"

namespace codei::codesign {

// Exposed resources of the CODEI diagram, in order.
inline const std::vector<std::string> kCodeiResources{"price_chf",      "mass_kg",        "power_w",
                                                      "compute_gflops", "fixed_cost_chf", "op_cost_chf"};

struct CodeiProblem {
  catalog::Catalog catalog;
  world::Task task;
  world::ClassMap classes;
  percreq::RequirementOptions requirements;
  geom::PolarGridSpec grid;
  double epsilon = 0.1;
  int n_weights = 32;
};

// Memoized artifacts behind the on-demand blocks.
class CodeiModel {
 public:
  explicit CodeiModel(CodeiProblem p);

  const CodeiProblem& problem() const { return p_; }
  const design::PlannerRun& run(const std::string& planner, const std::string& body);
  // Requirements from the queries of (planner, body) checked against the footprint of `shape`.
  const percreq::RequirementSet& requirements(const std::string& planner, const std::string& body,
                                              const std::string& shape);
  // Selection of pipelines on `shape` for those requirements.
  const design::SelectionProblem& selection(const std::string& planner, const std::string& body,
                                            const std::string& shape);
  const select::ParetoFront& front(const std::string& planner, const std::string& body,
                                   const std::string& shape);
  // Mounted-pipeline ids of every front selection, each sorted.
  std::vector<std::vector<std::string>> front_designs(const std::string& planner, const std::string& body,
                                                      const std::string& shape);
  const percperf::PerceptionPipeline& pipeline_of(const std::string& mpp_id) const;
  // Speeds reached by some run plus 0, and body ranges plus 0: enough for budget queries.
  std::vector<Elem> functionality_grid();

 private:
  const select::CoverageSet& coverage(const percperf::MountedPipeline& m, const percreq::ReqKey& k);

  CodeiProblem p_;
  std::map<std::string, design::PlannerRun> runs_;
  std::map<std::string, percreq::RequirementSet> reqs_;
  std::map<std::string, design::SelectionProblem> problems_;
  std::map<std::string, select::ParetoFront> fronts_;
  std::map<std::string, select::CoverageSet> coverage_;
  std::map<std::string, std::string> mpp_pipeline_;
};

struct CodeiDiagram {
  Diagram diagram;
  std::shared_ptr<CodeiModel> model;
};

// Planner, perceptual collision prediction, prior check, coverage, mounted pipelines,
// perception pipelines, computing and robot body, plus shape split and sum blocks.
// The robot body's shape feeds back to collision prediction and the mounted pipelines.
CodeiDiagram build_codei_diagram(CodeiProblem p);

Elem codei_demand(double speed_kmh, double range_m);

struct DesignSolution {
  std::vector<double> resources;  // kCodeiResources order
  std::vector<Impl> impls;
};
std::vector<DesignSolution> design_solutions(const Antichain& a);

}  // namespace codei::codesign

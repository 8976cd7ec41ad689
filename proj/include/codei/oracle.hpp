#pragma once

// Brute-force reference computations. Slow and independent of the main kernels.

#include <optional>

#include "codei/codesign/codei_diagram.hpp"
#include "codei/geom.hpp"
#include "codei/percperf.hpp"
#include "codei/select.hpp"

namespace codei::oracle {

// Ray/triangle intersection on triangulated prisms and target box; no windowing.
percperf::VisibilityReport brute_force_visibility(const percperf::PerceptionPipeline& pp,
                                                  const planner::RobotBody& body,
                                                  const percperf::MountedPipeline& m,
                                                  const percperf::TargetBox& target);

// Cells whose 10 representative poses all get at least one target hit.
geom::CellSet brute_force_seen_cells(const world::Appearance& a,
                                     const percperf::PerceptionPipeline& pp,
                                     const planner::RobotBody& body,
                                     const percperf::MountedPipeline& m,
                                     const geom::PolarGridSpec& grid);

// Exhaustive 2^L search with the same tie rule as select::solve_cover.
select::CoverResult brute_force_cover(const select::CoverInstance& inst,
                                      const std::vector<double>& weights);

// Minimal raw-resource vectors over every feasible subset.
std::vector<std::vector<double>> brute_force_front(const select::CoverInstance& inst);

// Every subset holding at most one candidate per mount group, indices ascending.
// Throws when there would be more than `limit` of them.
std::vector<std::vector<std::size_t>> exclusive_subsets(const select::CoverInstance& inst,
                                                        std::size_t limit = 5'000'000);
// brute_force_front and the weighted optimum over exclusive_subsets; no 2^L cap.
std::vector<std::vector<double>> grouped_front(const select::CoverInstance& inst);
std::optional<double> grouped_optimum(const select::CoverInstance& inst, const std::vector<double>& weights);

struct CodeiDesign {
  std::string body, planner, computer;
  std::vector<std::string> mpps;
  std::vector<double> resources;  // codesign::kCodeiResources order
};

struct CodeiEnumeration {
  std::size_t tuples = 0;
  std::vector<CodeiDesign> feasible;
  std::vector<std::vector<double>> front;  // minimal resource vectors, sorted
};

// Every (body, planner, front selection, computer) tuple checked against the demand directly.
CodeiEnumeration enumerate_codei(codesign::CodeiModel& model, double speed_kmh, double range_m);

}  // namespace codei::oracle

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "codei/codesign/codei_diagram.hpp"
#include "codei/design.hpp"
#include "codei/percreq.hpp"
#include "codei/planner.hpp"
#include "codei/select.hpp"

// JSON forms of the artifacts the CLI writes. Layouts are documented in docs/formats.md.
namespace codei::io {

using nlohmann::json;

// Two-space indented, keys sorted, trailing newline. Byte-stable for equal values.
std::string dump(const json& j);

json to_json(const planner::QueryLog& log);
planner::QueryLog query_log_from_json(const json& j);

json to_json(const percreq::RequirementSet& r);
percreq::RequirementSet requirements_from_json(const json& j);

json to_json(const select::CoverageSet& c);
select::CoverageSet coverage_from_json(const json& j);

json to_json(const percperf::MountedPipeline& m);
// Inverse of MountedPipeline::id(); yaw and pitch keep the id's six significant digits.
percperf::MountedPipeline parse_mpp_id(const std::string& id);

json to_json(const select::Certificate& c, const select::CoverInstance& inst);
json front_to_json(const select::ParetoFront& f, const design::SelectionProblem& sp);

// One implementation trace ("block=choice" entries) as a design description.
struct DesignDescription {
  std::string body, planner, computer;
  std::vector<percperf::MountedPipeline> mounted;
};
DesignDescription describe(const codesign::Impl& impl);
json to_json(const DesignDescription& d);
json solutions_to_json(const codesign::Antichain& a, double speed_kmh, double range_m);

}  // namespace codei::io

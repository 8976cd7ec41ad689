#include "codei/io.hpp"

#include <algorithm>
#include <stdexcept>

#include "codei/catalog.hpp"

namespace codei::io {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(const planner::QueryLog& log) {
  json keys = json::array();
  for (const auto& k : log.keys) keys.push_back({k.x, k.y, k.theta, k.tau, k.env, k.ex, k.ey, k.etheta});
  return {{"instance_id", log.instance_id},
          {"keys", keys},
          {"checks", log.checks},
          {"checks_per_replan", log.checks_per_replan}};
}

planner::QueryLog query_log_from_json(const json& j) {
  planner::QueryLog log;
  log.instance_id = j.at("instance_id").get<std::string>();
  for (const auto& k : j.at("keys")) {
    if (k.size() != 8) throw std::invalid_argument("query key needs 8 integers");
    planner::QueryKey q;
    q.x = k[0];
    q.y = k[1];
    q.theta = k[2];
    q.tau = k[3];
    q.env = k[4];
    q.ex = k[5];
    q.ey = k[6];
    q.etheta = k[7];
    log.keys.push_back(q);
  }
  if (!std::is_sorted(log.keys.begin(), log.keys.end()))
    throw std::invalid_argument("query keys of " + log.instance_id + " are not sorted");
  log.checks = j.value("checks", std::vector<std::uint32_t>{});
  log.checks_per_replan = j.value("checks_per_replan", std::vector<std::uint32_t>{});
  return log;
}

namespace {

json cells(const geom::CellSet& s) {
  json out = json::array();
  for (const auto& c : s.cells()) out.push_back({c.radial, c.angular, c.theta});
  return out;
}

geom::CellSet cells(const geom::PolarGridSpec& g, const json& j) {
  std::vector<geom::Cell> v;
  for (const auto& c : j) v.push_back({c.at(0).get<std::uint16_t>(), c.at(1).get<std::uint16_t>(),
                                       c.at(2).get<std::uint16_t>()});
  return geom::CellSet(g, std::move(v));
}

json entries(const std::map<percreq::ReqKey, geom::CellSet>& m) {
  json out = json::array();
  for (const auto& [k, s] : m)
    out.push_back({{"class", k.class_id}, {"env", world::to_string(k.env)}, {"cells", cells(s)}});
  return out;
}

percreq::ReqKey req_key(const json& e) {
  return {e.at("class").get<std::string>(), world::env_from_string(e.at("env").get<std::string>())};
}

}  // namespace

json to_json(const percreq::RequirementSet& r) {
  return {{"grid", catalog::to_json(r.grid())}, {"entries", entries(r.entries())}, {"atoms", r.atom_count()}};
}

percreq::RequirementSet requirements_from_json(const json& j) {
  percreq::RequirementSet r(catalog::grid_from_json(j.at("grid")));
  for (const auto& e : j.at("entries")) r.insert(req_key(e), cells(r.grid(), e.at("cells")));
  return r;
}

json to_json(const select::CoverageSet& c) {
  json grid = nullptr;
  if (!c.entries.empty()) grid = catalog::to_json(c.entries.begin()->second.grid());
  return {{"mpp", c.mpp_id}, {"epsilon", c.epsilon}, {"grid", grid}, {"entries", entries(c.entries)}};
}

select::CoverageSet coverage_from_json(const json& j) {
  select::CoverageSet c;
  c.mpp_id = j.at("mpp").get<std::string>();
  c.epsilon = j.at("epsilon").get<double>();
  if (j.at("entries").empty()) return c;
  auto g = catalog::grid_from_json(j.at("grid"));
  for (const auto& e : j.at("entries")) c.entries[req_key(e)] = cells(g, e.at("cells"));
  return c;
}

json to_json(const percperf::MountedPipeline& m) {
  return {{"id", m.id()},
          {"pipeline", m.pipeline_id},
          {"body", m.body_id},
          {"mount", m.mount},
          {"yaw_rad", m.yaw},
          {"pitch_rad", m.pitch}};
}

percperf::MountedPipeline parse_mpp_id(const std::string& id) {
  auto at = id.rfind('@');
  auto s1 = id.find('/');
  auto s2 = s1 == std::string::npos ? s1 : id.find('/', s1 + 1);
  auto s3 = at == std::string::npos ? at : id.find('/', at);
  if (at == std::string::npos || s2 == std::string::npos || s2 > at || s3 == std::string::npos)
    throw std::invalid_argument("bad mounted pipeline id " + id);
  percperf::MountedPipeline m;
  m.pipeline_id = id.substr(0, s1);
  m.body_id = id.substr(s1 + 1, s2 - s1 - 1);
  m.mount = id.substr(s2 + 1, at - s2 - 1);
  m.yaw = std::stod(id.substr(at + 1, s3 - at - 1));
  m.pitch = std::stod(id.substr(s3 + 1));
  return m;
}

json to_json(const select::Certificate& c, const select::CoverInstance& inst) {
  json atoms = json::array(), rows = json::array();
  for (auto a : c.atoms) {
    const auto& x = inst.atoms.at(a);
    atoms.push_back({{"class", x.class_id},
                     {"env", world::to_string(x.env)},
                     {"cell", {x.cell.radial, x.cell.angular, x.cell.theta}}});
  }
  for (auto r : c.f_rows) rows.push_back(inst.f_row_names.at(r));
  return {{"uncoverable", atoms}, {"exclusive_mounts", rows}, {"message", c.message}};
}

json front_to_json(const select::ParetoFront& f, const design::SelectionProblem& sp) {
  json points = json::array();
  for (const auto& p : f.points) {
    json sels = json::array();
    for (const auto& s : p.selections) {
      json mpps = json::array();
      for (auto l : s.chosen) mpps.push_back(to_json(sp.mounted.at(l)));
      sels.push_back({{"mounted", mpps}, {"weighted_cost", s.cost}});
    }
    points.push_back({{"resources", p.resources}, {"selections", sels}, {"weights", p.weights}});
  }
  json out{{"resources", {"price_chf", "mass_kg", "power_w", "compute_gflops"}},
           {"atoms", sp.instance.n_atoms()},
           {"candidates", sp.instance.n_candidates()},
           {"points", points},
           {"infeasible", nullptr}};
  if (f.infeasible) out["infeasible"] = to_json(*f.infeasible, sp.instance);
  return out;
}

DesignDescription describe(const codesign::Impl& impl) {
  DesignDescription d;
  for (const auto& e : impl) {
    auto eq = e.find('=');
    if (eq == std::string::npos) continue;
    auto block = e.substr(0, eq), choice = e.substr(eq + 1);
    if (block == "planner") d.planner = choice;
    else if (block == "robot_body") d.body = choice;
    else if (block == "computing") d.computer = choice;
    else if (block == "mounted_pp" && choice != "none") {
      std::size_t pos = 0;
      while (pos <= choice.size()) {
        auto plus = choice.find('+', pos);
        if (plus == std::string::npos) plus = choice.size();
        d.mounted.push_back(parse_mpp_id(choice.substr(pos, plus - pos)));
        pos = plus + 1;
      }
    }
  }
  return d;
}

json to_json(const DesignDescription& d) {
  json m = json::array();
  for (const auto& x : d.mounted) m.push_back(to_json(x));
  return {{"body", d.body}, {"planner", d.planner}, {"computer", d.computer}, {"mounted", m}};
}

json solutions_to_json(const codesign::Antichain& a, double speed_kmh, double range_m) {
  json points = json::array();
  for (const auto& s : codesign::design_solutions(a)) {
    json designs = json::array();
    for (const auto& i : s.impls) designs.push_back(to_json(describe(i)));
    points.push_back({{"resources", s.resources}, {"designs", designs}});
  }
  return {{"demand", {{"speed_kmh", speed_kmh}, {"range_m", range_m}}},
          {"resources", codesign::kCodeiResources},
          {"points", points}};
}

}  // namespace codei::io

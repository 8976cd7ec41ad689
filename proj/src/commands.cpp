#include "codei/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "codei/catalog.hpp"
#include "codei/codesign/codei_diagram.hpp"
#include "codei/design.hpp"
#include "codei/hash.hpp"
#include "codei/io.hpp"
#include "codei/oracle.hpp"
#include "codei/report.hpp"
#include "codei/store.hpp"

namespace codei::commands {

namespace fs = std::filesystem;
using nlohmann::json;
using store::ManifestEntry;
using store::RunStore;

namespace {

struct Inputs {
  catalog::Catalog cat;
  catalog::TaskFile task;
  std::string cat_hash, task_hash;
};

Inputs load(const Options& o) {
  Inputs in;
  in.cat = catalog::load_catalog(o.catalog);
  if (o.grid) in.cat.grid = catalog::load_grid(*o.grid);
  if (o.epsilon) in.cat.epsilon = *o.epsilon;
  if (o.weights) in.cat.n_weights = *o.weights;
  in.cat.validate();
  in.task = catalog::load_task(o.task);
  if (o.seed)
    for (std::size_t i = 0; i < in.task.scenarios.size(); ++i) in.task.scenarios[i].seed = hash_mix(*o.seed, i);
  in.cat_hash = store::sha256_hex(catalog::to_json(in.cat).dump());
  in.task_hash = store::sha256_hex(catalog::to_json(in.task).dump());
  return in;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool want_csv(const Options& o) { return o.format == "csv" || o.format == "both"; }
bool want_svg(const Options& o) { return o.format == "svg" || o.format == "both"; }

// Runs body; exceptions become exit code 1.
template <class F>
CommandResult guarded(F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    CommandResult r;
    r.exit_code = 1;
    r.message = e.what();
    return r;
  }
}

ManifestEntry entry(const std::string& kind, const std::string& command, const json& inputs,
                    const std::string& group = "") {
  ManifestEntry e;
  e.kind = kind;
  e.command = command;
  e.key = RunStore::key(command + "/" + kind, inputs);
  e.group = group;
  e.inputs = inputs;
  return e;
}

// Cache hit when every listed kind already exists for these inputs.
std::optional<std::vector<ManifestEntry>> cached(const RunStore& st, const std::string& command,
                                                 const json& inputs, const std::vector<std::string>& kinds) {
  std::vector<ManifestEntry> out;
  for (const auto& k : kinds) {
    auto e = st.find(RunStore::key(command + "/" + k, inputs));
    if (!e) return std::nullopt;
    out.push_back(*e);
  }
  return out;
}

}  // namespace

CommandResult cmd_simulate(const Options& o, const std::string& planner_id, const std::string& body_id) {
  return guarded([&] {
    auto in = load(o);
    const auto& spec = in.cat.planner(planner_id);
    const auto& body = in.cat.body(body_id);
    RunStore st(o.out);
    json inputs{{"catalog", in.cat_hash}, {"task", in.task_hash}, {"planner", planner_id}, {"body", body_id}};
    CommandResult r;
    if (auto hit = cached(st, "simulate", inputs, {"query_log"})) {
      r.cache_hit = true;
      r.artifacts.push_back(st.root() / hit->front().artifact);
      r.exit_code = json::parse(st.read(hit->front())).at("all_reached").get<bool>() ? 0 : 2;
      return r;
    }
    auto results = planner::run_task(spec, body, in.task.sample());
    json inst = json::array();
    bool all = true;
    for (const auto& x : results) {
      all = all && x.outcome == planner::Outcome::reached;
      inst.push_back({{"instance_id", x.instance_id},
                      {"outcome", planner::to_string(x.outcome)},
                      {"length_m", planner::trajectory_length(x.trajectory)},
                      {"duration_s", planner::trajectory_duration(x.trajectory)},
                      {"log", io::to_json(x.log)}});
    }
    auto v = planner::average_speed(results);
    json art{{"kind", "query_log"},
             {"planner", planner_id},
             {"body", body_id},
             {"inputs", inputs},
             {"instances", inst},
             {"all_reached", all},
             {"average_speed_mps", v && !results.empty() ? json(*v) : json(nullptr)},
             {"compute_gflops", planner::planner_compute_gflops(spec, results)}};
    r.artifacts.push_back(st.put(entry("query_log", "simulate", inputs), io::dump(art)));
    r.exit_code = all ? 0 : 2;
    if (!all) r.message = "some instances did not reach the goal";
    return r;
  });
}

CommandResult cmd_requirements(const Options& o, const std::vector<fs::path>& logs) {
  return guarded([&] {
    auto in = load(o);
    RunStore st(o.out);
    std::string body_id;
    std::set<std::string> sources;
    std::vector<planner::QueryLog> qlogs;
    for (const auto& p : logs) {
      auto bytes = slurp(p);
      auto j = json::parse(bytes);
      if (j.value("kind", "") != "query_log") throw std::invalid_argument(p.string() + " is not a query log");
      if (j.at("inputs").at("task") != in.task_hash)
        throw std::invalid_argument(p.string() + " was simulated for a different task");
      const auto b = j.at("body").get<std::string>();
      if (!body_id.empty() && b != body_id) throw std::invalid_argument("query logs mix bodies");
      body_id = b;
      sources.insert(store::sha256_hex(bytes));
      for (const auto& x : j.at("instances")) qlogs.push_back(io::query_log_from_json(x.at("log")));
    }
    if (body_id.empty()) throw std::invalid_argument("no query logs given");
    const auto& body = in.cat.body(body_id);

    json group_in{{"catalog", in.cat_hash}, {"task", in.task_hash}, {"body", body_id}};
    const auto group = RunStore::key("requirements", group_in);
    percreq::RequirementSet req(in.cat.grid);
    if (auto prev = st.latest("requirements", group)) {
      auto j = json::parse(st.read(*prev));
      req = io::requirements_from_json(j.at("requirements"));
      for (const auto& s : j.at("sources")) sources.insert(s.get<std::string>());
    }
    json inputs = group_in;
    inputs["sources"] = sources;
    CommandResult r;
    if (auto hit = cached(st, "requirements", inputs, {"requirements"})) {
      r.cache_hit = true;
      r.artifacts.push_back(st.root() / hit->front().artifact);
      return r;
    }
    auto queries = planner::query_set(qlogs);
    req.merge(percreq::requirements_from_queries(queries, in.task.sample(), in.task.classes, body.footprint,
                                                 in.cat.grid, in.task.requirements));
    json art{{"kind", "requirements"}, {"body", body_id}, {"sources", sources}, {"requirements", io::to_json(req)}};
    r.artifacts.push_back(st.put(entry("requirements", "requirements", inputs, group), io::dump(art)));
    return r;
  });
}

CommandResult cmd_select(const Options& o, const fs::path& requirements) {
  return guarded([&] {
    auto in = load(o);
    RunStore st(o.out);
    auto bytes = slurp(requirements);
    auto rj = json::parse(bytes);
    if (rj.value("kind", "") != "requirements")
      throw std::invalid_argument(requirements.string() + " is not a requirement set");
    const auto body_id = rj.at("body").get<std::string>();
    const auto& body = in.cat.body(body_id);
    auto req = io::requirements_from_json(rj.at("requirements"));
    if (!(req.grid() == in.cat.grid)) throw std::invalid_argument("requirement grid differs from the catalog grid");

    json inputs{{"catalog", in.cat_hash},
                {"task", in.task_hash},
                {"requirements", store::sha256_hex(bytes)},
                {"format", o.format},
                {"oracle", o.oracle}};
    std::vector<std::string> kinds{"front", "summary"};
    if (want_csv(o)) kinds.push_back("front_csv");
    if (want_svg(o)) kinds.push_back("front_svg");
    if (o.oracle) kinds.push_back("oracle");
    CommandResult r;
    if (auto hit = cached(st, "select", inputs, kinds)) {
      r.cache_hit = true;
      for (const auto& e : *hit) r.artifacts.push_back(st.root() / e.artifact);
      auto front = json::parse(st.read(hit->front()));
      r.exit_code = front.at("infeasible").is_null() ? 0 : 2;
      if (o.oracle && !json::parse(st.read(hit->back())).at("agrees").get<bool>()) r.exit_code = 1;
      return r;
    }

    auto coverage = [&](const percperf::MountedPipeline& m, const std::vector<percreq::ReqKey>& keys) {
      json ks = json::array();
      for (const auto& k : keys) ks.push_back({k.class_id, world::to_string(k.env)});
      json cin{{"catalog", in.cat_hash}, {"task", in.task_hash}, {"mpp", m.id()}, {"keys", ks}};
      if (auto e = st.find(RunStore::key("select/coverage", cin)))
        return io::coverage_from_json(json::parse(st.read(*e)));
      auto c = design::coverage_set(in.cat.pipeline(m.pipeline_id), body, m, in.task.classes, keys,
                                    in.cat.epsilon, in.cat.grid);
      st.put(entry("coverage", "select", cin), io::dump(io::to_json(c)));
      return c;
    };
    auto sp = design::selection_problem(in.cat, body, in.task.classes, req, in.cat.epsilon, coverage);
    auto front = select::pareto_sweep(sp.instance, in.cat.n_weights);

    auto put = [&](const std::string& kind, const std::string& bytes, const std::string& ext) {
      r.artifacts.push_back(st.put(entry(kind, "select", inputs), bytes, ext));
    };
    auto fj = io::front_to_json(front, sp);
    fj["body"] = body_id;
    fj["epsilon"] = in.cat.epsilon;
    fj["n_weights"] = in.cat.n_weights;
    put("front", io::dump(fj), "json");
    put("summary", report::front_summary(front, sp, in.cat), "txt");
    std::vector<std::vector<double>> rows;
    for (const auto& p : front.points) rows.push_back(p.resources);
    const std::vector<std::string> cols{"price_chf", "mass_kg", "power_w", "compute_gflops"};
    if (want_csv(o)) put("front_csv", report::csv(cols, rows), "csv");
    if (want_svg(o))
      put("front_svg", report::svg_pairs("sensor selection front, body " + body_id, cols, rows, report::all_pairs(4)),
          "svg");
    r.exit_code = front.infeasible ? 2 : 0;
    if (front.infeasible) r.message = "infeasible: " + front.infeasible->message;

    if (o.oracle) {
      auto truth = oracle::grouped_front(sp.instance);
      bool agrees = front.infeasible.has_value() == truth.empty();
      json off = json::array(), unsupported = json::array();
      for (const auto& p : front.points)
        if (std::find(truth.begin(), truth.end(), p.resources) == truth.end()) {
          off.push_back(p.resources);
          agrees = false;
        }
      for (const auto& t : truth) {
        bool found = false;
        for (const auto& p : front.points) found = found || p.resources == t;
        if (!found) unsupported.push_back(t);
      }
      // The sweep is exact per weight: its best weighted cost must equal the enumerated optimum.
      for (const auto& p : front.points)
        for (const auto& w : p.weights) {
          auto best = oracle::grouped_optimum(sp.instance, w);
          double c = 0.0;
          for (auto l : p.selections.front().chosen) c += select::weighted_cost(sp.instance, l, w);
          agrees = agrees && best && std::abs(*best - c) <= 1e-9;
        }
      json oj{{"agrees", agrees},
              {"enumerated_front", truth},
              {"sweep_points_off_front", off},
              {"unsupported_points", unsupported}};
      put("oracle", io::dump(oj), "json");
      if (!agrees) {
        r.exit_code = 1;
        r.message = "sweep disagrees with enumeration";
      }
    }
    return r;
  });
}

CommandResult cmd_codesign(const Options& o, double speed_kmh, double range_m) {
  return guarded([&] {
    auto in = load(o);
    RunStore st(o.out);
    json inputs{{"catalog", in.cat_hash},
                {"task", in.task_hash},
                {"speed_kmh", speed_kmh},
                {"range_m", range_m},
                {"format", o.format},
                {"oracle", o.oracle}};
    std::vector<std::string> kinds{"solutions", "summary"};
    if (want_csv(o)) kinds.push_back("solutions_csv");
    if (want_svg(o)) kinds.push_back("solutions_svg");
    if (o.oracle) kinds.push_back("oracle");
    CommandResult r;
    if (auto hit = cached(st, "codesign", inputs, kinds)) {
      r.cache_hit = true;
      for (const auto& e : *hit) r.artifacts.push_back(st.root() / e.artifact);
      r.exit_code = json::parse(st.read(hit->front())).at("points").empty() ? 2 : 0;
      if (o.oracle && !json::parse(st.read(hit->back())).at("agrees").get<bool>()) r.exit_code = 1;
      return r;
    }

    codesign::CodeiProblem p;
    p.catalog = in.cat;
    p.task = in.task.sample();
    p.classes = in.task.classes;
    p.requirements = in.task.requirements;
    p.grid = in.cat.grid;
    p.epsilon = in.cat.epsilon;
    p.n_weights = in.cat.n_weights;
    auto cd = codesign::build_codei_diagram(std::move(p));
    codesign::SolveStats stats;
    auto sol = codesign::solve_fix_fun_min_res(cd.diagram, codesign::codei_demand(speed_kmh, range_m), &stats);

    auto put = [&](const std::string& kind, const std::string& bytes, const std::string& ext) {
      r.artifacts.push_back(st.put(entry(kind, "codesign", inputs), bytes, ext));
    };
    auto sj = io::solutions_to_json(sol, speed_kmh, range_m);
    sj["kleene_iterations"] = stats.kleene_iterations;
    put("solutions", io::dump(sj), "json");
    put("summary", report::solutions_summary(sol, in.cat), "txt");
    std::vector<std::vector<double>> rows;
    for (const auto& s : codesign::design_solutions(sol)) rows.push_back(s.resources);
    if (want_csv(o)) put("solutions_csv", report::csv(codesign::kCodeiResources, rows), "csv");
    if (want_svg(o)) {
      auto pairs = report::all_pairs(4);
      pairs.push_back({4, 5});
      put("solutions_svg", report::svg_pairs("co-design solutions", codesign::kCodeiResources, rows, pairs), "svg");
    }
    r.exit_code = sol.empty() ? 2 : 0;
    if (sol.empty()) r.message = "no design meets the demand";

    if (o.oracle) {
      auto e = oracle::enumerate_codei(*cd.model, speed_kmh, range_m);
      const bool agrees = rows == e.front;
      put("oracle", io::dump({{"agrees", agrees}, {"tuples", e.tuples}, {"enumerated_front", e.front}}), "json");
      if (!agrees) {
        r.exit_code = 1;
        r.message = "diagram disagrees with design enumeration";
      }
    }
    return r;
  });
}

}  // namespace codei::commands

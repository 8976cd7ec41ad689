#include "codei/codesign/codei_diagram.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace codei::codesign {

namespace {

using design::snap;

std::string key(const std::string& planner, const std::string& body, const std::string& shape = "") {
  return planner + "|" + body + "|" + shape;
}

struct Handle {
  std::string planner, body, shape;
};

Handle parse(const std::string& tok) {
  Handle h;
  auto a = tok.find('|'), b = tok.rfind('|');
  h.planner = tok.substr(2, a - 2);
  h.body = tok.substr(a + 1, b - a - 1);
  h.shape = tok.substr(b + 1);
  return h;
}

}  // namespace

CodeiModel::CodeiModel(CodeiProblem p) : p_(std::move(p)) {
  for (const auto& b : p_.catalog.bodies)
    for (const auto& m : catalog::mounted_candidates(p_.catalog, b)) mpp_pipeline_[m.id()] = m.pipeline_id;
}

const design::PlannerRun& CodeiModel::run(const std::string& planner, const std::string& body) {
  auto k = key(planner, body);
  auto it = runs_.find(k);
  if (it == runs_.end())
    it = runs_.emplace(k, design::run_planner(p_.catalog.planner(planner), p_.catalog.body(body), p_.task,
                                              p_.catalog.speed_step_kmh))
             .first;
  return it->second;
}

const percreq::RequirementSet& CodeiModel::requirements(const std::string& planner, const std::string& body,
                                                        const std::string& shape) {
  auto k = key(planner, body, shape);
  auto it = reqs_.find(k);
  if (it == reqs_.end()) {
    const auto& r = run(planner, body);
    it = reqs_.emplace(k, percreq::requirements_from_queries(r.queries, p_.task, p_.classes,
                                                             p_.catalog.body(shape).footprint, p_.grid,
                                                             p_.requirements))
             .first;
  }
  return it->second;
}

const select::CoverageSet& CodeiModel::coverage(const percperf::MountedPipeline& m, const percreq::ReqKey& k) {
  auto ck = m.id() + "|" + k.class_id + "|" + world::to_string(k.env);
  auto it = coverage_.find(ck);
  if (it == coverage_.end())
    it = coverage_.emplace(ck, design::coverage_set(p_.catalog.pipeline(m.pipeline_id),
                                                    p_.catalog.body(m.body_id), m, p_.classes, {k},
                                                    p_.epsilon, p_.grid))
             .first;
  return it->second;
}

const design::SelectionProblem& CodeiModel::selection(const std::string& planner, const std::string& body,
                                                      const std::string& shape) {
  auto k = key(planner, body, shape);
  auto it = problems_.find(k);
  if (it != problems_.end()) return it->second;
  const auto& req = requirements(planner, body, shape);
  design::SelectionProblem sp;
  sp.mounted = catalog::mounted_candidates(p_.catalog, p_.catalog.body(shape));
  std::vector<select::CoverageSet> cov;
  std::vector<select::Candidate> cands;
  for (const auto& m : sp.mounted) {
    select::CoverageSet c;
    c.mpp_id = m.id();
    c.epsilon = p_.epsilon;
    for (const auto& [rk, cells] : req.entries())
      if (!cells.empty()) c.entries[rk] = coverage(m, rk).entries.at(rk);
    cov.push_back(std::move(c));
    const auto& pp = p_.catalog.pipeline(m.pipeline_id);
    cands.push_back({m.id(), m.mount, {}, {pp.price, pp.mass, pp.power, pp.detector_gflops}});
  }
  sp.instance = select::build_instance(req, cov, std::move(cands), p_.catalog.normalizers);
  return problems_.emplace(k, std::move(sp)).first->second;
}

const select::ParetoFront& CodeiModel::front(const std::string& planner, const std::string& body,
                                             const std::string& shape) {
  auto k = key(planner, body, shape);
  auto it = fronts_.find(k);
  if (it == fronts_.end())
    it = fronts_.emplace(k, select::pareto_sweep(selection(planner, body, shape).instance, p_.n_weights)).first;
  return it->second;
}

std::vector<std::vector<std::string>> CodeiModel::front_designs(const std::string& planner,
                                                                const std::string& body,
                                                                const std::string& shape) {
  const auto& sp = selection(planner, body, shape);
  std::vector<std::vector<std::string>> out;
  for (const auto& pt : front(planner, body, shape).points)
    for (const auto& s : pt.selections) {
      std::vector<std::string> ids;
      for (auto l : s.chosen) ids.push_back(sp.mounted[l].id());
      std::sort(ids.begin(), ids.end());
      out.push_back(std::move(ids));
    }
  return out;
}

const percperf::PerceptionPipeline& CodeiModel::pipeline_of(const std::string& mpp_id) const {
  auto it = mpp_pipeline_.find(mpp_id);
  if (it == mpp_pipeline_.end()) throw std::invalid_argument("unknown mounted pipeline " + mpp_id);
  return p_.catalog.pipeline(it->second);
}

std::vector<Elem> CodeiModel::functionality_grid() {
  std::set<double> speeds{0.0}, ranges{0.0};
  for (const auto& pl : p_.catalog.planners)
    for (const auto& b : p_.catalog.bodies) {
      const auto& r = run(pl.id, b.id);
      if (r.reached) speeds.insert(r.speed_kmh);
    }
  for (const auto& b : p_.catalog.bodies) ranges.insert(b.driving_range);
  std::vector<Elem> out;
  for (double s : speeds)
    for (double r : ranges) out.push_back(codei_demand(s, r));
  return out;
}

Elem codei_demand(double speed_kmh, double range_m) {
  return Elem::tuple({Elem::number(speed_kmh), Elem::number(range_m)});
}

CodeiDiagram build_codei_diagram(CodeiProblem p) {
  std::vector<std::string> missing;
  for (const auto& inst : p.task.instances) {
    for (const auto& o : inst.objects)
      if (!p.classes.count(o.class_id)) missing.push_back("class " + o.class_id);
    for (const auto& [cls, prior] : inst.priors)
      if (!p.classes.count(cls)) missing.push_back("class " + cls);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "unresolved catalog references:";
    for (const auto& m : missing) msg += " " + m;
    throw std::invalid_argument(msg);
  }

  auto model = std::make_shared<CodeiModel>(std::move(p));
  const auto& cat = model->problem().catalog;

  auto SPEED = numeric("km/h"), M = numeric("m"), CHF = numeric("CHF"), KG = numeric("kg"),
       W = numeric("W"), GF = numeric("GFLOPS");
  // Artifact wires compare by identity: the weighted-sum front is only monotone up to
  // supported points, so inclusion-based pruning could drop enumerable designs.
  auto BODY = flat("body"), QUERIES = flat("occupancy queries"), TRAJ = flat("colliding trajectories"),
       REQ = flat("perception requirements"), COV = flat("perception coverage");
  std::vector<std::string> all_mounts;
  for (const auto& b : cat.bodies)
    for (const auto& m : b.mount_points) all_mounts.push_back(b.id + "/" + m.name);
  auto MOUNTS = set_inclusion("mounting configurations", all_mounts);
  auto PERF = set_inclusion("mounted pipelines");

  auto num = [](double x) { return Elem::number(x); };
  auto tok = [](std::string t) { return Elem::token(std::move(t)); };
  auto one = [](const PosetPtr& R, Elem v, Impl impl = {}) {
    return Antichain{R, {{std::move(v), impl.empty() ? std::vector<Impl>{} : std::vector<Impl>{impl}}}};
  };

  Diagram d("codei");
  auto block = [&](const std::string& name, std::vector<Port> fun, std::vector<Port> res,
                   std::function<Antichain(const Elem&, const PosetPtr&)> h) {
    auto R = ports_poset(res);
    Mdpi m{name, ports_poset(fun), R, [h, R](const Elem& f) { return h(f, R); }, {}, {}};
    d.add_block(name, std::move(fun), std::move(res), memoized(std::move(m)));
  };

  block("planner", {{"speed", SPEED}},
        {{"queries", QUERIES}, {"dynamics", BODY}, {"distance", M}, {"compute", GF}},
        [model, num, tok](const Elem& f, const PosetPtr& R) {
          std::vector<Point> pts;
          const auto& c = model->problem().catalog;
          for (const auto& pl : c.planners)
            for (const auto& b : c.bodies) {
              const auto& r = model->run(pl.id, b.id);
              if (!r.reached || r.speed_kmh < f[0].num()) continue;
              pts.push_back({Elem::tuple({tok("q:" + key(pl.id, b.id)), tok(b.id), num(r.distance_m),
                                          num(r.compute_gflops)}),
                             {{"planner=" + pl.id}}});
            }
          return antichain_merge(R, std::move(pts));
        });

  block("shape_split", {{"shape", BODY}}, {{"to_pcp", BODY}, {"to_mpp", BODY}},
        [one](const Elem& f, const PosetPtr& R) { return one(R, Elem::tuple({f[0], f[0]})); });

  block("pcp", {{"queries", QUERIES}, {"robot_shape", BODY}}, {{"trajectories", TRAJ}},
        [one, tok](const Elem& f, const PosetPtr& R) {
          const auto& q = f[0].tok();
          const auto& s = f[1].tok();
          if (q.empty() || s.empty()) return one(R, Elem::tuple({tok("")}));
          return one(R, Elem::tuple({tok("t:" + q.substr(2) + s)}));
        });

  block("prior_check", {{"trajectories", TRAJ}}, {{"requirements", REQ}, {"robot_footprint", BODY}},
        [one, tok](const Elem& f, const PosetPtr& R) {
          const auto& t = f[0].tok();
          if (t.empty()) return one(R, Elem::tuple({tok(""), tok("")}));
          return one(R, Elem::tuple({tok("r:" + t.substr(2)), tok(parse(t).shape)}));
        });

  block("coverage", {{"requirements", REQ}}, {{"coverage", COV}},
        [one, tok](const Elem& f, const PosetPtr& R) {
          const auto& r = f[0].tok();
          return one(R, Elem::tuple({tok(r.empty() ? "" : "c:" + r.substr(2))}));
        });

  block("mounted_pp", {{"coverage", COV}, {"robot_shape", BODY}},
        {{"mounts", MOUNTS}, {"performance", PERF}}, [model, one](const Elem& f, const PosetPtr& R) {
          const auto& c = f[0].tok();
          const auto& s = f[1].tok();
          if (c.empty() || s.empty()) return one(R, Elem::tuple({Elem::set({}), Elem::set({})}));
          auto h = parse(c);
          if (h.shape != s) return Antichain{R, {}};
          const auto& sp = model->selection(h.planner, h.body, h.shape);
          std::vector<Point> pts;
          for (const auto& pt : model->front(h.planner, h.body, h.shape).points)
            for (const auto& sel : pt.selections) {
              std::vector<std::string> mounts, ids;
              for (auto l : sel.chosen) {
                mounts.push_back(sp.mounted[l].body_id + "/" + sp.mounted[l].mount);
                ids.push_back(sp.mounted[l].id());
              }
              std::sort(ids.begin(), ids.end());
              std::string impl = "mounted_pp=";
              for (std::size_t i = 0; i < ids.size(); ++i) impl += (i ? "+" : "") + ids[i];
              if (ids.empty()) impl += "none";
              pts.push_back({Elem::tuple({Elem::set(mounts), Elem::set(ids)}), {{impl}}});
            }
          return antichain_merge(R, std::move(pts));
        });

  block("perception_pipelines", {{"performance", PERF}},
        {{"price", CHF}, {"mass", KG}, {"power", W}, {"compute", GF}},
        [model, one, num](const Elem& f, const PosetPtr& R) {
          double price = 0, mass = 0, power = 0, gf = 0;
          for (const auto& id : f[0].items()) {
            const auto& pp = model->pipeline_of(id);
            price += pp.price;
            mass += pp.mass;
            power += pp.power;
            gf += pp.detector_gflops;
          }
          return one(R, Elem::tuple({num(snap(price)), num(snap(mass)), num(snap(power)), num(snap(gf))}));
        });

  auto sum2 = [one, num](const Elem& f, const PosetPtr& R) {
    Elem s = num(snap(f[0].num() + f[1].num()));
    std::vector<Elem> out(product_parts(R).size(), s);
    return one(R, Elem::tuple(std::move(out)));
  };
  block("sum_compute", {{"planner", GF}, {"detectors", GF}}, {{"to_computer", GF}, {"total", GF}}, sum2);

  {
    std::vector<CatalogEntry> entries;
    for (const auto& c : cat.computers)
      entries.push_back({Elem::tuple({num(c.gflops)}), Elem::tuple({num(c.price), num(c.mass), num(c.power)}),
                         c.id});
    std::vector<Port> fun{{"compute", GF}}, res{{"price", CHF}, {"mass", KG}, {"power", W}};
    d.add_block("computing", fun, res,
                catalog_mdpi("computing", ports_poset(fun), ports_poset(res), std::move(entries)));
  }

  block("sum_price", {{"pipelines", CHF}, {"computer", CHF}}, {{"total", CHF}}, sum2);
  block("sum_mass", {{"pipelines", KG}, {"computer", KG}}, {{"to_body", KG}, {"total", KG}}, sum2);
  block("sum_power", {{"pipelines", W}, {"computer", W}}, {{"to_body", W}, {"total", W}}, sum2);

  block("robot_body",
        {{"dynamics", BODY},
         {"footprint", BODY},
         {"mounting_configs", MOUNTS},
         {"payload", KG},
         {"aux_power", W},
         {"range", M},
         {"distance", M}},
        {{"fixed_cost", CHF}, {"op_cost", CHF}, {"shape", BODY}},
        [model, num, tok](const Elem& f, const PosetPtr& R) {
          std::vector<Point> pts;
          for (const auto& b : model->problem().catalog.bodies) {
            auto fits = [&](const Elem& t) { return t.tok().empty() || t.tok() == b.id; };
            if (!fits(f[0]) || !fits(f[1])) continue;
            bool mounts_ok = true;
            for (const auto& m : f[2].items()) {
              bool found = false;
              for (const auto& mp : b.mount_points) found = found || m == b.id + "/" + mp.name;
              mounts_ok = mounts_ok && found;
            }
            if (!mounts_ok || f[3].num() > b.payload_max || f[4].num() > b.aux_power ||
                f[5].num() > b.driving_range)
              continue;
            pts.push_back({Elem::tuple({num(b.fixed_cost), num(snap(b.op_cost * f[6].num())), tok(b.id)}),
                           {{"robot_body=" + b.id}}});
          }
          return antichain_merge(R, std::move(pts));
        });

  auto w = [&](const std::string& a, const std::string& ap, const std::string& b, const std::string& bp,
               bool loop = false) { d.connect({a, ap}, {b, bp}, loop); };
  w("planner", "queries", "pcp", "queries");
  w("planner", "dynamics", "robot_body", "dynamics");
  w("planner", "distance", "robot_body", "distance");
  w("planner", "compute", "sum_compute", "planner");
  w("shape_split", "to_pcp", "pcp", "robot_shape");
  w("shape_split", "to_mpp", "mounted_pp", "robot_shape");
  w("pcp", "trajectories", "prior_check", "trajectories");
  w("prior_check", "requirements", "coverage", "requirements");
  w("prior_check", "robot_footprint", "robot_body", "footprint");
  w("coverage", "coverage", "mounted_pp", "coverage");
  w("mounted_pp", "mounts", "robot_body", "mounting_configs");
  w("mounted_pp", "performance", "perception_pipelines", "performance");
  w("perception_pipelines", "price", "sum_price", "pipelines");
  w("perception_pipelines", "mass", "sum_mass", "pipelines");
  w("perception_pipelines", "power", "sum_power", "pipelines");
  w("perception_pipelines", "compute", "sum_compute", "detectors");
  w("sum_compute", "to_computer", "computing", "compute");
  w("computing", "price", "sum_price", "computer");
  w("computing", "mass", "sum_mass", "computer");
  w("computing", "power", "sum_power", "computer");
  w("sum_mass", "to_body", "robot_body", "payload");
  w("sum_power", "to_body", "robot_body", "aux_power");
  w("robot_body", "shape", "shape_split", "shape", true);

  d.expose_functionality("speed_kmh", {"planner", "speed"});
  d.expose_functionality("range_m", {"robot_body", "range"});
  d.expose_resource("price_chf", {"sum_price", "total"});
  d.expose_resource("mass_kg", {"sum_mass", "total"});
  d.expose_resource("power_w", {"sum_power", "total"});
  d.expose_resource("compute_gflops", {"sum_compute", "total"});
  d.expose_resource("fixed_cost_chf", {"robot_body", "fixed_cost"});
  d.expose_resource("op_cost_chf", {"robot_body", "op_cost"});
  d.validate();
  return {std::move(d), model};
}

std::vector<DesignSolution> design_solutions(const Antichain& a) {
  std::vector<DesignSolution> out;
  for (const auto& p : a.points) {
    DesignSolution s;
    for (const auto& x : p.value.parts()) s.resources.push_back(x.num());
    s.impls = p.impls;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace codei::codesign

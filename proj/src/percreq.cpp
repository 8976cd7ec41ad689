#include "codei/percreq.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include <boost/random/uniform_real_distribution.hpp>

#include "codei/hash.hpp"

namespace codei::percreq {

using geom::Vec2;

ClassShape class_shape(const world::ObjectClass& c) {
  return {c.id, c.limits, c.footprint, 0};
}

namespace {

struct RepPoint {
  Vec2 p;
  double r;
};

// Cell centers and cell corners, each once, ordered by radius.
std::vector<RepPoint> rep_points(const PolarGridSpec& g) {
  std::vector<RepPoint> out;
  for (int i = 0; i < g.n_radial; ++i)
    for (int j = 0; j < g.n_angular; ++j) {
      auto pts = geom::cell_representative_points(g, i, j);
      out.push_back({pts[0], geom::norm(pts[0])});
    }
  for (int i = 0; i <= g.n_radial; ++i) {
    double r = g.radial_edge(i);
    for (int j = 0; j < g.n_angular; ++j) {
      double a = g.azimuth_edge(j);
      out.push_back({{r * std::cos(a), r * std::sin(a)}, r});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RepPoint& a, const RepPoint& b) { return a.r < b.r; });
  return out;
}

std::vector<double> theta_midpoints(const PolarGridSpec& g) {
  std::vector<double> out;
  for (int k = 0; k < g.n_theta; ++k) out.push_back(0.5 * (g.theta_edge(k) + g.theta_edge(k + 1)));
  return out;
}

struct Rep {
  std::uint32_t id;
  Pose2 pose;
};

class Collider {
 public:
  Collider(const PolarGridSpec& g) : pts_(rep_points(g)), thetas_(theta_midpoints(g)) {}

  std::vector<Rep> operator()(const Pose2& q, const Footprint& cls, const Footprint& robot) const {
    std::vector<Rep> out;
    const double reach = cls.circumradius() + robot.circumradius() + 1e-9;
    const double rq = std::hypot(q.x, q.y);
    auto lo = std::lower_bound(pts_.begin(), pts_.end(), rq - reach,
                               [](const RepPoint& a, double v) { return a.r < v; });
    for (auto it = lo; it != pts_.end() && it->r <= rq + reach; ++it) {
      if (std::hypot(it->p.x - q.x, it->p.y - q.y) > reach) continue;
      const auto base = static_cast<std::uint32_t>((it - pts_.begin()) * thetas_.size());
      for (std::size_t k = 0; k < thetas_.size(); ++k) {
        Pose2 rep{it->p.x, it->p.y, thetas_[k]};
        if (geom::footprints_overlap(cls, rep, robot, q))
          out.push_back({base + static_cast<std::uint32_t>(k), rep});
      }
    }
    return out;
  }

 private:
  std::vector<RepPoint> pts_;
  std::vector<double> thetas_;
};

// Rollouts depend on the colliding pose, the quantized time offset, the class
// and the seed, never on which query asked for them.
std::uint64_t stream_seed(const Pose2& rep, std::int32_t tau_q, const std::string& cls,
                          std::uint64_t seed) {
  std::uint64_t h = hash_mix(seed, static_cast<std::uint64_t>(tau_q));
  h = hash_double(h, rep.x);
  h = hash_double(h, rep.y);
  h = hash_double(h, rep.theta);
  return hash_string(h, cls);
}

// One backward rollout from `end` at time tau down to 0. Samples come out in
// increasing time.
void backward_rollout(const ClassShape& cls, const Pose2& end, double tau, std::mt19937_64& rng,
                      const PcpOptions& opt, std::vector<TimedPose>& out) {
  out.clear();
  const auto& L = cls.limits;
  double kmax = std::min(L.max_curvature(), kCurvatureCap);
  boost::random::uniform_real_distribution<double> u01(0.0, 1.0);
  world::MotionState s{end, L.v_max * u01(rng)};
  out.push_back({tau, end});
  int n_seg = tau > 0 ? static_cast<int>(std::ceil(tau / opt.control_dt - 1e-9)) : 0;
  double t = tau;
  for (int seg = n_seg - 1; seg >= 0; --seg) {
    double t0 = seg * opt.control_dt;
    world::Control u{-L.d_max + (L.a_max + L.d_max) * u01(rng), kmax * (2.0 * u01(rng) - 1.0)};
    double span = t - t0;
    int n_sub = std::max(1, static_cast<int>(std::ceil(span / opt.integration_dt - 1e-9)));
    double h = span / n_sub;
    for (int i = 0; i < n_sub; ++i) {
      s = world::step_unchecked(L, s, u, -h);
      t = (seg == 0 && i == n_sub - 1) ? 0.0 : t - h;
      out.push_back({t, s.pose});
    }
    t = t0;
  }
  std::reverse(out.begin(), out.end());
}

bool trajectory_in_prior(const std::vector<TimedPose>& samples, const Pose2& ego_world,
                         const world::Prior& prior) {
  for (const auto& s : samples)
    if (!world::in_prior(prior, geom::se2_compose(ego_world, s.pose))) return false;
  return true;
}

const Pose2 kOrigin{0.0, 0.0, 0.0};

int n_traj_for(const RequirementOptions& opt, const std::string& cls) {
  auto it = opt.n_traj.find(cls);
  return it == opt.n_traj.end() ? opt.pcp.n_traj : it->second;
}

ClassShape shape_for(const RequirementOptions& opt, const world::ObjectClass& c) {
  ClassShape s = class_shape(c);
  if (auto it = opt.class_footprint.find(c.id); it != opt.class_footprint.end())
    s.footprint = it->second;
  return s;
}

struct Anchor {
  int instance;
  Pose2 ego_world;
};

struct Group {
  QueryKey local;  // ego fields zeroed
  std::vector<Anchor> anchors;
};

std::vector<Group> group_queries(const planner::QuerySet& queries, const world::Task& task) {
  std::vector<std::pair<QueryKey, int>> all;
  for (const auto& [id, keys] : queries) {
    auto it = std::lower_bound(task.instances.begin(), task.instances.end(), id,
                               [](const world::ScenarioInstance& a, const std::string& b) {
                                 return a.id < b;
                               });
    if (it == task.instances.end() || it->id != id)
      throw std::invalid_argument("queries for unknown instance " + id);
    int idx = static_cast<int>(it - task.instances.begin());
    for (const auto& k : keys) all.emplace_back(k, idx);
  }
  std::sort(all.begin(), all.end());
  std::vector<Group> groups;
  for (const auto& [k, idx] : all) {
    QueryKey local = k;
    local.ex = local.ey = local.etheta = 0;
    if (groups.empty() || groups.back().local != local) groups.push_back({local, {}});
    groups.back().anchors.push_back({idx, planner::dequantize(k).ego_world_pose});
  }
  return groups;
}

RequirementSet requirements_impl(const planner::QuerySet& queries, const world::Task& task,
                                 const world::ClassMap& classes, const Footprint& robot_fp,
                                 const PolarGridSpec& grid, const RequirementOptions& opt,
                                 bool parallel) {
  grid.validate();
  const auto groups = group_queries(queries, task);
  std::vector<const world::ObjectClass*> cls_list;
  std::vector<ClassShape> shapes;
  for (const auto& [id, c] : classes) {
    cls_list.push_back(&c);
    shapes.push_back(shape_for(opt, c));
  }
  const std::size_t n_cls = cls_list.size(), n_cells = grid.cell_count();
  const Collider collide(grid);
  // marks[(class * 4 + env) * n_cells + cell]
  std::vector<char> marks(n_cls * 4 * n_cells, 0);

#pragma omp parallel if (parallel)
  {
    std::vector<char> local(marks.size(), 0);
    std::vector<TimedPose> buf;
    std::vector<const world::Prior*> priors;
    std::vector<Pose2> anchors;
    // (class, rep, tau) -> start cell of each rollout, kNoCell when it starts in overlap
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> starts;
    constexpr std::uint32_t kNoCell = 0xffffffffu;

#pragma omp for schedule(dynamic, 4) nowait
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const Group& g = groups[gi];
      const auto q = planner::dequantize(g.local);
      for (std::size_t ci = 0; ci < n_cls; ++ci) {
        const ClassShape& cs = shapes[ci];
        priors.clear();
        anchors.clear();
        for (const Anchor& a : g.anchors) {
          const auto& pm = task.instances[a.instance].priors;
          auto it = pm.find(cs.class_id);
          if (it == pm.end()) continue;
          priors.push_back(&it->second);
          anchors.push_back(a.ego_world);
        }
        if (priors.empty()) continue;
        char* mark = local.data() + (ci * 4 + g.local.env) * n_cells;
        const int n = n_traj_for(opt, cs.class_id);
        for (const Rep& rep : collide(q.pose, cs.footprint, robot_fp)) {
          const std::uint64_t ck =
              (std::uint64_t(ci) << 48) | (std::uint64_t(rep.id) << 16) | std::uint16_t(g.local.tau);
          auto [it, fresh] = starts.try_emplace(ck);
          auto& cells = it->second;
          if (!fresh && std::all_of(cells.begin(), cells.end(), [&](std::uint32_t c) {
                return c == kNoCell || mark[c];
              }))
            continue;
          std::mt19937_64 rng(stream_seed(rep.pose, g.local.tau, cs.class_id, opt.pcp.seed));
          for (int k = 0; k < n; ++k) {
            backward_rollout(cs, rep.pose, q.tau, rng, opt.pcp, buf);
            const Pose2& start = buf.front().pose;
            if (fresh) {
              bool overlap = geom::footprints_overlap_strict(cs.footprint, start, robot_fp, kOrigin);
              cells.push_back(overlap ? kNoCell
                                      : static_cast<std::uint32_t>(geom::cell_index(
                                            grid, geom::clamped_cell_of(grid, start))));
            }
            const std::uint32_t idx = cells[k];
            if (idx == kNoCell || mark[idx]) continue;
            for (std::size_t a = 0; a < priors.size(); ++a)
              if (trajectory_in_prior(buf, anchors[a], *priors[a])) {
                mark[idx] = 1;
                break;
              }
          }
        }
      }
    }
#pragma omp critical
    for (std::size_t i = 0; i < marks.size(); ++i) marks[i] |= local[i];
  }

  RequirementSet out(grid);
  for (std::size_t ci = 0; ci < n_cls; ++ci)
    for (std::uint8_t e = 0; e < 4; ++e) {
      const char* mark = marks.data() + (ci * 4 + e) * n_cells;
      std::vector<Cell> cells;
      for (int r = 0; r < grid.n_radial; ++r)
        for (int a = 0; a < grid.n_angular; ++a)
          for (int t = 0; t < grid.n_theta; ++t) {
            Cell c{std::uint16_t(r), std::uint16_t(a), std::uint16_t(t)};
            if (mark[geom::cell_index(grid, c)]) cells.push_back(c);
          }
      if (!cells.empty())
        out.insert({cls_list[ci]->id, world::env_from_code(e)}, CellSet(grid, std::move(cells)));
    }
  return out;
}

}  // namespace

std::vector<Pose2> collision(const Pose2& ego_pose, const Footprint& class_fp,
                             const Footprint& robot_fp, const PolarGridSpec& grid) {
  grid.validate();
  std::vector<Pose2> out;
  for (const Rep& r : Collider(grid)(ego_pose, class_fp, robot_fp)) out.push_back(r.pose);
  return out;
}

std::vector<CollidingTrajectory> pcp(const std::vector<QueryKey>& queries, const ClassShape& cls,
                                     const Footprint& robot_fp, const PolarGridSpec& grid,
                                     const PcpOptions& opt) {
  if (opt.n_traj < 1) throw std::invalid_argument("pcp: n_traj must be >= 1");
  const Collider collide(grid);
  std::vector<CollidingTrajectory> out;
  std::vector<TimedPose> buf;
  for (const auto& k : queries) {
    const auto q = planner::dequantize(k);
    for (const Rep& rep : collide(q.pose, cls.footprint, robot_fp)) {
      std::mt19937_64 rng(stream_seed(rep.pose, k.tau, cls.class_id, opt.seed));
      for (int i = 0; i < opt.n_traj; ++i) {
        backward_rollout(cls, rep.pose, q.tau, rng, opt, buf);
        out.push_back({cls.class_id, cls.appearance, buf, q.tau, q.env, q.ego_world_pose});
      }
    }
  }
  return out;
}

std::vector<Pose2> prior_check(const std::vector<CollidingTrajectory>& trajs,
                               const world::Prior& prior, const Footprint& class_fp,
                               const Footprint& robot_fp) {
  std::vector<Pose2> out;
  for (const auto& tr : trajs) {
    if (tr.samples.empty()) continue;
    const Pose2& start = tr.samples.front().pose;
    if (geom::footprints_overlap_strict(class_fp, start, robot_fp, kOrigin)) continue;
    if (!trajectory_in_prior(tr.samples, tr.ego_world_pose, prior)) continue;
    out.push_back(start);
  }
  return out;
}

CellSet RequirementSet::get(const ReqKey& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? CellSet(grid_) : it->second;
}

CellSet RequirementSet::get(const ReqKey& k, int theta_idx) const {
  CellSet out(grid_), all = get(k);
  for (const Cell& c : all.cells())
    if (c.theta == theta_idx) out.insert(c);
  return out;
}

void RequirementSet::insert(const ReqKey& k, const Cell& c) {
  entries_.try_emplace(k, grid_).first->second.insert(c);
}

void RequirementSet::insert(const ReqKey& k, const CellSet& cells) {
  if (!(cells.grid() == grid_)) throw std::invalid_argument("RequirementSet: grid mismatch");
  if (cells.empty()) return;
  entries_.try_emplace(k, grid_).first->second.merge(cells);
}

void RequirementSet::merge(const RequirementSet& other) {
  if (!(other.grid_ == grid_)) throw std::invalid_argument("RequirementSet: grid mismatch");
  for (const auto& [k, cs] : other.entries_) insert(k, cs);
}

std::size_t RequirementSet::atom_count() const {
  std::size_t n = 0;
  for (const auto& [k, cs] : entries_) n += cs.size();
  return n;
}

bool RequirementSet::operator==(const RequirementSet& o) const {
  return grid_ == o.grid_ && entries_ == o.entries_;
}

bool requirement_subset(const RequirementSet& a, const RequirementSet& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("requirement_subset: grid mismatch");
  for (const auto& [k, cs] : a.entries())
    if (!geom::cellset_subset(cs, b.get(k))) return false;
  return true;
}

RequirementSet requirements_from_queries(const planner::QuerySet& queries, const world::Task& task,
                                         const world::ClassMap& classes, const Footprint& robot_fp,
                                         const PolarGridSpec& grid, const RequirementOptions& opt) {
  return requirements_impl(queries, task, classes, robot_fp, grid, opt, true);
}

RequirementSet requirements_from_queries_serial(const planner::QuerySet& queries,
                                                const world::Task& task,
                                                const world::ClassMap& classes,
                                                const Footprint& robot_fp,
                                                const PolarGridSpec& grid,
                                                const RequirementOptions& opt) {
  return requirements_impl(queries, task, classes, robot_fp, grid, opt, false);
}

RequirementSet requirements_reference(const planner::QuerySet& queries, const world::Task& task,
                                      const world::ClassMap& classes, const Footprint& robot_fp,
                                      const PolarGridSpec& grid, const RequirementOptions& opt) {
  RequirementSet out(grid);
  for (const auto& [id, keys] : queries) {
    const auto inst = task.subset({id}).instances.front();
    for (const auto& [cid, c] : classes) {
      auto pit = inst.priors.find(cid);
      if (pit == inst.priors.end()) continue;
      ClassShape cs = shape_for(opt, c);
      PcpOptions po = opt.pcp;
      po.n_traj = n_traj_for(opt, cid);
      for (const auto& k : keys) {
        auto trajs = pcp({k}, cs, robot_fp, grid, po);
        for (const Pose2& s : prior_check(trajs, pit->second, cs.footprint, robot_fp))
          out.insert({cid, world::env_from_code(k.env)}, geom::clamped_cell_of(grid, s));
      }
    }
  }
  return out;
}

RequirementSet perception_requirements(const planner::PlannerSpec& spec,
                                       const planner::RobotBody& body, const world::Task& task,
                                       const world::ClassMap& classes, const PolarGridSpec& grid,
                                       const RequirementOptions& opt) {
  auto results = planner::run_task(spec, body, task);
  std::vector<planner::QueryLog> logs;
  for (auto& r : results) {
    if (r.outcome != planner::Outcome::reached)
      throw InfeasibleTask("instance " + r.instance_id + " ended " + planner::to_string(r.outcome));
    logs.push_back(std::move(r.log));
  }
  return requirements_from_queries(planner::query_set(logs), task, classes,
                                   opt.robot_shape.value_or(body.footprint), grid, opt);
}

}  // namespace codei::percreq

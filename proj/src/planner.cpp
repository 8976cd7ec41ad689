#include "codei/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

#include <boost/random/uniform_real_distribution.hpp>

#include "codei/dubins.hpp"
#include "codei/hash.hpp"

namespace codei::planner {

using geom::kPi;
using world::Control;
using world::MotionState;

namespace {
constexpr double kEps = 1e-9;
constexpr double kIntegrationDt = 0.05;
// Curvature used when a body declares no turning limit.
constexpr double kUnboundedCurvature = 0.5;
constexpr double kDubinsCheckSpacing = 1.0;
constexpr int kRrtControlTries = 4;

std::int32_t qround(double v, double q) { return static_cast<std::int32_t>(std::llround(v / q)); }

std::int32_t qheading(double theta) {
  double deg = geom::normalize_angle(theta) * 180.0 / kPi;
  auto k = static_cast<std::int32_t>(std::llround(deg / kQuantHeadingDeg));
  const std::int32_t n = static_cast<std::int32_t>(std::llround(360.0 / kQuantHeadingDeg));
  k = ((k % n) + n) % n;
  if (k >= n / 2) k -= n;
  return k;
}

double dequant_heading(std::int32_t k) {
  return geom::normalize_angle(k * kQuantHeadingDeg * kPi / 180.0);
}
}  // namespace

void RobotBody::validate() const {
  if (id.empty()) throw std::invalid_argument("RobotBody: empty id");
  if (footprint.empty()) throw std::invalid_argument("RobotBody " + id + ": missing footprint");
  limits.validate();
  if (!(limits.v_max > 0)) throw std::invalid_argument("RobotBody " + id + ": v_max must be > 0");
  if (mount_points.empty()) throw std::invalid_argument("RobotBody " + id + ": no mount points");
  for (const auto& m : mount_points) {
    if (m.position.z < 0) throw std::invalid_argument("RobotBody " + id + ": mount below ground");
  }
  if (!(fixed_cost > 0) || !(op_cost >= 0))
    throw std::invalid_argument("RobotBody " + id + ": costs must be positive");
}

const MountPoint& RobotBody::mount(const std::string& name) const {
  for (const auto& m : mount_points)
    if (m.name == name) return m;
  throw std::invalid_argument("RobotBody " + id + ": no mount point " + name);
}

std::string to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::lattice_astar: return "lattice_astar";
    case PlannerKind::rrt: return "rrt";
    case PlannerKind::rrt_star: return "rrt_star";
  }
  return "?";
}

PlannerKind planner_kind_from_string(const std::string& s) {
  if (s == "lattice_astar") return PlannerKind::lattice_astar;
  if (s == "rrt") return PlannerKind::rrt;
  if (s == "rrt_star") return PlannerKind::rrt_star;
  throw std::invalid_argument("unknown planner kind: " + s);
}

void PlannerSpec::validate() const {
  if (!(horizon > 0) || !(replan_period > 0) || budget <= 0 || !(primitive_duration > 0) ||
      substeps <= 0)
    throw std::invalid_argument("PlannerSpec " + id + ": horizon, period and budget must be > 0");
  if (!(goal_bias >= 0 && goal_bias <= 1))
    throw std::invalid_argument("PlannerSpec " + id + ": goal_bias outside [0,1]");
}

QueryKey quantize(const OccupancyQuery& q) {
  QueryKey k;
  k.x = qround(q.pose.x, kQuantPos);
  k.y = qround(q.pose.y, kQuantPos);
  k.theta = qheading(q.pose.theta);
  k.tau = qround(q.tau, kQuantTau);
  k.env = world::env_code(q.env);
  k.ex = qround(q.ego_world_pose.x, kQuantPos);
  k.ey = qround(q.ego_world_pose.y, kQuantPos);
  k.etheta = qheading(q.ego_world_pose.theta);
  return k;
}

OccupancyQuery dequantize(const QueryKey& k) {
  OccupancyQuery q;
  q.pose = {k.x * kQuantPos, k.y * kQuantPos, dequant_heading(k.theta)};
  q.tau = k.tau * kQuantTau;
  q.env = world::env_from_code(k.env);
  q.ego_world_pose = {k.ex * kQuantPos, k.ey * kQuantPos, dequant_heading(k.etheta)};
  return q;
}

std::uint64_t key_hash(const QueryKey& k) {
  std::uint64_t h = 0x71756572794b6579ULL;
  for (std::int64_t v : {std::int64_t(k.x), std::int64_t(k.y), std::int64_t(k.theta),
                         std::int64_t(k.tau), std::int64_t(k.env), std::int64_t(k.ex),
                         std::int64_t(k.ey), std::int64_t(k.etheta)})
    h = hash_mix(h, static_cast<std::uint64_t>(v));
  return h;
}

void QueryRecorder::record(const OccupancyQuery& q) {
  raw_.push_back(quantize(q));
  ++current_;
}

void QueryRecorder::end_replan() {
  per_replan_.push_back(current_);
  current_ = 0;
}

QueryLog QueryRecorder::finish() const {
  QueryLog log;
  log.instance_id = instance_id_;
  std::vector<QueryKey> sorted = raw_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    log.keys.push_back(sorted[i]);
    log.checks.push_back(static_cast<std::uint32_t>(j - i));
    i = j;
  }
  log.checks_per_replan = per_replan_;
  if (current_ > 0) log.checks_per_replan.push_back(current_);
  return log;
}

OccupancyOracle ground_truth_oracle(const RobotBody& body, const world::ScenarioInstance& inst) {
  return [&body, &inst](const OccupancyQuery& q, double t_now) {
    Pose2 w = geom::se2_compose(q.ego_world_pose, q.pose);
    auto placed = body.footprint.placed(w);
    for (const Vec2& v : placed)
      if (!inst.workspace.contains(v)) return true;
    for (const auto& ob : inst.obstacles)
      if (geom::convex_overlap(placed, ob)) return true;
    double t = t_now + q.tau;
    for (const auto& o : inst.objects) {
      if (geom::footprints_overlap(body.footprint, w, o.footprint(), o.pose_at(t))) return true;
    }
    return false;
  };
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::reached: return "reached";
    case Outcome::timeout: return "timeout";
    case Outcome::stuck: return "stuck";
  }
  return "?";
}

namespace {

struct Primitive {
  Control u;
  double duration = 0.0;
};

struct LocalSample {
  double t = 0.0;
  MotionState s;
};

// Piecewise constant-acceleration speed profile along a geometric path.
struct SpeedProfile {
  double v0 = 0.0, vc = 0.0, rate = 0.0, t1 = 0.0, s1 = 0.0;

  SpeedProfile(double v_start, double v_cruise, double a_max, double d_max) : v0(v_start) {
    vc = v_cruise;
    if (vc > v0)
      rate = a_max;
    else if (vc < v0)
      rate = -d_max;
    if (rate == 0.0) vc = v0;
    t1 = rate != 0.0 ? (vc - v0) / rate : 0.0;
    s1 = v0 * t1 + 0.5 * rate * t1 * t1;
  }

  double dist_at(double t) const {
    if (t < t1) return v0 * t + 0.5 * rate * t * t;
    return s1 + vc * (t - t1);
  }
  double speed_at(double t) const { return t < t1 ? v0 + rate * t : vc; }
  double time_at(double s) const {
    if (s <= 0) return 0.0;
    if (s < s1) {
      double disc = v0 * v0 + 2 * rate * s;
      return (-v0 + std::sqrt(std::max(disc, 0.0))) / rate;
    }
    if (vc <= 0) return INFINITY;
    return t1 + (s - s1) / vc;
  }
};

// One replanning episode in the ego frame of the current pose.
class Episode {
 public:
  Episode(const PlannerSpec& spec, const RobotBody& body, const world::ScenarioInstance& inst,
          const OccupancyOracle& oracle, QueryRecorder& rec, const MotionState& ego, double t_now)
      : spec_(spec), body_(body), inst_(inst), oracle_(oracle), rec_(rec), ego_(ego),
        t_now_(t_now) {
    v_target_ = std::min(body.limits.v_max, inst.nominal_speed);
    kappa_ = std::min(body.limits.max_curvature(), kUnboundedCurvature);
  }

  const PlannerSpec& spec() const { return spec_; }
  const RobotBody& body() const { return body_; }
  double v_target() const { return v_target_; }
  double kappa() const { return kappa_; }
  MotionState root() const { return {{}, ego_.speed}; }

  bool free(const Pose2& local, double tau) {
    OccupancyQuery q{local, tau, inst_.env, ego_.pose};
    rec_.record(q);
    return !oracle_(q, t_now_);
  }

  Vec2 to_world(const Pose2& local) const {
    Pose2 w = geom::se2_compose(ego_.pose, local);
    return {w.x, w.y};
  }

  Vec2 goal_local() const {
    Vec2 c = geom::centroid(inst_.goal);
    Pose2 l = geom::se2_relative(ego_.pose, {c.x, c.y, 0.0});
    return {l.x, l.y};
  }

  bool in_goal(const Pose2& local) const {
    return geom::point_in_convex(inst_.goal, to_world(local));
  }

  double heuristic(const Pose2& local) const {
    return geom::distance_to_convex(inst_.goal, to_world(local)) / body_.limits.v_max;
  }

  int substeps_for(double duration) const {
    return std::max(1, static_cast<int>(std::llround(spec_.substeps * duration /
                                                     spec_.primitive_duration)));
  }

  MotionState integrate(MotionState s, const Control& u, double duration) const {
    int m = std::max(1, static_cast<int>(std::ceil(duration / kIntegrationDt - 1e-9)));
    double dt = duration / m;
    for (int i = 0; i < m; ++i) s = world::step(body_.limits, s, u, dt);
    return s;
  }

  // Checks every substep end; nullopt at the first occupied one.
  std::optional<MotionState> try_primitive(const MotionState& s, double t, const Primitive& p) {
    MotionState cur = s;
    int n = substeps_for(p.duration);
    double sub = p.duration / n;
    for (int k = 1; k <= n; ++k) {
      cur = integrate(cur, p.u, sub);
      if (!free(cur.pose, t + k * sub)) return std::nullopt;
    }
    return cur;
  }

  std::vector<Primitive> primitives(const MotionState& s, double t) const {
    double dur = std::min(spec_.primitive_duration, spec_.horizon - t);
    std::vector<Primitive> out;
    if (dur <= kEps) return out;
    const auto& L = body_.limits;
    double cruise = std::clamp((v_target_ - s.speed) / dur, -L.d_max, L.a_max);
    double brake = -L.d_max;
    std::vector<double> accels{cruise};
    if (brake != cruise) accels.push_back(brake);
    for (double k : {0.0, kappa_, -kappa_, 0.5 * kappa_, -0.5 * kappa_}) {
      for (double a : accels) out.push_back({{a, k}, dur});
      if (kappa_ == 0.0) break;
    }
    return out;
  }

  std::vector<LocalSample> execute(const std::vector<Primitive>& path) const {
    std::vector<LocalSample> out;
    MotionState cur = root();
    double t = 0.0;
    for (const Primitive& p : path) {
      int n = substeps_for(p.duration);
      double sub = p.duration / n;
      for (int k = 1; k <= n; ++k) {
        cur = integrate(cur, p.u, sub);
        out.push_back({t + k * sub, cur});
      }
      t += p.duration;
    }
    return out;
  }

 private:
  const PlannerSpec& spec_;
  const RobotBody& body_;
  const world::ScenarioInstance& inst_;
  const OccupancyOracle& oracle_;
  QueryRecorder& rec_;
  MotionState ego_;
  double t_now_;
  double v_target_ = 0.0;
  double kappa_ = 0.0;
};

struct TreeNode {
  MotionState s;
  double t = 0.0;
  int parent = -1;
  Primitive prim;
  double h = 0.0;
};

std::vector<Primitive> path_to(const std::vector<TreeNode>& nodes, int idx) {
  std::vector<Primitive> out;
  for (int i = idx; nodes[i].parent >= 0; i = nodes[i].parent) out.push_back(nodes[i].prim);
  std::reverse(out.begin(), out.end());
  return out;
}

int closest_node(const std::vector<TreeNode>& nodes) {
  int best = -1;
  for (int i = 1; i < static_cast<int>(nodes.size()); ++i)
    if (best < 0 || nodes[i].h < nodes[best].h) best = i;
  return best;
}

std::vector<LocalSample> search_lattice(Episode& ep) {
  const auto& spec = ep.spec();
  std::vector<TreeNode> nodes;
  nodes.push_back({ep.root(), 0.0, -1, {}, ep.heuristic({})});
  using Entry = std::tuple<double, std::uint64_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t counter = 0;
  open.emplace(nodes[0].h, counter++, 0);
  int expansions = 0;
  int chosen = -1;
  while (!open.empty()) {
    int idx = std::get<2>(open.top());
    open.pop();
    if (idx != 0 && (ep.in_goal(nodes[idx].s.pose) || nodes[idx].t >= spec.horizon - kEps)) {
      chosen = idx;
      break;
    }
    if (expansions >= spec.budget) break;
    ++expansions;
    TreeNode parent = nodes[idx];
    for (const Primitive& p : ep.primitives(parent.s, parent.t)) {
      auto end = ep.try_primitive(parent.s, parent.t, p);
      if (!end) continue;
      nodes.push_back({*end, parent.t + p.duration, idx, p, ep.heuristic(end->pose)});
      open.emplace(nodes.back().t + nodes.back().h, counter++,
                   static_cast<int>(nodes.size()) - 1);
    }
  }
  if (chosen < 0) chosen = closest_node(nodes);
  if (chosen < 0) return {};
  return ep.execute(path_to(nodes, chosen));
}

std::vector<LocalSample> search_rrt(Episode& ep, std::mt19937_64& rng) {
  const auto& spec = ep.spec();
  const auto& L = ep.body().limits;
  std::vector<TreeNode> nodes;
  nodes.push_back({ep.root(), 0.0, -1, {}, ep.heuristic({})});
  auto add_child = [&](int pi, const Primitive& p) {
    auto end = ep.try_primitive(nodes[pi].s, nodes[pi].t, p);
    if (!end) return;
    nodes.push_back({*end, nodes[pi].t + p.duration, pi, p, ep.heuristic(end->pose)});
  };
  // Cruise-straight and brake-straight children give every tree a fallback.
  auto prims = ep.primitives(nodes[0].s, 0.0);
  for (std::size_t i = 0; i < prims.size() && i < 2; ++i) add_child(0, prims[i]);

  boost::random::uniform_real_distribution<double> u01(0.0, 1.0);
  const double R = L.v_max * spec.horizon + 1.0;
  for (int it = 0; it < spec.budget; ++it) {
    // Fixed number of draws per iteration keeps iteration k independent of the budget.
    double r_goal = u01(rng), sx = u01(rng), sy = u01(rng);
    std::array<double, 2 * kRrtControlTries> cu{};
    for (double& v : cu) v = u01(rng);
    Vec2 target = r_goal < spec.goal_bias ? ep.goal_local()
                                          : Vec2{(2 * sx - 1) * R, (2 * sy - 1) * R};
    int near = -1;
    double best_d = INFINITY;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      if (nodes[i].t >= spec.horizon - kEps) continue;
      double d = std::hypot(nodes[i].s.pose.x - target.x, nodes[i].s.pose.y - target.y);
      if (d < best_d) {
        best_d = d;
        near = i;
      }
    }
    if (near < 0) break;
    double dur = std::min(spec.primitive_duration, spec.horizon - nodes[near].t);
    Primitive best_p;
    double best_end = INFINITY;
    for (int k = 0; k < kRrtControlTries; ++k) {
      double a = -L.d_max + cu[2 * k] * (L.a_max + L.d_max);
      double kap = (2 * cu[2 * k + 1] - 1) * ep.kappa();
      Primitive p{{a, kap}, dur};
      MotionState e = ep.integrate(nodes[near].s, p.u, dur);
      double d = std::hypot(e.pose.x - target.x, e.pose.y - target.y);
      if (d < best_end) {
        best_end = d;
        best_p = p;
      }
    }
    add_child(near, best_p);
  }
  int chosen = -1;
  for (int i = 1; i < static_cast<int>(nodes.size()); ++i)
    if (ep.in_goal(nodes[i].s.pose) && (chosen < 0 || nodes[i].t < nodes[chosen].t)) chosen = i;
  if (chosen < 0) chosen = closest_node(nodes);
  if (chosen < 0) return {};
  return ep.execute(path_to(nodes, chosen));
}

struct StarNode {
  Pose2 pose;
  double cost = 0.0;
  int parent = -1;
  DubinsPath path;  // from parent
  double h = 0.0;
};

std::vector<LocalSample> search_rrt_star(Episode& ep, std::mt19937_64& rng) {
  const auto& spec = ep.spec();
  const auto& L = ep.body().limits;
  const double rho = ep.kappa() > 0 ? 1.0 / ep.kappa() : 1e6;
  const SpeedProfile prof(ep.root().speed, ep.v_target(), L.a_max, L.d_max);
  // Steps must stay reachable inside the horizon from the current speed.
  const double step_len = std::max(
      std::min(ep.v_target() * spec.primitive_duration, 0.5 * prof.dist_at(spec.horizon)), 0.25);
  const double r_near = 2.0 * step_len;
  const double R = std::max(prof.dist_at(spec.horizon), 1.0);

  auto edge_free = [&](double c0, const DubinsPath& p) {
    double len = p.length();
    int n = std::max(1, static_cast<int>(std::ceil(len / kDubinsCheckSpacing - 1e-9)));
    for (int k = 1; k <= n; ++k) {
      double s = len * k / n;
      double tau = prof.time_at(c0 + s);
      if (tau > spec.horizon + kEps) return false;
      if (!ep.free(p.sample(s), tau)) return false;
    }
    return true;
  };

  std::vector<StarNode> nodes;
  nodes.push_back({{}, 0.0, -1, {}, ep.heuristic({})});
  boost::random::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int it = 0; it < spec.budget; ++it) {
    double r_goal = u01(rng), sx = u01(rng), sy = u01(rng), sth = u01(rng);
    Vec2 tp = r_goal < spec.goal_bias ? ep.goal_local() : Vec2{(2 * sx - 1) * R, (2 * sy - 1) * R};
    int near = -1;
    double best_d = INFINITY;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      if (prof.time_at(nodes[i].cost) >= spec.horizon - kEps) continue;
      double d = std::hypot(nodes[i].pose.x - tp.x, nodes[i].pose.y - tp.y);
      if (d < best_d) {
        best_d = d;
        near = i;
      }
    }
    if (near < 0) break;
    // Heading follows the steering direction, perturbed by up to 22.5 degrees.
    double heading = std::atan2(tp.y - nodes[near].pose.y, tp.x - nodes[near].pose.x);
    Pose2 target{tp.x, tp.y, geom::normalize_angle(heading + (2 * sth - 1) * kPi / 8)};
    auto steer = dubins_shortest(nodes[near].pose, target, rho);
    if (!steer || steer->length() < 1e-6) continue;
    Pose2 np = steer->sample(std::min(step_len, steer->length()));

    struct Cand {
      double cost;
      int idx;
      DubinsPath path;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      if (i != near && std::hypot(nodes[i].pose.x - np.x, nodes[i].pose.y - np.y) > r_near)
        continue;
      auto dp = dubins_shortest(nodes[i].pose, np, rho);
      if (!dp || dp->length() < 1e-6) continue;
      cands.push_back({nodes[i].cost + dp->length(), i, *dp});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.cost < b.cost || (a.cost == b.cost && a.idx < b.idx);
    });
    int parent = -1;
    DubinsPath ppath;
    for (const Cand& c : cands) {
      if (prof.time_at(c.cost) > spec.horizon + kEps) continue;
      if (edge_free(nodes[c.idx].cost, c.path)) {
        parent = c.idx;
        ppath = c.path;
        break;
      }
    }
    if (parent < 0) continue;
    nodes.push_back({np, nodes[parent].cost + ppath.length(), parent, ppath, ep.heuristic(np)});
    const int ni = static_cast<int>(nodes.size()) - 1;

    for (const Cand& c : cands) {
      int j = c.idx;
      if (j == parent || j == 0) continue;
      auto dp = dubins_shortest(np, nodes[j].pose, rho);
      if (!dp) continue;
      double nc = nodes[ni].cost + dp->length();
      if (!(nc < nodes[j].cost - 1e-9)) continue;
      if (!edge_free(nodes[ni].cost, *dp)) continue;
      double delta = nodes[j].cost - nc;
      nodes[j].parent = ni;
      nodes[j].path = *dp;
      std::vector<int> stack{j};
      while (!stack.empty()) {
        int k = stack.back();
        stack.pop_back();
        nodes[k].cost -= delta;
        for (int m = 0; m < static_cast<int>(nodes.size()); ++m)
          if (nodes[m].parent == k) stack.push_back(m);
      }
    }
  }

  // Arrival time plus remaining distance at cruise speed: flat along efficient paths.
  const double v_ref = std::max(ep.v_target(), 1e-3);
  auto score = [&](int i) {
    Vec2 g = ep.goal_local();
    return prof.time_at(nodes[i].cost) +
           std::hypot(g.x - nodes[i].pose.x, g.y - nodes[i].pose.y) / v_ref;
  };
  int chosen = -1;
  bool chosen_goal = false;
  for (int i = 1; i < static_cast<int>(nodes.size()); ++i) {
    bool g = ep.in_goal(nodes[i].pose);
    if (chosen < 0 || (g && !chosen_goal) || (g && nodes[i].cost < nodes[chosen].cost) ||
        (!g && !chosen_goal && score(i) < score(chosen) - 1e-9) ||
        (!g && !chosen_goal && score(i) <= score(chosen) + 1e-9 && nodes[i].h < nodes[chosen].h)) {
      chosen = i;
      chosen_goal = g;
    }
  }
  if (chosen < 0) {
    // No tree growth: fall back to the first free lattice primitive.
    for (const Primitive& p : ep.primitives(ep.root(), 0.0))
      if (ep.try_primitive(ep.root(), 0.0, p)) return ep.execute({p});
    return {};
  }

  std::vector<int> chain;
  for (int i = chosen; i > 0; i = nodes[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  const double total = nodes[chosen].cost;
  const double dt = spec.primitive_duration / spec.substeps;
  std::vector<LocalSample> out;
  std::size_t seg = 0;
  for (int k = 1;; ++k) {
    double t = k * dt;
    double s = std::min(prof.dist_at(t), total);
    while (seg + 1 < chain.size() && s > nodes[chain[seg]].cost) ++seg;
    const StarNode& n = nodes[chain[seg]];
    double s0 = n.cost - n.path.length();
    out.push_back({t, {n.path.sample(s - s0), prof.speed_at(t)}});
    if (s >= total - 1e-12) break;
    if (t > spec.horizon + kEps) break;
  }
  return out;
}

std::vector<LocalSample> run_episode(Episode& ep, std::mt19937_64& rng) {
  switch (ep.spec().kind) {
    case PlannerKind::lattice_astar: return search_lattice(ep);
    case PlannerKind::rrt: return search_rrt(ep, rng);
    case PlannerKind::rrt_star: return search_rrt_star(ep, rng);
  }
  return {};
}

std::mt19937_64 episode_rng(const PlannerSpec& spec, const std::string& instance_id,
                            std::uint64_t replan) {
  return std::mt19937_64(hash_mix(hash_string(spec.seed, instance_id), replan));
}

}  // namespace

QueryLog replan_once(const PlannerSpec& spec, const RobotBody& body,
                     const world::ScenarioInstance& instance, const OccupancyOracle& oracle,
                     const world::MotionState& state, double t_now) {
  spec.validate();
  QueryRecorder rec(instance.id);
  Episode ep(spec, body, instance, oracle, rec, state, t_now);
  auto rng = episode_rng(spec, instance.id, 0);
  run_episode(ep, rng);
  rec.end_replan();
  return rec.finish();
}

PlanResult plan(const PlannerSpec& spec, const RobotBody& body,
                const world::ScenarioInstance& instance, const OccupancyOracle& oracle) {
  spec.validate();
  PlanResult res;
  res.instance_id = instance.id;
  QueryRecorder rec(instance.id);
  MotionState cur{instance.start, 0.0};
  if (geom::point_in_convex(instance.goal, {cur.pose.x, cur.pose.y})) {
    res.outcome = Outcome::reached;
    res.log = rec.finish();
    return res;
  }
  res.trajectory.push_back({0.0, cur.pose, cur.speed});
  double t = 0.0;
  for (std::uint64_t replan = 0;; ++replan) {
    if (t >= instance.time_limit - kEps) {
      res.outcome = Outcome::timeout;
      break;
    }
    Episode ep(spec, body, instance, oracle, rec, cur, t);
    auto rng = episode_rng(spec, instance.id, replan);
    auto samples = run_episode(ep, rng);
    rec.end_replan();
    if (samples.empty()) {
      res.outcome = Outcome::stuck;
      break;
    }
    bool reached = false;
    MotionState last = cur;
    double advanced = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i > 0 && samples[i].t > spec.replan_period + kEps) break;
      last = {geom::se2_compose(cur.pose, samples[i].s.pose), samples[i].s.speed};
      advanced = samples[i].t;
      res.trajectory.push_back({t + advanced, last.pose, last.speed});
      if (geom::point_in_convex(instance.goal, {last.pose.x, last.pose.y})) {
        reached = true;
        break;
      }
    }
    cur = last;
    t += advanced;
    if (reached) {
      res.outcome = Outcome::reached;
      break;
    }
  }
  res.log = rec.finish();
  return res;
}

QuerySet query_set(const std::vector<QueryLog>& logs) {
  QuerySet out;
  for (const auto& log : logs) {
    auto& v = out[log.instance_id];
    std::vector<QueryKey> merged;
    std::set_union(v.begin(), v.end(), log.keys.begin(), log.keys.end(),
                   std::back_inserter(merged));
    v = std::move(merged);
  }
  return out;
}

std::vector<PlanResult> run_task(const PlannerSpec& spec, const RobotBody& body,
                                 const world::Task& task) {
  std::vector<PlanResult> out(task.instances.size());
  const int n = static_cast<int>(task.instances.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const auto& inst = task.instances[i];
    out[i] = plan(spec, body, inst, ground_truth_oracle(body, inst));
  }
  return out;
}

QuerySet task_queries(const PlannerSpec& spec, const RobotBody& body, const world::Task& task) {
  std::vector<QueryLog> logs;
  for (auto& r : run_task(spec, body, task)) logs.push_back(std::move(r.log));
  return query_set(logs);
}

bool query_subset(const QuerySet& a, const QuerySet& b) {
  for (const auto& [id, keys] : a) {
    if (keys.empty()) continue;
    auto it = b.find(id);
    if (it == b.end()) return false;
    if (!std::includes(it->second.begin(), it->second.end(), keys.begin(), keys.end()))
      return false;
  }
  return true;
}

std::size_t query_count(const QuerySet& q) {
  std::size_t n = 0;
  for (const auto& [id, keys] : q) n += keys.size();
  return n;
}

double trajectory_length(const std::vector<TrajectorySample>& traj) {
  double len = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    len += std::hypot(traj[i].pose.x - traj[i - 1].pose.x, traj[i].pose.y - traj[i - 1].pose.y);
  return len;
}

double trajectory_duration(const std::vector<TrajectorySample>& traj) {
  if (traj.size() < 2) return 0.0;
  return traj.back().t - traj.front().t;
}

std::optional<double> average_speed(const std::vector<PlanResult>& results) {
  double len = 0.0, time = 0.0;
  for (const auto& r : results) {
    if (r.outcome != Outcome::reached) return std::nullopt;
    len += trajectory_length(r.trajectory);
    time += trajectory_duration(r.trajectory);
  }
  if (time <= 0.0) return INFINITY;
  return len / time;
}

double planner_compute_gflops(const PlannerSpec& spec, const std::vector<PlanResult>& results) {
  std::uint32_t worst = 0;
  for (const auto& r : results)
    for (auto c : r.log.checks_per_replan) worst = std::max(worst, c);
  return worst * spec.gflop_per_check / spec.replan_period;
}

}  // namespace codei::planner

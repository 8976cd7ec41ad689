#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <algorithm>

#include "codei/oracle.hpp"

namespace codei::oracle {

namespace {

using geom::Vec2;
using geom::Vec3;

Vec3 sub(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 at(Vec3 o, Vec3 d, double t) { return {o.x + t * d.x, o.y + t * d.y, o.z + t * d.z}; }

// Moller-Trumbore, edges inclusive. Returns the line parameter.
std::optional<double> ray_triangle(Vec3 o, Vec3 d, Vec3 v0, Vec3 v1, Vec3 v2) {
  Vec3 e1 = sub(v1, v0), e2 = sub(v2, v0);
  Vec3 p = cross(d, e2);
  double det = dot(e1, p);
  if (det == 0.0) return std::nullopt;
  double inv = 1.0 / det;
  Vec3 s = sub(o, v0);
  double u = dot(s, p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  Vec3 q = cross(s, e1);
  double v = dot(d, q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  return dot(e2, q) * inv;
}

struct Prism {
  std::vector<Vec2> poly;  // CCW
  double z0 = 0.0, z1 = 0.0;

  std::vector<double> hits(Vec3 o, Vec3 d) const {
    std::vector<double> out;
    auto add = [&](Vec3 a, Vec3 b, Vec3 c) {
      if (auto t = ray_triangle(o, d, a, b, c)) out.push_back(*t);
    };
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a = poly[i], b = poly[(i + 1) % n];
      add({a.x, a.y, z0}, {b.x, b.y, z0}, {b.x, b.y, z1});
      add({a.x, a.y, z0}, {b.x, b.y, z1}, {a.x, a.y, z1});
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      add({poly[0].x, poly[0].y, z0}, {poly[i].x, poly[i].y, z0}, {poly[i + 1].x, poly[i + 1].y, z0});
      add({poly[0].x, poly[0].y, z1}, {poly[i].x, poly[i].y, z1}, {poly[i + 1].x, poly[i + 1].y, z1});
    }
    return out;
  }

  bool inside(Vec3 p, bool strict) const {
    if (strict ? !(p.z > z0 && p.z < z1) : !(p.z >= z0 && p.z <= z1)) return false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a = poly[i], b = poly[(i + 1) % n];
      double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      if (strict ? !(c > 0) : !(c >= 0)) return false;
    }
    return true;
  }
};

Vec3 ray_dir(double az, double el, double yaw, double pitch) {
  // Boresight frame, then pitch about the sensor's y axis, then yaw about z.
  Vec3 v{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
  Vec3 w{v.x * std::cos(pitch) + v.z * std::sin(pitch), v.y,
         -v.x * std::sin(pitch) + v.z * std::cos(pitch)};
  return {w.x * std::cos(yaw) - w.y * std::sin(yaw), w.x * std::sin(yaw) + w.y * std::cos(yaw), w.z};
}

}  // namespace

percperf::VisibilityReport brute_force_visibility(const percperf::PerceptionPipeline& pp,
                                                  const planner::RobotBody& body,
                                                  const percperf::MountedPipeline& m,
                                                  const percperf::TargetBox& target) {
  std::vector<Prism> bodies;
  for (const auto& e : body.height_profile) bodies.push_back({e.footprint.vertices(), 0.0, e.height});
  Prism box{geom::Footprint::rectangle(target.length, target.width).placed(target.pose), 0.0,
            target.height};
  const Vec3 o = body.mount(m.mount).position;

  percperf::VisibilityReport rep;
  for (int j = 0; j < pp.n_elevation; ++j)
    for (int i = 0; i < pp.n_azimuth; ++i) {
      double az = -pp.fov_h / 2 + (i + 0.5) * pp.fov_h / pp.n_azimuth;
      double el = -pp.fov_v / 2 + (j + 0.5) * pp.fov_v / pp.n_elevation;
      Vec3 d = ray_dir(az, el, m.yaw, m.pitch);
      double t_target = std::numeric_limits<double>::infinity();
      if (box.inside(o, false)) {
        t_target = 0.0;
      } else {
        for (double t : box.hits(o, d))
          if (t >= 0.0) t_target = std::min(t_target, t);
      }
      if (!(t_target <= pp.range_max)) continue;
      ++rep.unoccluded_count;
      bool blocked = false;
      if (t_target > 0.0) {
        for (const Prism& p : bodies) {
          std::vector<double> ev{0.0, t_target};
          for (double t : p.hits(o, d))
            if (t > 0.0 && t < t_target) ev.push_back(t);
          std::sort(ev.begin(), ev.end());
          for (std::size_t k = 0; k + 1 < ev.size() && !blocked; ++k)
            blocked = p.inside(at(o, d, 0.5 * (ev[k] + ev[k + 1])), true);
          if (blocked) break;
        }
      }
      if (!blocked) ++rep.hit_count;
    }
  rep.in_fov = rep.unoccluded_count > 0;
  rep.visible_fraction = rep.unoccluded_count ? double(rep.hit_count) / rep.unoccluded_count : 0.0;
  return rep;
}

geom::CellSet brute_force_seen_cells(const world::Appearance& a,
                                     const percperf::PerceptionPipeline& pp,
                                     const planner::RobotBody& body,
                                     const percperf::MountedPipeline& m,
                                     const geom::PolarGridSpec& grid) {
  std::vector<geom::Cell> seen;
  for (int r = 0; r < grid.n_radial; ++r)
    for (int j = 0; j < grid.n_angular; ++j) {
      auto pts = geom::cell_representative_points(grid, r, j);
      for (int k = 0; k < grid.n_theta; ++k) {
        bool ok = true;
        for (Vec2 p : pts) {
          for (double th : {grid.theta_edge(k), grid.theta_edge((k + 1) % grid.n_theta)}) {
            percperf::TargetBox tb{{p.x, p.y, th}, a.length, a.width, a.height};
            if (brute_force_visibility(pp, body, m, tb).hit_count == 0) ok = false;
            if (!ok) break;
          }
          if (!ok) break;
        }
        if (ok) seen.push_back({std::uint16_t(r), std::uint16_t(j), std::uint16_t(k)});
      }
    }
  return geom::CellSet(grid, std::move(seen));
}

select::CoverResult brute_force_cover(const select::CoverInstance& inst,
                                      const std::vector<double>& weights) {
  const std::size_t L = inst.n_candidates();
  if (L > 24) throw std::invalid_argument("brute_force_cover: too many candidates");
  select::CoverResult best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << L); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t l = 0; l < L; ++l)
      if (mask >> l & 1) s.push_back(l);
    if (!select::is_valid_cover(inst, s)) continue;
    double c = 0.0;
    for (std::size_t l : s) c += select::weighted_cost(inst, l, weights);
    bool better = !best.selection;
    if (!better) {
      double b = best.selection->cost, t = 1e-12 * std::max(1.0, std::abs(b));
      better = c < b - t || (c <= b + t && s < best.selection->chosen);
    }
    if (better) best.selection = select::Selection{s, c, select::raw_sum(inst, s)};
  }
  if (!best.selection) best.certificate.message = "no feasible subset";
  return best;
}

std::vector<std::vector<double>> brute_force_front(const select::CoverInstance& inst) {
  const std::size_t L = inst.n_candidates();
  if (L > 24) throw std::invalid_argument("brute_force_front: too many candidates");
  std::vector<std::vector<double>> all;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << L); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t l = 0; l < L; ++l)
      if (mask >> l & 1) s.push_back(l);
    if (select::is_valid_cover(inst, s)) all.push_back(select::raw_sum(inst, s));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<std::vector<double>> front;
  for (const auto& a : all) {
    bool dom = false;
    for (const auto& b : all) dom = dom || select::dominates(b, a);
    if (!dom) front.push_back(a);
  }
  return front;
}

std::vector<std::vector<std::size_t>> exclusive_subsets(const select::CoverInstance& inst,
                                                        std::size_t limit) {
  std::vector<std::vector<std::size_t>> rows;
  double total = 1.0;
  for (const auto& r : inst.f_rows) {
    std::vector<std::size_t> members;
    for (auto l = r.find_first(); l != select::Bits::npos; l = r.find_next(l)) members.push_back(l);
    total *= static_cast<double>(members.size() + 1);
    rows.push_back(std::move(members));
  }
  if (total > static_cast<double>(limit)) throw std::invalid_argument("exclusive_subsets: too many subsets");
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> pick(rows.size(), 0);  // 0 = none, k = rows[r][k - 1]
  while (true) {
    std::vector<std::size_t> s;
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (pick[r]) s.push_back(rows[r][pick[r] - 1]);
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
    std::size_t r = 0;
    while (r < rows.size() && ++pick[r] > rows[r].size()) pick[r++] = 0;
    if (r == rows.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<double>> grouped_front(const select::CoverInstance& inst) {
  std::vector<std::vector<double>> all;
  for (const auto& s : exclusive_subsets(inst))
    if (select::is_valid_cover(inst, s)) all.push_back(select::raw_sum(inst, s));
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<std::vector<double>> front;
  for (const auto& a : all) {
    bool dom = false;
    for (const auto& b : all) dom = dom || select::dominates(b, a);
    if (!dom) front.push_back(a);
  }
  return front;
}

std::optional<double> grouped_optimum(const select::CoverInstance& inst, const std::vector<double>& weights) {
  std::optional<double> best;
  for (const auto& s : exclusive_subsets(inst)) {
    if (!select::is_valid_cover(inst, s)) continue;
    double c = 0.0;
    for (std::size_t l : s) c += select::weighted_cost(inst, l, weights);
    if (!best || c < *best) best = c;
  }
  return best;
}

CodeiEnumeration enumerate_codei(codesign::CodeiModel& model, double speed_kmh, double range_m) {
  using design::snap;
  const auto& cat = model.problem().catalog;
  CodeiEnumeration out;
  for (const auto& b : cat.bodies)
    for (const auto& pl : cat.planners) {
      const auto& run = model.run(pl.id, b.id);
      if (!run.reached) {
        out.tuples += cat.computers.size();
        continue;
      }
      auto designs = model.front_designs(pl.id, b.id, b.id);
      out.tuples += designs.size() * cat.computers.size();
      if (run.speed_kmh < speed_kmh || b.driving_range < range_m) continue;
      for (const auto& ids : designs) {
        double price = 0, mass = 0, power = 0, gf = 0;
        for (const auto& id : ids) {
          const auto& pp = model.pipeline_of(id);
          price += pp.price;
          mass += pp.mass;
          power += pp.power;
          gf += pp.detector_gflops;
        }
        price = snap(price), mass = snap(mass), power = snap(power), gf = snap(gf);
        const double compute = snap(run.compute_gflops + gf);
        for (const auto& c : cat.computers) {
          if (c.gflops < compute) continue;
          const double m = snap(mass + c.mass), w = snap(power + c.power);
          if (m > b.payload_max || w > b.aux_power) continue;
          out.feasible.push_back({b.id, pl.id, c.id, ids,
                                  {snap(price + c.price), m, w, compute, b.fixed_cost,
                                   snap(b.op_cost * run.distance_m)}});
        }
      }
    }
  for (const auto& d : out.feasible) {
    bool dominated = false;
    for (const auto& e : out.feasible) {
      bool leq = true, strict = false;
      for (std::size_t i = 0; i < d.resources.size(); ++i) {
        leq = leq && e.resources[i] <= d.resources[i];
        strict = strict || e.resources[i] < d.resources[i];
      }
      dominated = dominated || (leq && strict);
    }
    if (!dominated) out.front.push_back(d.resources);
  }
  std::sort(out.front.begin(), out.front.end());
  out.front.erase(std::unique(out.front.begin(), out.front.end()), out.front.end());
  return out;
}

}  // namespace codei::oracle

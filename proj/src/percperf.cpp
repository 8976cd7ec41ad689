#include "codei/percperf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace codei::percperf {

using geom::kPi;
using geom::kTwoPi;
using geom::normalize_angle;
using geom::Vec2;

std::string to_string(SensorKind k) { return k == SensorKind::lidar ? "lidar" : "camera"; }

SensorKind sensor_kind_from_string(const std::string& s) {
  if (s == "lidar") return SensorKind::lidar;
  if (s == "camera") return SensorKind::camera;
  throw std::invalid_argument("unknown sensor kind: " + s);
}

void PerfCalib::validate() const {
  if (!(pseudo_count > 0)) throw std::invalid_argument("PerfCalib: pseudo_count must be > 0");
  for (int i = 0; i < kFeatures; ++i)
    if (!std::isfinite(fnr[i]) || !std::isfinite(fpr[i]))
      throw std::invalid_argument("PerfCalib: coefficients must be finite");
}

void PerceptionPipeline::validate() const {
  if (id.empty()) throw std::invalid_argument("pipeline without id");
  if (!(fov_h > 0 && fov_h <= kTwoPi + 1e-12) || !(fov_v > 0 && fov_v < kPi))
    throw std::invalid_argument("pipeline " + id + ": bad field of view");
  if (!(range_max > 0) || n_azimuth < 1 || n_elevation < 1)
    throw std::invalid_argument("pipeline " + id + ": bad range or resolution");
  calib.validate();
}

std::string MountedPipeline::id() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "@%.6g/%.6g", yaw, pitch);
  return pipeline_id + "/" + body_id + "/" + mount + buf;
}

namespace {

Vec3 sensor_origin(const RobotBody& body, const MountedPipeline& m) {
  return body.mount(m.mount).position;
}

Vec3 direction(double az, double el, double yaw, double pitch) {
  double cx = std::cos(el) * std::cos(az), cy = std::cos(el) * std::sin(az), cz = std::sin(el);
  double px = cx * std::cos(pitch) + cz * std::sin(pitch);
  double pz = -cx * std::sin(pitch) + cz * std::cos(pitch);
  return {px * std::cos(yaw) - cy * std::sin(yaw), px * std::sin(yaw) + cy * std::cos(yaw), pz};
}

double ray_azimuth(const PerceptionPipeline& pp, int i) {
  return -0.5 * pp.fov_h + (i + 0.5) * pp.fov_h / pp.n_azimuth;
}
double ray_elevation(const PerceptionPipeline& pp, int j) {
  return -0.5 * pp.fov_v + (j + 0.5) * pp.fov_v / pp.n_elevation;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entry parameter of the ray into the box, +inf on a miss. Origin inside gives 0.
double ray_box(const Vec3& o, const Vec3& d, const TargetBox& b) {
  double c = std::cos(b.pose.theta), s = std::sin(b.pose.theta);
  double ox = o.x - b.pose.x, oy = o.y - b.pose.y;
  double lo[3] = {-0.5 * b.length, -0.5 * b.width, 0.0};
  double hi[3] = {0.5 * b.length, 0.5 * b.width, b.height};
  double oo[3] = {c * ox + s * oy, -s * ox + c * oy, o.z};
  double dd[3] = {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
  double t0 = 0.0, t1 = kInf;
  for (int k = 0; k < 3; ++k) {
    if (dd[k] == 0.0) {
      if (oo[k] < lo[k] || oo[k] > hi[k]) return kInf;
      continue;
    }
    double ta = (lo[k] - oo[k]) / dd[k], tb = (hi[k] - oo[k]) / dd[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return kInf;
  }
  return t0;
}

// Parametric interval of the ray line inside an extruded convex polygon.
bool ray_prism(const Vec3& o, const Vec3& d, const planner::Extrusion& e, double& t_in,
               double& t_out) {
  t_in = -kInf;
  t_out = kInf;
  const auto& v = e.footprint.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec2 a = v[i], b = v[(i + 1) % v.size()];
    Vec2 n{b.y - a.y, a.x - b.x};  // outward for CCW
    double num = n.x * (o.x - a.x) + n.y * (o.y - a.y);
    double den = n.x * d.x + n.y * d.y;
    if (den == 0.0) {
      if (num > 0) return false;
      continue;
    }
    double t = -num / den;
    if (den < 0) t_in = std::max(t_in, t);
    else t_out = std::min(t_out, t);
    if (t_in > t_out) return false;
  }
  if (d.z == 0.0) {
    if (o.z < 0.0 || o.z > e.height) return false;
  } else {
    double ta = (0.0 - o.z) / d.z, tb = (e.height - o.z) / d.z;
    if (ta > tb) std::swap(ta, tb);
    t_in = std::max(t_in, ta);
    t_out = std::min(t_out, tb);
  }
  return t_in <= t_out;
}

// Grazing contact and passages behind the target do not block.
bool occluded(const Vec3& o, const Vec3& d, const RobotBody& body, double t_hit) {
  for (const auto& e : body.height_profile) {
    double a, b;
    if (!ray_prism(o, d, e, a, b)) continue;
    if (b - a > 1e-9 && b > 1e-9 && a < t_hit) return true;
  }
  return false;
}

void trace(const Vec3& o, const Vec3& d, const PerceptionPipeline& pp, const RobotBody& body,
           const TargetBox& target, VisibilityReport& rep) {
  double t = ray_box(o, d, target);
  if (!(t <= pp.range_max)) return;
  ++rep.unoccluded_count;
  if (t == 0.0 || !occluded(o, d, body, t)) ++rep.hit_count;
}

void finish(VisibilityReport& rep) {
  rep.in_fov = rep.unoccluded_count > 0;
  rep.visible_fraction =
      rep.unoccluded_count > 0 ? double(rep.hit_count) / rep.unoccluded_count : 0.0;
}

// Inclusive index range of grid angles a_k = lo + (k + 0.5) * step within [a, b], padded by one.
std::pair<int, int> index_window(double a, double b, double lo, double step, int n) {
  int k0 = static_cast<int>(std::floor((a - lo) / step - 0.5)) - 1;
  int k1 = static_cast<int>(std::ceil((b - lo) / step - 0.5)) + 1;
  return {std::max(k0, 0), std::min(k1, n - 1)};
}

}  // namespace

std::vector<Ray> sensor_rays(const PerceptionPipeline& pp, const RobotBody& body,
                             const MountedPipeline& m) {
  std::vector<Ray> out;
  Vec3 o = sensor_origin(body, m);
  for (int j = 0; j < pp.n_elevation; ++j)
    for (int i = 0; i < pp.n_azimuth; ++i) {
      double az = ray_azimuth(pp, i), el = ray_elevation(pp, j);
      out.push_back({o, direction(az, el, m.yaw, m.pitch), az, el});
    }
  return out;
}

Pose2 sensor_pose2(const RobotBody& body, const MountedPipeline& m) {
  Vec3 o = sensor_origin(body, m);
  return geom::make_pose(o.x, o.y, m.yaw);
}

TargetBox target_box(const Pose2& q, const Appearance& a) {
  return {q, a.length, a.width, a.height};
}

VisibilityReport cast_rays_all(const PerceptionPipeline& pp, const RobotBody& body,
                               const MountedPipeline& m, const TargetBox& target) {
  VisibilityReport rep;
  for (const Ray& r : sensor_rays(pp, body, m)) trace(r.origin, r.dir, pp, body, target, rep);
  finish(rep);
  return rep;
}

VisibilityReport cast_rays(const PerceptionPipeline& pp, const RobotBody& body,
                           const MountedPipeline& m, const TargetBox& target) {
  if (m.pitch != 0.0) return cast_rays_all(pp, body, m, target);
  const Vec3 o = sensor_origin(body, m);
  // Target corners in the yawed sensor frame.
  const double cy = std::cos(m.yaw), sy = std::sin(m.yaw);
  auto to_sensor = [&](Vec2 p) {
    double x = p.x - o.x, y = p.y - o.y;
    return Vec2{cy * x + sy * y, -sy * x + cy * y};
  };
  auto fp = geom::Footprint::rectangle(target.length, target.width).placed(target.pose);
  std::vector<Vec2> corners;
  for (Vec2 p : fp) corners.push_back(to_sensor(p));
  double dmin = geom::distance_to_convex(corners, {0, 0});
  double dmax = 0.0;
  for (Vec2 c : corners) dmax = std::max(dmax, geom::norm(c));
  if (dmin > pp.range_max) {
    VisibilityReport rep;
    finish(rep);
    return rep;
  }

  const double zlo = -o.z, zhi = target.height - o.z;
  double el_lo = std::min({std::atan2(zlo, dmin), std::atan2(zlo, dmax)});
  double el_hi = std::max({std::atan2(zhi, dmin), std::atan2(zhi, dmax)});
  auto [j0, j1] = index_window(el_lo, el_hi, -0.5 * pp.fov_v, pp.fov_v / pp.n_elevation,
                               pp.n_elevation);

  std::vector<int> cols;
  const double az_step = pp.fov_h / pp.n_azimuth, az_lo = -0.5 * pp.fov_h;
  if (dmin <= 1e-9) {
    for (int i = 0; i < pp.n_azimuth; ++i) cols.push_back(i);
  } else {
    Vec2 c = to_sensor({target.pose.x, target.pose.y});
    double ac = std::atan2(c.y, c.x), dlo = 0.0, dhi = 0.0;
    for (Vec2 p : corners) {
      double da = normalize_angle(std::atan2(p.y, p.x) - ac);
      dlo = std::min(dlo, da);
      dhi = std::max(dhi, da);
    }
    for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
      auto [i0, i1] = index_window(ac + dlo + shift, ac + dhi + shift, az_lo, az_step, pp.n_azimuth);
      for (int i = i0; i <= i1; ++i) cols.push_back(i);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  }

  VisibilityReport rep;
  for (int j = j0; j <= j1; ++j) {
    double el = ray_elevation(pp, j);
    for (int i : cols) trace(o, direction(ray_azimuth(pp, i), el, m.yaw, 0.0), pp, body, target, rep);
  }
  finish(rep);
  return rep;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Coeffs features(const Pose2& q, const Appearance& a, EnvCondition env,
                const VisibilityReport& vis) {
  return {1.0,
          std::hypot(q.x, q.y),
          std::abs(std::atan2(q.y, q.x)),
          vis.visible_fraction,
          std::log1p(static_cast<double>(vis.hit_count)),
          env.light == world::Light::night ? 1.0 : 0.0,
          env.weather == world::Weather::rain ? 1.0 : 0.0,
          std::cbrt(a.length * a.width * a.height)};
}

double linear_predictor(const Coeffs& c, const Coeffs& f) {
  double s = 0.0;
  for (int i = 0; i < kFeatures; ++i) s += c[i] * f[i];
  return s;
}

Interval wilson(double p, double n) {
  if (std::isinf(n)) return {p, p};
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = kWilsonZ / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  double lo = std::clamp(center - half, 0.0, 1.0), hi = std::clamp(center + half, 0.0, 1.0);
  return {std::min(lo, p), std::max(hi, p)};
}

PerfIntervals ppp(const Pose2& q, const Appearance& a, const PerceptionPipeline& pp,
                  EnvCondition env, const VisibilityReport& vis) {
  if (!vis.in_fov || vis.hit_count == 0) return {{1.0, 1.0}, {0.0, 0.0}};
  Coeffs f = features(q, a, env, vis);
  const auto& c = pp.calib;
  return {wilson(logistic(linear_predictor(c.fnr, f)), c.pseudo_count),
          wilson(logistic(linear_predictor(c.fpr, f)), c.pseudo_count)};
}

namespace {
std::size_t n_points(const PolarGridSpec& g) {
  return std::size_t(g.n_radial) * g.n_angular + std::size_t(g.n_radial + 1) * g.n_angular;
}
}  // namespace

std::vector<Pose2> representative_poses(const PolarGridSpec& g) {
  std::vector<Vec2> pts;
  for (int i = 0; i < g.n_radial; ++i)
    for (int j = 0; j < g.n_angular; ++j) pts.push_back(geom::cell_representative_points(g, i, j)[0]);
  for (int i = 0; i <= g.n_radial; ++i)
    for (int j = 0; j < g.n_angular; ++j) {
      double r = g.radial_edge(i), a = g.azimuth_edge(j);
      pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
  std::vector<Pose2> out;
  out.reserve(pts.size() * g.n_theta);
  for (Vec2 p : pts)
    for (int k = 0; k < g.n_theta; ++k) out.push_back({p.x, p.y, g.theta_edge(k)});
  return out;
}

std::array<std::size_t, 10> cell_representatives(const PolarGridSpec& g, const geom::Cell& c) {
  const std::size_t na = g.n_angular, nt = g.n_theta;
  const std::size_t corner0 = std::size_t(g.n_radial) * na;
  const std::size_t j1 = (c.angular + 1) % na, k1 = (c.theta + 1) % nt;
  std::size_t pts[5] = {c.radial * na + c.angular, corner0 + c.radial * na + c.angular,
                        corner0 + c.radial * na + j1, corner0 + (c.radial + 1) * na + c.angular,
                        corner0 + (c.radial + 1) * na + j1};
  std::array<std::size_t, 10> out{};
  for (int p = 0; p < 5; ++p) {
    out[2 * p] = pts[p] * nt + c.theta;
    out[2 * p + 1] = pts[p] * nt + k1;
  }
  return out;
}

namespace {
VisibilityTable visibility_impl(const Appearance& a, const PerceptionPipeline& pp,
                                const RobotBody& body, const MountedPipeline& m,
                                const PolarGridSpec& grid, bool parallel) {
  grid.validate();
  VisibilityTable vt;
  vt.grid = grid;
  auto reps = representative_poses(grid);
  const Pose2 sensor = sensor_pose2(body, m);
  vt.q_sensor.resize(reps.size());
  vt.vis.resize(reps.size());
  const long n = static_cast<long>(reps.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (long i = 0; i < n; ++i) {
    vt.q_sensor[i] = geom::se2_relative(sensor, reps[i]);
    vt.vis[i] = cast_rays(pp, body, m, target_box(reps[i], a));
  }
  return vt;
}
}  // namespace

VisibilityTable visibility_table(const Appearance& a, const PerceptionPipeline& pp,
                                 const RobotBody& body, const MountedPipeline& m,
                                 const PolarGridSpec& grid) {
  return visibility_impl(a, pp, body, m, grid, true);
}

VisibilityTable visibility_table_serial(const Appearance& a, const PerceptionPipeline& pp,
                                        const RobotBody& body, const MountedPipeline& m,
                                        const PolarGridSpec& grid) {
  return visibility_impl(a, pp, body, m, grid, false);
}

CoverageTable coverage_table(const VisibilityTable& vt, const Appearance& a,
                             const PerceptionPipeline& pp, EnvCondition env) {
  const auto& g = vt.grid;
  if (vt.vis.size() != n_points(g) * g.n_theta)
    throw std::invalid_argument("coverage_table: visibility table does not match its grid");
  std::vector<double> rep_worst(vt.vis.size());
  for (std::size_t i = 0; i < vt.vis.size(); ++i) {
    auto iv = ppp(vt.q_sensor[i], a, pp, env, vt.vis[i]);
    rep_worst[i] = std::max(iv.fnr.hi, iv.fpr.hi);
  }
  CoverageTable ct{g, std::vector<double>(g.cell_count(), 0.0)};
  for (int r = 0; r < g.n_radial; ++r)
    for (int j = 0; j < g.n_angular; ++j)
      for (int k = 0; k < g.n_theta; ++k) {
        geom::Cell c{std::uint16_t(r), std::uint16_t(j), std::uint16_t(k)};
        double w = 0.0;
        for (std::size_t idx : cell_representatives(g, c)) w = std::max(w, rep_worst[idx]);
        ct.worst[geom::cell_index(g, c)] = w;
      }
  return ct;
}

CellSet CoverageTable::covered(double epsilon) const {
  std::vector<geom::Cell> cells;
  for (int r = 0; r < grid.n_radial; ++r)
    for (int j = 0; j < grid.n_angular; ++j)
      for (int k = 0; k < grid.n_theta; ++k) {
        geom::Cell c{std::uint16_t(r), std::uint16_t(j), std::uint16_t(k)};
        if (worst[geom::cell_index(grid, c)] < epsilon) cells.push_back(c);
      }
  return CellSet(grid, std::move(cells));
}

CellSet mppcc(const Appearance& a, const PerceptionPipeline& pp, const RobotBody& body,
              const MountedPipeline& m, EnvCondition env, double epsilon,
              const PolarGridSpec& grid) {
  return coverage_table(visibility_table(a, pp, body, m, grid), a, pp, env).covered(epsilon);
}

CellSet class_coverage(const world::ObjectClass& cls, const PerceptionPipeline& pp,
                       const RobotBody& body, const MountedPipeline& m, EnvCondition env,
                       double epsilon, const PolarGridSpec& grid) {
  if (cls.appearances.empty()) return CellSet(grid);
  CellSet out = mppcc(cls.appearances[0].appearance, pp, body, m, env, epsilon, grid);
  for (std::size_t i = 1; i < cls.appearances.size(); ++i)
    out = out.intersect(mppcc(cls.appearances[i].appearance, pp, body, m, env, epsilon, grid));
  return out;
}

}  // namespace codei::percperf

#include "codei/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "codei/hash.hpp"

namespace codei::geom {

namespace {
constexpr double kSatTol = 1e-9;

struct Interval1 {
  double lo, hi;
};

Interval1 project(std::span<const Vec2> poly, Vec2 axis) {
  Interval1 r{dot(poly[0], axis), dot(poly[0], axis)};
  for (std::size_t i = 1; i < poly.size(); ++i) {
    double d = dot(poly[i], axis);
    r.lo = std::min(r.lo, d);
    r.hi = std::max(r.hi, d);
  }
  return r;
}

// Returns true when some edge normal of `edges_of` separates a and b.
template <bool Strict>
bool has_separating_axis(std::span<const Vec2> edges_of, std::span<const Vec2> a,
                         std::span<const Vec2> b) {
  const std::size_t n = edges_of.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 e = edges_of[(i + 1) % n] - edges_of[i];
    double len = norm(e);
    if (len == 0.0) continue;
    Vec2 axis{e.y / len, -e.x / len};
    Interval1 pa = project(a, axis);
    Interval1 pb = project(b, axis);
    if constexpr (Strict) {
      if (pa.hi <= pb.lo + kSatTol || pb.hi <= pa.lo + kSatTol) return true;
    } else {
      if (pa.hi < pb.lo - kSatTol || pb.hi < pa.lo - kSatTol) return true;
    }
  }
  return false;
}

template <bool Strict>
bool overlap_impl(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) return false;
  if (has_separating_axis<Strict>(a, a, b)) return false;
  if (has_separating_axis<Strict>(b, a, b)) return false;
  return true;
}
}  // namespace

double normalize_angle(double a) {
  if (!std::isfinite(a)) throw std::invalid_argument("normalize_angle: non-finite angle");
  if (a >= -kPi && a < kPi) return a;
  double r = a - kTwoPi * std::floor((a + kPi) / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r = -kPi;
  return r;
}

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Pose2 make_pose(double x, double y, double theta) { return {x, y, normalize_angle(theta)}; }

Pose2 se2_compose(const Pose2& a, const Pose2& b) {
  double c = std::cos(a.theta), s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, normalize_angle(a.theta + b.theta)};
}

Pose2 se2_inverse(const Pose2& a) {
  double c = std::cos(a.theta), s = std::sin(a.theta);
  return {-(c * a.x + s * a.y), s * a.x - c * a.y, normalize_angle(-a.theta)};
}

Pose2 se2_relative(const Pose2& a, const Pose2& b) {
  double c = std::cos(a.theta), s = std::sin(a.theta);
  double dx = b.x - a.x, dy = b.y - a.y;
  return {c * dx + s * dy, -s * dx + c * dy, normalize_angle(b.theta - a.theta)};
}

Vec2 transform_point(const Pose2& p, Vec2 v) {
  double c = std::cos(p.theta), s = std::sin(p.theta);
  return {p.x + c * v.x - s * v.y, p.y + s * v.x + c * v.y};
}

Footprint::Footprint(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("Footprint: needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& v = vertices_[i];
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw std::invalid_argument("Footprint: non-finite vertex");
    Vec2 e1 = vertices_[(i + 1) % n] - v;
    Vec2 e2 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (cross(e1, e2) <= 0.0)
      throw std::invalid_argument("Footprint: vertices must be strictly convex and CCW");
  }
  if (area() <= 0.0) throw std::invalid_argument("Footprint: zero area");
  for (const Vec2& v : vertices_) circumradius_ = std::max(circumradius_, norm(v));
}

Footprint Footprint::rectangle(double length, double width) {
  return rectangle(-length / 2, -width / 2, length / 2, width / 2);
}

Footprint Footprint::rectangle(double x_min, double y_min, double x_max, double y_max) {
  return Footprint({{x_min, y_min}, {x_max, y_min}, {x_max, y_max}, {x_min, y_max}});
}

Footprint Footprint::regular(double radius, int n) {
  std::vector<Vec2> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    double a = kTwoPi * i / n;
    v.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return Footprint(std::move(v));
}

std::vector<Vec2> Footprint::placed(const Pose2& pose) const {
  std::vector<Vec2> out;
  out.reserve(vertices_.size());
  for (const Vec2& v : vertices_) out.push_back(transform_point(pose, v));
  return out;
}

double Footprint::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  return 0.5 * a;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool convex_overlap(std::span<const Vec2> a, std::span<const Vec2> b) {
  return overlap_impl<false>(a, b);
}

bool convex_overlap_strict(std::span<const Vec2> a, std::span<const Vec2> b) {
  return overlap_impl<true>(a, b);
}

bool footprints_overlap(const Footprint& f1, const Pose2& p1, const Footprint& f2,
                        const Pose2& p2) {
  if (f1.empty() || f2.empty()) return false;
  double d = std::hypot(p1.x - p2.x, p1.y - p2.y);
  if (d > f1.circumradius() + f2.circumradius() + kSatTol) return false;
  auto a = f1.placed(p1);
  auto b = f2.placed(p2);
  return convex_overlap(a, b);
}

bool footprints_overlap_strict(const Footprint& f1, const Pose2& p1, const Footprint& f2,
                               const Pose2& p2) {
  if (f1.empty() || f2.empty()) return false;
  double d = std::hypot(p1.x - p2.x, p1.y - p2.y);
  if (d >= f1.circumradius() + f2.circumradius()) return false;
  auto a = f1.placed(p1);
  auto b = f2.placed(p2);
  return convex_overlap_strict(a, b);
}

bool point_in_convex(std::span<const Vec2> poly, Vec2 p) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(poly[(i + 1) % n] - poly[i], p - poly[i]) < -kSatTol) return false;
  }
  return true;
}

double distance_to_convex(std::span<const Vec2> poly, Vec2 p) {
  if (point_in_convex(poly, p)) return 0.0;
  double best = INFINITY;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    Vec2 ab = b - a;
    double L2 = dot(ab, ab);
    double t = L2 > 0 ? std::clamp(dot(p - a, ab) / L2, 0.0, 1.0) : 0.0;
    best = std::min(best, norm(p - (a + t * ab)));
  }
  return best;
}

Vec2 centroid(std::span<const Vec2> poly) {
  Vec2 c;
  for (const Vec2& v : poly) c = c + v;
  return poly.empty() ? c : (1.0 / poly.size()) * c;
}

void PolarGridSpec::validate() const {
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
    throw std::invalid_argument("PolarGridSpec: need 0 < r_min < r_max");
  if (n_radial < 1 || n_angular < 1 || n_theta < 1 || n_radial > 65535 || n_angular > 65535 ||
      n_theta > 65535)
    throw std::invalid_argument("PolarGridSpec: bin counts must be in [1, 65535]");
}

double PolarGridSpec::radial_edge(int i) const {
  if (i <= 0) return r_min;
  if (i >= n_radial) return r_max;
  return r_min * std::pow(r_max / r_min, static_cast<double>(i) / n_radial);
}

double PolarGridSpec::azimuth_edge(int j) const { return -kPi + kTwoPi * j / n_angular; }

double PolarGridSpec::theta_edge(int k) const { return -kPi + kTwoPi * k / n_theta; }

int PolarGridSpec::radial_index(double r) const {
  if (!(r >= r_min) || !(r < r_max)) return -1;
  int i = static_cast<int>(std::floor(n_radial * std::log(r / r_min) / std::log(r_max / r_min)));
  i = std::clamp(i, 0, n_radial - 1);
  while (i > 0 && r < radial_edge(i)) --i;
  while (i < n_radial - 1 && r >= radial_edge(i + 1)) ++i;
  return i;
}

namespace {
int uniform_bin(double a, int n) {
  a = normalize_angle(a);
  int j = static_cast<int>(std::floor((a + kPi) / (kTwoPi / n)));
  j = std::clamp(j, 0, n - 1);
  auto edge = [n](int k) { return -kPi + kTwoPi * k / n; };
  while (j > 0 && a < edge(j)) --j;
  while (j < n - 1 && a >= edge(j + 1)) ++j;
  return j;
}
}  // namespace

int PolarGridSpec::angular_index(double azimuth) const { return uniform_bin(azimuth, n_angular); }

int PolarGridSpec::theta_index(double theta) const { return uniform_bin(theta, n_theta); }

std::size_t PolarGridSpec::cell_count() const {
  return static_cast<std::size_t>(n_radial) * n_angular * n_theta;
}

std::uint64_t PolarGridSpec::hash() const {
  std::uint64_t h = 0x6772696400000000ULL;
  h = hash_double(h, r_min);
  h = hash_double(h, r_max);
  h = hash_mix(h, n_radial);
  h = hash_mix(h, n_angular);
  h = hash_mix(h, n_theta);
  return h;
}

std::optional<Cell> cell_of(const PolarGridSpec& grid, const Pose2& q) {
  int i = grid.radial_index(std::hypot(q.x, q.y));
  if (i < 0) return std::nullopt;
  int j = grid.angular_index(std::atan2(q.y, q.x));
  int k = grid.theta_index(q.theta);
  return Cell{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
              static_cast<std::uint16_t>(k)};
}

Cell clamped_cell_of(const PolarGridSpec& grid, const Pose2& q) {
  double r = std::hypot(q.x, q.y);
  int i;
  if (r < grid.r_min)
    i = 0;
  else if (r >= grid.r_max)
    i = grid.n_radial - 1;
  else
    i = grid.radial_index(r);
  int j = grid.angular_index(std::atan2(q.y, q.x));
  int k = grid.theta_index(q.theta);
  return Cell{static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
              static_cast<std::uint16_t>(k)};
}

std::size_t cell_index(const PolarGridSpec& grid, const Cell& c) {
  return (static_cast<std::size_t>(c.radial) * grid.n_angular + c.angular) * grid.n_theta + c.theta;
}

std::array<Vec2, 5> cell_representative_points(const PolarGridSpec& grid, int radial,
                                               int angular) {
  double r0 = grid.radial_edge(radial), r1 = grid.radial_edge(radial + 1);
  double a0 = grid.azimuth_edge(angular), a1 = grid.azimuth_edge(angular + 1);
  double rc = 0.5 * (r0 + r1), ac = 0.5 * (a0 + a1);
  auto pt = [](double r, double a) { return Vec2{r * std::cos(a), r * std::sin(a)}; };
  return {pt(rc, ac), pt(r0, a0), pt(r0, a1), pt(r1, a0), pt(r1, a1)};
}

CellSet::CellSet(const PolarGridSpec& grid, std::vector<Cell> cells)
    : grid_(grid), cells_(std::move(cells)) {
  for (const Cell& c : cells_) check_cell(c);
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

void CellSet::check_cell(const Cell& c) const {
  if (c.radial >= grid_.n_radial || c.angular >= grid_.n_angular || c.theta >= grid_.n_theta)
    throw std::out_of_range("CellSet: cell index outside grid");
}

bool CellSet::contains(const Cell& c) const {
  return std::binary_search(cells_.begin(), cells_.end(), c);
}

void CellSet::insert(const Cell& c) {
  check_cell(c);
  auto it = std::lower_bound(cells_.begin(), cells_.end(), c);
  if (it == cells_.end() || *it != c) cells_.insert(it, c);
}

void CellSet::merge(const CellSet& other) {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("CellSet::merge: grid mismatch");
  std::vector<Cell> out;
  out.reserve(cells_.size() + other.cells_.size());
  std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                 std::back_inserter(out));
  cells_ = std::move(out);
}

CellSet CellSet::intersect(const CellSet& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("CellSet::intersect: grid mismatch");
  CellSet r(grid_);
  std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(r.cells_));
  return r;
}

CellSet CellSet::difference(const CellSet& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("CellSet::difference: grid mismatch");
  CellSet r(grid_);
  std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                      std::back_inserter(r.cells_));
  return r;
}

bool cellset_subset(const CellSet& a, const CellSet& b) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument("cellset_subset: cell sets live on different grids");
  return std::includes(b.cells().begin(), b.cells().end(), a.cells().begin(), a.cells().end());
}

}  // namespace codei::geom

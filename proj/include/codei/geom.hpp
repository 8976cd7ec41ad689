#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace codei::geom {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps into [-pi, pi).
double normalize_angle(double a);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

Pose2 make_pose(double x, double y, double theta);
Pose2 se2_compose(const Pose2& a, const Pose2& b);
Pose2 se2_inverse(const Pose2& a);
// Pose of b expressed in the frame of a, i.e. inverse(a) o b.
Pose2 se2_relative(const Pose2& a, const Pose2& b);
Vec2 transform_point(const Pose2& p, Vec2 v);

class Footprint {
 public:
  Footprint() = default;
  // Vertices must be strictly convex and counter-clockwise.
  explicit Footprint(std::vector<Vec2> vertices);

  static Footprint rectangle(double length, double width);
  static Footprint rectangle(double x_min, double y_min, double x_max, double y_max);
  // Regular polygon inscribed in a circle of the given radius.
  static Footprint regular(double radius, int n);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }
  std::vector<Vec2> placed(const Pose2& pose) const;
  double area() const;
  double circumradius() const { return circumradius_; }

 private:
  std::vector<Vec2> vertices_;
  double circumradius_ = 0.0;
};

std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// Separating-axis tests on convex CCW polygons. The inclusive variant counts
// boundary contact as overlap; the strict variant needs a shared interior.
bool convex_overlap(std::span<const Vec2> a, std::span<const Vec2> b);
bool convex_overlap_strict(std::span<const Vec2> a, std::span<const Vec2> b);

bool footprints_overlap(const Footprint& f1, const Pose2& p1, const Footprint& f2, const Pose2& p2);
bool footprints_overlap_strict(const Footprint& f1, const Pose2& p1, const Footprint& f2,
                               const Pose2& p2);

// Boundary counts as inside.
bool point_in_convex(std::span<const Vec2> poly, Vec2 p);
double distance_to_convex(std::span<const Vec2> poly, Vec2 p);
Vec2 centroid(std::span<const Vec2> poly);

struct PolarGridSpec {
  double r_min = 1.0;
  double r_max = 64.0;
  int n_radial = 12;
  int n_angular = 32;
  int n_theta = 8;

  void validate() const;
  double radial_edge(int i) const;
  double azimuth_edge(int j) const;
  double theta_edge(int k) const;
  // -1 when outside [r_min, r_max).
  int radial_index(double r) const;
  int angular_index(double azimuth) const;
  int theta_index(double theta) const;
  std::size_t cell_count() const;
  std::uint64_t hash() const;

  bool operator==(const PolarGridSpec&) const = default;
};

struct Cell {
  std::uint16_t radial = 0;
  std::uint16_t angular = 0;
  std::uint16_t theta = 0;

  auto operator<=>(const Cell&) const = default;
};

std::optional<Cell> cell_of(const PolarGridSpec& grid, const Pose2& q);
// Like cell_of, but r < r_min lands in radial bin 0 and r >= r_max in the last one.
Cell clamped_cell_of(const PolarGridSpec& grid, const Pose2& q);
std::size_t cell_index(const PolarGridSpec& grid, const Cell& c);

// Center plus the four radial/azimuth corners of a cell, as points.
std::array<Vec2, 5> cell_representative_points(const PolarGridSpec& grid, int radial, int angular);

class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(const PolarGridSpec& grid) : grid_(grid) {}
  CellSet(const PolarGridSpec& grid, std::vector<Cell> cells);

  const PolarGridSpec& grid() const { return grid_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool contains(const Cell& c) const;

  void insert(const Cell& c);
  void merge(const CellSet& other);
  CellSet intersect(const CellSet& other) const;
  CellSet difference(const CellSet& other) const;

  bool operator==(const CellSet& o) const { return grid_ == o.grid_ && cells_ == o.cells_; }

 private:
  void check_cell(const Cell& c) const;

  PolarGridSpec grid_;
  std::vector<Cell> cells_;
};

// Throws std::invalid_argument when the grids differ.
bool cellset_subset(const CellSet& a, const CellSet& b);

}  // namespace codei::geom

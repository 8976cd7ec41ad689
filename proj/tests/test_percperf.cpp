#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "codei/oracle.hpp"
#include "codei/percperf.hpp"
#include "fixtures.hpp"

using namespace codei;
using namespace codei::percperf;
using geom::kPi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PerceptionPipeline lidar(int n_az = 120, int n_el = 8) {
  PerceptionPipeline p;
  p.id = "lidar";
  p.n_azimuth = n_az;
  p.n_elevation = n_el;
  p.fov_v = 0.5;
  p.range_max = 40;
  p.calib.fnr = {-3, 0.05, 0.1, -1, -0.3, 0.5, 0.4, -0.2};
  p.calib.fpr = {-4, 0.03, 0, -0.5, -0.1, 0.2, 0.6, 0};
  return p;
}

PerceptionPipeline camera() {
  PerceptionPipeline p = lidar(90, 12);
  p.id = "camera";
  p.kind = SensorKind::camera;
  p.fov_h = kPi / 2;
  p.fov_v = 0.6;
  return p;
}

// Perfect detector: every target with a hit gets intervals [0, 0].
PerceptionPipeline perfect(PerceptionPipeline p) {
  p.calib.fnr = {-800, 0, 0, 0, 0, 0, 0, 0};
  p.calib.fpr = p.calib.fnr;
  p.calib.pseudo_count = kInf;
  return p;
}

MountedPipeline on(const std::string& mount, double yaw = 0.0, double pitch = 0.0) {
  return {"p", "small", mount, yaw, pitch};
}

world::Appearance car_look() { return fixtures::car_class().appearances[0].appearance; }

Pose2 random_target(std::mt19937_64& rng, double rmax = 30) {
  std::uniform_real_distribution<double> r(0.5, rmax), a(-kPi, kPi);
  double rr = r(rng), aa = a(rng);
  return {rr * std::cos(aa), rr * std::sin(aa), a(rng)};
}

// Cylinder-like body, symmetric under 45 degree rotations.
planner::RobotBody drum() {
  planner::RobotBody b = fixtures::small_car();
  b.footprint = geom::Footprint::regular(1.5, 64);
  b.height_profile = {{b.footprint, 1.2}};
  b.mount_points = {{"top", {0, 0, 1.4}}};
  return b;
}

geom::Cell rotated(const geom::Cell& c, const geom::PolarGridSpec& g, int da, int dt) {
  return {c.radial, std::uint16_t((c.angular + da) % g.n_angular),
          std::uint16_t((c.theta + dt) % g.n_theta)};
}

}  // namespace

TEST_CASE("ppp forced decision without hits") {
  auto pp = lidar();
  VisibilityReport none;
  auto iv = ppp({5, 0, 0}, car_look(), pp, {}, none);
  CHECK(iv.fnr.lo == 1.0);
  CHECK(iv.fnr.hi == 1.0);
  CHECK(iv.fpr.lo == 0.0);
  CHECK(iv.fpr.hi == 0.0);
  VisibilityReport fov_only{0, 10, 0.0, true};
  CHECK(ppp({5, 0, 0}, car_look(), pp, {}, fov_only).fnr.lo == 1.0);
}

TEST_CASE("bias-only calibration gives the logistic of the bias") {
  PerceptionPipeline pp = lidar();
  pp.calib.fnr = {};
  pp.calib.fpr = {};
  pp.calib.pseudo_count = kInf;
  VisibilityReport vis{5, 10, 0.5, true};
  auto iv = ppp({5, 1, 0}, car_look(), pp, {}, vis);
  CHECK(iv.fnr.lo == 0.5);
  CHECK(iv.fnr.hi == 0.5);
  pp.calib.fnr[0] = 1.3;
  iv = ppp({5, 1, 0}, car_look(), pp, {}, vis);
  CHECK(iv.fnr.lo == doctest::Approx(1 / (1 + std::exp(-1.3))).epsilon(1e-15));

  // Finite pseudo count: Wilson interval around 0.5, symmetric.
  pp.calib.fnr[0] = 0.0;
  pp.calib.pseudo_count = 100;
  iv = ppp({5, 1, 0}, car_look(), pp, {}, vis);
  const double z = kWilsonZ;
  const double half = z / (1 + z * z / 100) * std::sqrt(0.25 / 100 + z * z / 40000);
  CHECK(iv.fnr.lo == doctest::Approx(0.5 - half).epsilon(1e-12));
  CHECK(iv.fnr.hi == doctest::Approx(0.5 + half).epsilon(1e-12));
}

TEST_CASE("fnr upper bound grows with range under a positive range coefficient") {
  PerceptionPipeline pp = lidar();
  VisibilityReport vis{20, 20, 1.0, true};
  auto near_iv = ppp({5, 0, 0}, car_look(), pp, {}, vis);
  auto far_iv = ppp({50, 0, 0}, car_look(), pp, {}, vis);
  CHECK(far_iv.fnr.hi > near_iv.fnr.hi);

  // Independent evaluation of the far point.
  const auto& c = pp.calib.fnr;
  double x = c[0] + c[1] * 50 + c[3] * 1.0 + c[4] * std::log1p(20.0) +
             c[7] * std::cbrt(4.5 * 1.8 * 1.5);
  double p = 1 / (1 + std::exp(-x));
  double n = pp.calib.pseudo_count, z = kWilsonZ;
  double hi = (p + z * z / (2 * n) + z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n))) /
              (1 + z * z / n);
  CHECK(far_iv.fnr.hi == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("ppp intervals are well formed") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-5, 5), u(0, 1);
  std::uniform_int_distribution<int> hits(1, 500);
  for (int i = 0; i < 20000; ++i) {
    PerceptionPipeline pp = lidar();
    for (auto& c : pp.calib.fnr) c = coef(rng);
    for (auto& c : pp.calib.fpr) c = coef(rng);
    pp.calib.pseudo_count = i % 7 == 0 ? kInf : std::exp(coef(rng) + 3);
    VisibilityReport vis{hits(rng), 500, u(rng), true};
    world::EnvCondition env{u(rng) < 0.5 ? world::Light::day : world::Light::night,
                            u(rng) < 0.5 ? world::Weather::dry : world::Weather::rain};
    auto iv = ppp(random_target(rng, 80), car_look(), pp, env, vis);
    for (Interval x : {iv.fnr, iv.fpr}) {
      REQUIRE(0.0 <= x.lo);
      REQUIRE(x.lo <= x.hi);
      REQUIRE(x.hi <= 1.0);
    }
  }
}

TEST_CASE("logistic matches a 50 digit reference") {
  using boost::multiprecision::cpp_dec_float_50;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 5000; ++i) {
    double x = i < 4 ? std::vector<double>{0.0, -700.0, 35.0, 1e-9}[i] : u(rng);
    cpp_dec_float_50 ref = 1 / (1 + exp(-cpp_dec_float_50(x)));
    double r = ref.convert_to<double>();
    CHECK(std::abs(logistic(x) - r) <= 1e-12 * r);
  }
}

TEST_CASE("cast_rays trivial cases") {
  auto body = fixtures::small_car();
  auto pp = lidar();
  SUBCASE("target in front of the front bumper sensor is fully visible") {
    auto vis = cast_rays(pp, body, on("front"), {{10, 0, 0}, 4.5, 1.8, 1.5});
    CHECK(vis.hit_count > 0);
    CHECK(vis.visible_fraction == 1.0);
  }
  SUBCASE("target behind a body taller than the mount is hidden") {
    body.height_profile = {{body.footprint, 3.0}};
    auto vis = cast_rays(pp, body, on("front"), {{-10, 0, 0}, 4.5, 1.8, 1.5});
    CHECK(vis.in_fov);
    CHECK(vis.hit_count == 0);
    CHECK(vis.visible_fraction == 0.0);
  }
  SUBCASE("out of range") {
    auto vis = cast_rays(pp, body, on("front"), {{45, 0, 0}, 4.5, 1.8, 1.5});
    CHECK_FALSE(vis.in_fov);
  }
}

TEST_CASE("windowed ray cast equals the full scan") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  auto body = fixtures::small_car();
  for (auto pp : {lidar(), camera()}) {
    for (int i = 0; i < 400; ++i) {
      auto m = on(i % 2 ? "roof" : "front", i % 3 ? yaw(rng) : 0.0);
      TargetBox t{random_target(rng, 45), 4.5, 1.8, i % 4 ? 1.5 : 2.5};
      auto a = cast_rays(pp, body, m, t);
      auto b = cast_rays_all(pp, body, m, t);
      CHECK(a.hit_count == b.hit_count);
      CHECK(a.unoccluded_count == b.unoccluded_count);
    }
  }
}

TEST_CASE("ray cast agrees with the triangle oracle") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> yaw(-kPi, kPi), pitch(-0.2, 0.3);
  auto body = fixtures::small_car();
  body.height_profile.push_back({geom::Footprint::rectangle(-1, -0.8, 1, 0.8), 1.9});
  body.mount_points.push_back({"mast", {0.5, 0, 2.1}});
  for (int i = 0; i < 150; ++i) {
    auto pp = i % 2 ? lidar(72, 8) : camera();
    auto m = on(std::vector<std::string>{"roof", "front", "mast"}[i % 3], yaw(rng),
                i % 4 == 0 ? pitch(rng) : 0.0);
    TargetBox t{random_target(rng, 35), 4.5, 1.8, 1.5};
    auto a = cast_rays(pp, body, m, t);
    auto b = oracle::brute_force_visibility(pp, body, m, t);
    CHECK(a.hit_count == b.hit_count);
    CHECK(a.unoccluded_count == b.unoccluded_count);
  }
}

TEST_CASE("mppcc epsilon behaviour") {
  auto body = fixtures::small_car();
  auto pp = lidar(90, 6);
  geom::PolarGridSpec g{1, 40, 5, 12, 4};
  auto vt = visibility_table(car_look(), pp, body, on("roof"), g);
  auto ct = coverage_table(vt, car_look(), pp, {});
  CHECK(ct.covered(0.0).empty());
  geom::CellSet prev(g);
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 1.0}) {
    auto cur = ct.covered(eps);
    CHECK(geom::cellset_subset(prev, cur));
    prev = cur;
  }
  CHECK(ct.covered(0.2) == mppcc(car_look(), pp, body, on("roof"), {}, 0.2, g));
  CHECK_FALSE(ct.covered(0.9).empty());
  // Night and rain only add positive terms here.
  auto night = coverage_table(vt, car_look(), pp, {world::Light::night, world::Weather::rain});
  CHECK(geom::cellset_subset(night.covered(0.2), ct.covered(0.2)));
}

TEST_CASE("perfect calibration covers exactly the seen cells") {
  auto body = fixtures::small_car();
  geom::PolarGridSpec g{1, 30, 4, 8, 4};
  for (auto pp : {perfect(lidar(60, 6)), perfect(camera())}) {
    pp.n_azimuth = pp.kind == SensorKind::camera ? 30 : 60;
    for (double yaw : {0.0, 1.0}) {
      auto m = on("roof", yaw);
      auto got = mppcc(car_look(), pp, body, m, {}, 0.5, g);
      auto want = oracle::brute_force_seen_cells(car_look(), pp, body, m, g);
      CHECK(got == want);
      if (pp.kind == SensorKind::camera) CHECK(got.size() < g.cell_count());
    }
  }
}

TEST_CASE("roof sensor has a blind ring near the body") {
  auto body = fixtures::small_car();
  auto pp = perfect(lidar(180, 16));
  pp.range_max = 60;
  geom::PolarGridSpec g{1, 60, 10, 8, 2};
  auto m = on("roof");
  // Short target: the roof edge 1 m to the side shadows the ground out to
  // 1 * 1.7 / (1.7 - 1.0) = 2.43 m, and a 0.8 m box centered within 1.5 m stays inside it.
  world::Appearance post{0.8, 0.8, 1.0, 0.5, world::Tone::light};
  auto got = mppcc(post, pp, body, m, {}, 0.99, g);
  CHECK(got == oracle::brute_force_seen_cells(post, pp, body, m, g));
  int inner = 0, far = 0;
  for (const auto& c : got.cells()) {
    inner += c.radial == 0;
    far += c.radial >= 4;
  }
  CHECK(inner == 0);
  CHECK(far > 0);
}

TEST_CASE("dominating calibration covers a superset") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0, 1);
  auto body = fixtures::small_car();
  geom::PolarGridSpec g{1, 40, 5, 12, 4};
  auto b = lidar(90, 6);
  auto a = b;
  for (int i = 0; i < kFeatures; ++i) {
    a.calib.fnr[i] -= d(rng);
    a.calib.fpr[i] -= d(rng);
  }
  auto m = on("roof");
  auto vt = visibility_table(car_look(), b, body, m, g);
  auto ca = coverage_table(vt, car_look(), a, {});
  auto cb = coverage_table(vt, car_look(), b, {});
  for (double eps : {0.02, 0.05, 0.1, 0.3, 0.7})
    CHECK(geom::cellset_subset(cb.covered(eps), ca.covered(eps)));
}

TEST_CASE("yaw rotation rotates coverage") {
  auto body = drum();
  geom::PolarGridSpec g{2, 30, 4, 16, 8};
  for (auto pp : {perfect(lidar(360, 8)), camera()}) {
    pp.n_elevation = 8;
    auto base = mppcc(car_look(), pp, body, on("top", 0.0), {}, 0.3, g);
    auto turned = mppcc(car_look(), pp, body, on("top", kPi / 4), {}, 0.3, g);
    CHECK_FALSE(base.empty());
    std::vector<geom::Cell> moved;
    for (const auto& c : base.cells()) moved.push_back(rotated(c, g, 2, 1));
    CHECK(geom::CellSet(g, moved) == turned);
  }
}

TEST_CASE("parallel and serial visibility tables agree") {
  auto body = fixtures::small_car();
  geom::PolarGridSpec g{1, 40, 4, 10, 4};
  auto pp = lidar(90, 6);
  auto a = visibility_table(car_look(), pp, body, on("front", 0.3), g);
  auto b = visibility_table_serial(car_look(), pp, body, on("front", 0.3), g);
  REQUIRE(a.vis.size() == b.vis.size());
  for (std::size_t i = 0; i < a.vis.size(); ++i) {
    CHECK(a.vis[i].hit_count == b.vis[i].hit_count);
    CHECK(a.vis[i].unoccluded_count == b.vis[i].unoccluded_count);
  }
}

TEST_CASE("class coverage is the intersection over appearances") {
  auto body = fixtures::small_car();
  geom::PolarGridSpec g{1, 40, 4, 10, 4};
  auto pp = lidar(90, 6);
  auto cls = fixtures::car_class();
  cls.appearances.push_back({{1.0, 0.6, 0.8, 0.3, world::Tone::dark}, 1.0});
  auto m = on("roof");
  auto all = class_coverage(cls, pp, body, m, {}, 0.2, g);
  auto a0 = mppcc(cls.appearances[0].appearance, pp, body, m, {}, 0.2, g);
  auto a1 = mppcc(cls.appearances[1].appearance, pp, body, m, {}, 0.2, g);
  CHECK(all == a0.intersect(a1));
}

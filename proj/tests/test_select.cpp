#include <doctest.h>

#include <cmath>
#include <random>

#include "codei/oracle.hpp"
#include "codei/select.hpp"
#include "random_cover.hpp"

using namespace codei;
using namespace codei::select;

namespace {

geom::PolarGridSpec kGrid{1, 20, 2, 4, 2};

CoverageSet cov(const std::string& id, std::vector<geom::Cell> cells) {
  CoverageSet c;
  c.mpp_id = id;
  c.entries[{"car", {}}] = geom::CellSet(kGrid, std::move(cells));
  return c;
}

Candidate cand(const std::string& id, const std::string& mount, std::vector<double> raw) {
  return {id, mount, {}, std::move(raw)};
}

CoverInstance tiny(std::vector<std::vector<int>> cover, std::vector<std::vector<double>> cost,
                   std::vector<std::string> groups = {}) {
  const std::size_t n = cover.empty() ? 0 : cover[0].size();
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) atoms.push_back({"c", {}, {0, std::uint16_t(i), 0}});
  std::vector<Candidate> cands;
  std::vector<Bits> cols;
  for (std::size_t l = 0; l < cover.size(); ++l) {
    cands.push_back({"m" + std::to_string(l), groups.empty() ? "g" + std::to_string(l) : groups[l],
                     cost[l], cost[l]});
    Bits b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = cover[l][i];
    cols.push_back(b);
  }
  return make_instance(atoms, cands, cols);
}

}  // namespace

TEST_CASE("build_instance examples") {
  SUBCASE("empty requirements") {
    percreq::RequirementSet req(kGrid);
    auto inst = build_instance(req, {cov("a", {{0, 0, 0}})}, {cand("a", "roof", {1, 1})}, {2, 2});
    CHECK(inst.n_atoms() == 0);
    auto r = solve_cover(inst, {0.5, 0.5});
    REQUIRE(r.feasible());
    CHECK(r.selection->chosen.empty());
    CHECK(r.selection->cost == 0.0);
  }
  SUBCASE("one atom, only the second candidate covers it") {
    percreq::RequirementSet req(kGrid);
    req.insert({"car", {}}, geom::Cell{1, 2, 1});
    auto inst = build_instance(req, {cov("a", {{0, 0, 0}}), cov("b", {{1, 2, 1}, {0, 0, 0}})},
                               {cand("a", "roof", {1, 3}), cand("b", "front", {2, 1})}, {2, 4});
    REQUIRE(inst.n_atoms() == 1);
    CHECK_FALSE(inst.a(0, 0));
    CHECK(inst.a(0, 1));
    CHECK(inst.candidates[0].cost == std::vector<double>{0.5, 0.75});
    CHECK(inst.uncoverable.empty());
    CHECK(inst.f_rows.size() == 2);
  }
  SUBCASE("shared mount point gives one F row") {
    percreq::RequirementSet req(kGrid);
    req.insert({"car", {}}, geom::Cell{0, 0, 0});
    auto inst = build_instance(req, {cov("a", {{0, 0, 0}}), cov("b", {{0, 0, 0}})},
                               {cand("a", "roof", {1}), cand("b", "roof", {2})}, {2});
    REQUIRE(inst.f_rows.size() == 1);
    CHECK(inst.f_rows[0].count() == 2);
  }
  SUBCASE("class and env must match") {
    percreq::RequirementSet req(kGrid);
    req.insert({"car", {world::Light::night, world::Weather::dry}}, geom::Cell{0, 0, 0});
    auto inst = build_instance(req, {cov("a", {{0, 0, 0}})}, {cand("a", "roof", {1})}, {1});
    CHECK(inst.uncoverable == std::vector<std::size_t>{0});
    auto r = solve_cover(inst, {1.0});
    CHECK_FALSE(r.feasible());
    CHECK(r.certificate.atoms == std::vector<std::size_t>{0});
  }
}

TEST_CASE("halton weights") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(2, 2) == 0.25);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(4, 2) == 0.125);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3));
  for (const auto& w : halton_weights(1, 10)) CHECK(w == std::vector<double>{1.0});
  auto w2 = halton_weights(2, 5);
  CHECK(w2[0][0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(w2[0][1] == doctest::Approx(0.4).epsilon(1e-15));
  for (int W = 1; W <= 6; ++W) {
    auto ws = halton_weights(W, 500);
    CHECK(ws.size() == 500);
    for (const auto& w : ws) {
      double s = 0;
      for (double x : w) {
        CHECK(x >= 0.0);
        s += x;
      }
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("solve_cover small examples") {
  auto one = tiny({{1, 1, 1}}, {{0.3}});
  auto r = solve_cover(one, {1.0});
  REQUIRE(r.feasible());
  CHECK(r.selection->chosen == std::vector<std::size_t>{0});

  // Tie between {0} and {1, 2}: equal cost, {0} is lexicographically first.
  auto tie = tiny({{1, 1}, {1, 0}, {0, 1}}, {{0.5}, {0.25}, {0.25}});
  CHECK(solve_cover(tie, {1.0}).selection->chosen == std::vector<std::size_t>{0});
  auto tie2 = tiny({{1, 0}, {0, 1}, {1, 1}}, {{0.25}, {0.25}, {0.5}});
  CHECK(solve_cover(tie2, {1.0}).selection->chosen == std::vector<std::size_t>{0, 1});

  // Only candidates on one mount can cover both atoms.
  auto blocked = tiny({{1, 0}, {0, 1}}, {{1}, {1}}, {"roof", "roof"});
  auto rb = solve_cover(blocked, {1.0});
  CHECK_FALSE(rb.feasible());
  CHECK(rb.certificate.atoms.empty());
  CHECK(rb.certificate.f_rows == std::vector<std::size_t>{0});
}

TEST_CASE("solve_cover matches exhaustive enumeration") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 300; ++it) {
    auto inst = fixtures::random_cover(rng, it < 100 ? 3 : 10, it < 100 ? 4 : 30, 3);
    for (const auto& w : halton_weights(static_cast<int>(inst.n_costs()), 3)) {
      auto got = solve_cover(inst, w);
      auto want = oracle::brute_force_cover(inst, w);
      REQUIRE(got.feasible() == want.feasible());
      if (!got.feasible()) continue;
      CHECK(is_valid_cover(inst, got.selection->chosen));
      CHECK(std::abs(got.selection->cost - want.selection->cost) <= 1e-9);
      CHECK(got.selection->chosen == want.selection->chosen);
    }
  }
}

TEST_CASE("more required atoms never lower the optimum") {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 100; ++it) {
    auto big = fixtures::random_cover(rng, 10, 30, 2);
    // Keep a prefix of the atoms.
    std::size_t keep = big.n_atoms() / 2;
    std::vector<Atom> atoms(big.atoms.begin(), big.atoms.begin() + keep);
    std::vector<Bits> cols;
    for (const auto& c : big.covers) {
      Bits b(keep);
      for (std::size_t n = 0; n < keep; ++n) b[n] = c[n];
      cols.push_back(b);
    }
    auto small = make_instance(atoms, big.candidates, cols);
    for (const auto& w : halton_weights(static_cast<int>(big.n_costs()), 4)) {
      auto rs = solve_cover(small, w), rb = solve_cover(big, w);
      if (rb.feasible()) {
        REQUIRE(rs.feasible());
        CHECK(rs.selection->cost <= rb.selection->cost + 1e-12);
      }
    }
  }
}

TEST_CASE("pareto sweep examples") {
  auto single = tiny({{1, 1}}, {{0.4, 0.2}});
  auto f1 = pareto_sweep(single, 16);
  REQUIRE(f1.points.size() == 1);
  CHECK(f1.points[0].weights.size() == 16);

  auto two = tiny({{1, 1}, {1, 1}}, {{1, 2}, {2, 1}});
  auto f2 = pareto_sweep(two, 32);
  REQUIRE(f2.points.size() == 2);
  CHECK(f2.points[0].resources == std::vector<double>{1, 2});
  CHECK(f2.points[1].resources == std::vector<double>{2, 1});
  CHECK(is_antichain(f2));

  auto none = tiny({{1, 0}}, {{1, 1}});
  auto f3 = pareto_sweep(none, 4);
  CHECK(f3.points.empty());
  REQUIRE(f3.infeasible);
  CHECK(f3.infeasible->atoms == std::vector<std::size_t>{1});
}

TEST_CASE("pareto sweep finds the supported front") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 60; ++it) {
    auto inst = fixtures::random_cover(rng, 5, 12, 1);
    for (auto& c : inst.candidates) {
      c.cost = {c.cost[0], std::round(std::uniform_real_distribution<double>(0, 1)(rng) * 100) / 100};
      c.raw = c.cost;
    }
    auto front = pareto_sweep(inst, 64);
    auto truth = oracle::brute_force_front(inst);
    if (truth.empty()) {
      CHECK(front.points.empty());
      continue;
    }
    CHECK(is_antichain(front));
    for (const auto& p : front.points) {
      CHECK(std::find(truth.begin(), truth.end(), p.resources) != truth.end());
      for (const auto& s : p.selections) CHECK(is_valid_cover(inst, s.chosen));
    }
    // Each weight's best front value is attained by the sweep.
    for (const auto& w : halton_weights(2, 64)) {
      double best_truth = 1e300, best_sweep = 1e300;
      for (const auto& t : truth) best_truth = std::min(best_truth, w[0] * t[0] + w[1] * t[1]);
      for (const auto& p : front.points)
        best_sweep = std::min(best_sweep, w[0] * p.resources[0] + w[1] * p.resources[1]);
      CHECK(best_sweep <= best_truth + 1e-9);
    }
  }
}

TEST_CASE("parallel and serial sweeps agree") {
  std::mt19937_64 rng(24);
  for (int it = 0; it < 10; ++it) {
    auto inst = fixtures::random_cover(rng, 12, 40, 4);
    auto a = pareto_sweep(inst, 40), b = pareto_sweep_serial(inst, 40);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].resources == b.points[i].resources);
      CHECK(a.points[i].weights == b.points[i].weights);
    }
  }
}

#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "codei/commands.hpp"
#include "codei/io.hpp"

using namespace codei::commands;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& p) {
  std::ifstream f(p);
  return json::parse(f);
}

std::string bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

// Scratch directory holding a shrunken copy of the toy data: four yaws, one
// instance per scenario.
struct Sandbox {
  fs::path dir;
  Options o;

  explicit Sandbox(const std::string& name, bool empty_task = false) {
    dir = fs::temp_directory_path() / ("codei_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto cat = read_json(fs::path(CODEI_DATA_DIR) / "toy" / "catalog.json");
    json yaws = json::array();
    for (std::size_t i = 0; i < cat["yaw_options_rad"].size(); i += 2) yaws.push_back(cat["yaw_options_rad"][i]);
    cat["yaw_options_rad"] = yaws;
    cat["n_weights"] = 12;
    auto task = read_json(fs::path(CODEI_DATA_DIR) / "toy" / "task.json");
    for (auto& s : task["scenarios"]) s["instances"] = 1;
    if (empty_task) task["scenarios"] = json::array();
    write(dir / "catalog.json", cat);
    write(dir / "task.json", task);
    o.catalog = dir / "catalog.json";
    o.task = dir / "task.json";
    o.out = dir / "store";
  }
  ~Sandbox() { fs::remove_all(dir); }

  void edit_catalog(const std::function<void(json&)>& f) {
    auto c = read_json(o.catalog);
    f(c);
    write(o.catalog, c);
  }

  fs::path log(const std::string& planner, const std::string& body = "compact") {
    auto r = cmd_simulate(o, planner, body);
    REQUIRE_MESSAGE(r.exit_code == 0, r.message);
    return r.artifacts.at(0);
  }
  fs::path requirements(const std::vector<fs::path>& logs) {
    auto r = cmd_requirements(o, logs);
    REQUIRE_MESSAGE(r.exit_code == 0, r.message);
    return r.artifacts.at(0);
  }
};

json requirement_body(const fs::path& p) { return read_json(p).at("requirements"); }

}  // namespace

TEST_CASE("simulate") {
  SUBCASE("empty task gives an empty log") {
    Sandbox sb("empty", true);
    auto r = cmd_simulate(sb.o, "lattice", "compact");
    REQUIRE_MESSAGE(r.exit_code == 0, r.message);
    auto j = read_json(r.artifacts.at(0));
    CHECK(j.at("instances").empty());
    CHECK(j.at("all_reached").get<bool>());
  }
  SUBCASE("unknown body is an error") {
    Sandbox sb("unknown");
    auto r = cmd_simulate(sb.o, "lattice", "tractor");
    CHECK(r.exit_code == 1);
    CHECK(r.message.find("tractor") != std::string::npos);
    CHECK(r.artifacts.empty());
  }
  SUBCASE("rerun is a cache hit with the same artifact") {
    Sandbox sb("rerun");
    auto a = cmd_simulate(sb.o, "lattice", "compact");
    auto b = cmd_simulate(sb.o, "lattice", "compact");
    CHECK_FALSE(a.cache_hit);
    CHECK(b.cache_hit);
    CHECK(a.artifacts == b.artifacts);
    CHECK(b.exit_code == a.exit_code);
  }
  SUBCASE("seed override changes the sampled task") {
    Sandbox sb("seed");
    auto a = sb.log("lattice");
    sb.o.seed = 5;
    auto b = sb.log("lattice");
    CHECK(a != b);
  }
}

TEST_CASE("requirements") {
  Sandbox sb("req");
  auto l1 = sb.log("lattice"), l2 = sb.log("lattice_long");

  SUBCASE("idempotent") {
    auto a = sb.requirements({l1});
    auto again = cmd_requirements(sb.o, {l1});
    CHECK(again.cache_hit);
    CHECK(requirement_body(again.artifacts.at(0)) == requirement_body(a));
  }
  SUBCASE("two batches equal one combined run") {
    sb.requirements({l1});
    auto inc = sb.requirements({l2});
    Sandbox other("req_once");
    auto m1 = other.log("lattice"), m2 = other.log("lattice_long");
    auto once = other.requirements({m1, m2});
    CHECK(requirement_body(inc) == requirement_body(once));
    CHECK(read_json(inc).at("sources") == read_json(once).at("sources"));
    CHECK_FALSE(read_json(inc).at("requirements").at("entries").empty());
  }
  SUBCASE("empty logs give an empty set") {
    Sandbox empty("req_empty", true);
    auto r = empty.requirements({empty.log("lattice")});
    CHECK(read_json(r).at("requirements").at("atoms") == 0);
  }
  SUBCASE("logs of different bodies are rejected") {
    auto suv = sb.log("lattice", "suv");
    auto r = cmd_requirements(sb.o, {l1, suv});
    CHECK(r.exit_code == 1);
  }
  SUBCASE("no logs is an error") { CHECK(cmd_requirements(sb.o, {}).exit_code == 1); }
}

TEST_CASE("select") {
  Sandbox sb("select");
  auto req = sb.requirements({sb.log("lattice")});

  SUBCASE("feasible front agrees with enumeration") {
    sb.o.oracle = true;
    auto r = cmd_select(sb.o, req);
    REQUIRE_MESSAGE(r.exit_code == 0, r.message);
    CHECK(r.artifacts.size() == 5);
    auto front = read_json(r.artifacts.at(0));
    CHECK(front.at("infeasible").is_null());
    CHECK_FALSE(front.at("points").empty());
    CHECK(read_json(r.artifacts.back()).at("agrees").get<bool>());
    auto again = cmd_select(sb.o, req);
    CHECK(again.cache_hit);
    CHECK(again.exit_code == 0);
  }
  SUBCASE("epsilon zero is infeasible with a certificate") {
    sb.o.epsilon = 0.0;
    auto r = cmd_select(sb.o, req);
    CHECK(r.exit_code == 2);
    auto front = read_json(r.artifacts.at(0));
    CHECK(front.at("points").empty());
    CHECK_FALSE(front.at("infeasible").at("uncoverable").empty());
  }
  SUBCASE("a single candidate gives a one-point front") {
    sb.edit_catalog([](json& c) {
      c["yaw_options_rad"] = json::array({0.0});
      json keep = json::array();
      for (auto& p : c["pipelines"])
        if (p["id"] == "lidar_hi") keep.push_back(p);
      c["pipelines"] = keep;
      for (auto& b : c["bodies"]) {
        json mounts = json::array();
        for (auto& m : b["mount_points"])
          if (m["name"] == "roof") mounts.push_back(m);
        b["mount_points"] = mounts;
      }
    });
    auto req1 = sb.requirements({sb.log("lattice")});
    sb.o.format = "csv";
    auto r = cmd_select(sb.o, req1);
    REQUIRE_MESSAGE(r.exit_code == 0, r.message);
    auto front = read_json(r.artifacts.at(0));
    CHECK(front.at("candidates") == 1);
    REQUIRE(front.at("points").size() == 1);
    CHECK(front.at("points")[0].at("selections")[0].at("mounted").size() == 1);
    CHECK(r.artifacts.size() == 3);
  }
  SUBCASE("requirement from another grid is rejected") {
    sb.edit_catalog([](json& c) { c["grid"]["n_angular"] = 8; });
    CHECK(cmd_select(sb.o, req).exit_code == 1);
  }
}

TEST_CASE("codesign") {
  Sandbox sb("codesign");
  sb.edit_catalog([](json& c) {
    c["computers"].erase(1);
    c["planners"].erase(1);
  });

  SUBCASE("unreachable speed has no design") {
    auto r = cmd_codesign(sb.o, 200.0, 0.0);
    CHECK(r.exit_code == 2);
    CHECK(read_json(r.artifacts.at(0)).at("points").empty());
  }
  SUBCASE("monotone in the demand and equal to enumeration") {
    sb.o.oracle = true;
    auto lo = cmd_codesign(sb.o, 5.0, 1000.0);
    auto hi = cmd_codesign(sb.o, 20.0, 200000.0);
    REQUIRE_MESSAGE(lo.exit_code == 0, lo.message);
    REQUIRE_MESSAGE(hi.exit_code == 0, hi.message);
    CHECK(read_json(lo.artifacts.back()).at("agrees").get<bool>());
    CHECK(read_json(hi.artifacts.back()).at("agrees").get<bool>());
    auto pl = read_json(lo.artifacts.at(0)).at("points"), ph = read_json(hi.artifacts.at(0)).at("points");
    // every high-demand point is above some low-demand point
    for (const auto& h : ph) {
      bool above = false;
      for (const auto& l : pl) {
        bool leq = true;
        for (std::size_t i = 0; i < l["resources"].size(); ++i)
          leq = leq && l["resources"][i].get<double>() <= h["resources"][i].get<double>();
        above = above || leq;
      }
      CHECK(above);
    }
    CHECK(read_json(lo.artifacts.at(0)).at("kleene_iterations").get<int>() <= 50);
  }
}

TEST_CASE("two stores hold byte-identical artifacts") {
  Sandbox a("det_a"), b("det_b");
  auto run = [](Sandbox& s) {
    std::vector<fs::path> out;
    auto l = s.log("lattice");
    auto req = s.requirements({l});
    auto sel = cmd_select(s.o, req);
    out = {l, req};
    out.insert(out.end(), sel.artifacts.begin(), sel.artifacts.end());
    return out;
  };
  auto pa = run(a), pb = run(b);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].filename() == pb[i].filename());
    CHECK(bytes(pa[i]) == bytes(pb[i]));
  }
  CHECK(bytes(a.o.out / "manifest.json") == bytes(b.o.out / "manifest.json"));
}

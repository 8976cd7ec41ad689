// Serial reference kernels against their OpenMP versions on the toy data.
// Arg 0 is the serial version, arg 1 the parallel one.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "codei/catalog.hpp"
#include "codei/percperf.hpp"
#include "codei/percreq.hpp"
#include "codei/planner.hpp"
#include "codei/select.hpp"

using namespace codei;

namespace {

struct Toy {
  catalog::Catalog cat;
  catalog::TaskFile tf;
  world::Task task;
  planner::QuerySet queries;

  Toy() {
    const auto dir = std::filesystem::path(CODEI_DATA_DIR) / "toy";
    cat = catalog::load_catalog(dir / "catalog.json");
    tf = catalog::load_task(dir / "task.json");
    task = tf.sample();
    queries = planner::task_queries(cat.planner("lattice"), cat.body("compact"), task);
  }
};

const Toy& toy() {
  static const Toy t;
  return t;
}

void BM_requirements(benchmark::State& s) {
  const auto& t = toy();
  const auto& fp = t.cat.body("compact").footprint;
  for (auto _ : s) {
    auto r = s.range(0) ? percreq::requirements_from_queries(t.queries, t.task, t.tf.classes, fp, t.cat.grid,
                                                             t.tf.requirements)
                        : percreq::requirements_from_queries_serial(t.queries, t.task, t.tf.classes, fp,
                                                                    t.cat.grid, t.tf.requirements);
    benchmark::DoNotOptimize(r);
  }
  s.counters["queries"] = static_cast<double>(planner::query_count(t.queries));
}

void BM_visibility_table(benchmark::State& s) {
  const auto& t = toy();
  const auto& body = t.cat.body("compact");
  const auto& pp = t.cat.pipeline("lidar_hi");
  const auto look = t.tf.classes.at("car").appearances[0].appearance;
  percperf::MountedPipeline m{pp.id, body.id, "roof", 0.0, 0.0};
  for (auto _ : s) {
    auto vt = s.range(0) ? percperf::visibility_table(look, pp, body, m, t.cat.grid)
                         : percperf::visibility_table_serial(look, pp, body, m, t.cat.grid);
    benchmark::DoNotOptimize(vt);
  }
}

select::CoverInstance random_instance() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  const int L = 40, N = 120, W = 4;
  std::vector<select::Atom> atoms;
  for (int n = 0; n < N; ++n) atoms.push_back({"c", {}, {std::uint16_t(n / 16), std::uint16_t(n % 16), 0}});
  std::vector<select::Candidate> cands;
  std::vector<select::Bits> covers;
  for (int l = 0; l < L; ++l) {
    select::Candidate c;
    c.id = "m" + std::to_string(l);
    c.mount_group = "g" + std::to_string(l % 8);
    for (int j = 0; j < W; ++j) c.cost.push_back(u(rng));
    c.raw = c.cost;
    select::Bits b(N);
    for (int n = 0; n < N; ++n) b[n] = u(rng) < 0.25;
    cands.push_back(c);
    covers.push_back(b);
  }
  return select::make_instance(atoms, cands, covers);
}

void BM_pareto_sweep(benchmark::State& s) {
  static const auto inst = random_instance();
  for (auto _ : s) {
    auto f = s.range(0) ? select::pareto_sweep(inst, 32) : select::pareto_sweep_serial(inst, 32);
    benchmark::DoNotOptimize(f);
  }
}

}  // namespace

BENCHMARK(BM_requirements)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_visibility_table)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pareto_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

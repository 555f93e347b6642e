#include <benchmark/benchmark.h>

#include <random>

#include "tplan/config.hpp"
#include "tplan/evaluation.hpp"
#include "tplan/gmm.hpp"
#include "tplan/inference.hpp"
#include "tplan/io.hpp"
#include "tplan/planner.hpp"
#include "tplan/synth.hpp"

using namespace tplan;

namespace {

Dataset muesli(std::size_t demos) {
  auto spec = io::spec_from_json(io::parse_json(
      io::read_file(std::string(TPLAN_DATA_DIR) + "/muesli_spec.json")));
  spec.demonstrations = demos;
  return generate(spec);
}

void BM_FindAssignments(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  std::vector<Action> acts;
  for (std::size_t i = 0; i < n; ++i) acts.push_back({"act", std::string(1, char('a' + i))});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  RelationScoreTable t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      RelationScores s;
      for (auto& x : s) x = u(rng);
      t.set({acts[i], acts[j]}, s);
    }
  }
  const AssignmentProblem p(acts, t);
  SearchOptions o;
  o.collect = false;
  std::size_t solutions = 0;
  for (auto _ : state) {
    solutions = search_assignments(p, {}, o).solutions;
    benchmark::DoNotOptimize(solutions);
  }
  state.counters["solutions"] = double(solutions);
}
BENCHMARK(BM_FindAssignments)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BenchInstance(benchmark::State& state) {
  const auto inst = io::bench_instance_from_json(io::parse_json(
      io::read_file(std::string(TPLAN_DATA_DIR) + "/bench_5_actions.json")));
  const AssignmentProblem p(inst.actions, inst.scores);
  SearchOptions o;
  o.collect = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(search_assignments(p, inst.pre_assigned, o).solutions);
  }
}
BENCHMARK(BM_BenchInstance)->Unit(benchmark::kMillisecond);

void BM_FitGmm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0, 0.1);
  std::vector<Timing3> pts;
  for (int i = 0; i < state.range(0); ++i) {
    const double c = i % 2 ? 1.0 : 2.0;
    pts.push_back({c + z(rng), 1.0 + z(rng), c - 1.0 + z(rng)});
  }
  const GmmOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(fit_gmm(pts, o));
}
BENCHMARK(BM_FitGmm)->Arg(20)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_Parametrize(benchmark::State& state) {
  const auto ds = muesli(10);
  const PlannerConfig cfg = Config{}.planner();
  const auto r = plan_pipeline(ds, 0, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parametrize(r.symbolic, r.graph, cfg.parametrize));
  }
}
BENCHMARK(BM_Parametrize)->Unit(benchmark::kMicrosecond);

void BM_PlanPipeline(benchmark::State& state) {
  const auto ds = muesli(10);
  const PlannerConfig cfg = Config{}.planner();
  for (auto _ : state) benchmark::DoNotOptimize(plan_pipeline(ds, 0, cfg));
}
BENCHMARK(BM_PlanPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <random>

#include <benchmark/benchmark.h>

#include "qamht/anneal.hpp"
#include "qamht/graph.hpp"
#include "qamht/kalman.hpp"
#include "qamht/scenario.hpp"
#include "qamht/sqa.hpp"
#include "qamht/tracker.hpp"

namespace {

qamht::WeightedGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(0.5, 5.0);
  std::bernoulli_distribution edge(p);
  std::vector<double> weights(n);
  for (auto& x : weights) x = w(rng);
  std::vector<qamht::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (edge(rng)) edges.emplace_back(i, j);
    }
  }
  return qamht::WeightedGraph(std::move(weights), std::move(edges));
}

void BM_MwisExact(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.1, 7);
  for (auto _ : state) benchmark::DoNotOptimize(qamht::mwis_exact(g));
}
BENCHMARK(BM_MwisExact)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_KalmanCycle(benchmark::State& state) {
  qamht::KalmanState s;
  s.x << 0.0, 0.0, 10.0, 1.0;
  s.P = Eigen::Matrix4d::Identity() * 25.0;
  const Eigen::Vector2d z(10.5, 0.8);
  for (auto _ : state) {
    const auto pred = qamht::kalman_predict(s, 1.0, 0.25);
    benchmark::DoNotOptimize(qamht::kalman_update(pred, z, 5.0));
  }
}
BENCHMARK(BM_KalmanCycle);

void BM_AnnealDense(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.4, 3);
  qamht::AnnealConfig cfg;
  cfg.schedule.t_final = 20e-6;
  cfg.noise = state.range(1) != 0;
  cfg.shots = 200;
  for (auto _ : state) benchmark::DoNotOptimize(qamht::anneal(g, cfg));
}
BENCHMARK(BM_AnnealDense)->Args({3, 0})->Args({5, 0})->Args({5, 1})->Unit(benchmark::kMillisecond);

void BM_Sqa(benchmark::State& state) {
  const auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.2, 5);
  qamht::QmcConfig cfg;
  cfg.restarts = 5;
  for (auto _ : state) benchmark::DoNotOptimize(qamht::sqa_anneal(g, cfg));
}
BENCHMARK(BM_Sqa)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_TrackerTwoTargets(benchmark::State& state) {
  auto c = qamht::default_scenario_config(2);
  c.lambda_c = 2e-5;
  const auto sc = qamht::generate_scenario(c);
  const auto cfg = qamht::tracker_config_for(c);
  for (auto _ : state) benchmark::DoNotOptimize(qamht::run_tracker(sc, cfg, {}));
}
BENCHMARK(BM_TrackerTwoTargets)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

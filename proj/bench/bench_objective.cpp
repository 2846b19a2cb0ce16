#include <benchmark/benchmark.h>

#include <vector>

#include "lbandit/environments.hpp"
#include "lbandit/episode.hpp"
#include "lbandit/objective.hpp"

using namespace lbandit;

namespace {

struct Fixture {
  std::vector<TaskSummary> tasks;
  GaussianDiag theta;
  std::vector<double> noise;
  std::vector<double> w;
};

Fixture make_fixture(std::size_t n, std::size_t m) {
  const BetaBernoulliEnv env = builtin_environment(EnvironmentId::env2);
  const std::size_t k = env.num_actions();
  RandomStream rng(7);
  Fixture f;
  for (std::size_t i = 0; i < n; ++i) {
    const Task task = sample_task(env, rng);
    const Episode ep = run_episode(task, ActionDistribution::uniform(k), m, BehaviourPolicy{}, rng);
    f.tasks.push_back(summarize_task(ep.data, BoundKind::clipping, 0.1));
  }
  f.theta = GaussianDiag::standard(k);
  f.noise.resize(n * m * k);
  rng.fill_normal(f.noise);
  f.w.resize(k);
  rng.fill_normal(f.w);
  return f;
}

const TermWeights kWeights{1e-3, 1e-4};

void BM_ReparamSerial(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)), 20);
  std::vector<double> gm(f.theta.size()), gs(f.theta.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(reparam_terms_serial(f.theta, f.tasks, f.noise, kWeights, gm, gs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20);
}

void BM_ReparamParallel(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)), 20);
  std::vector<double> gm(f.theta.size()), gs(f.theta.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(reparam_terms(f.theta, f.tasks, f.noise, kWeights, gm, gs));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20);
}

void BM_SharedSerial(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)), 20);
  std::vector<double> g(f.w.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(shared_terms_serial(f.w, f.tasks, kWeights, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20);
}

void BM_SharedParallel(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)), 20);
  std::vector<double> g(f.w.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(shared_terms(f.w, f.tasks, kWeights, g));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20);
}

}  // namespace

BENCHMARK(BM_ReparamSerial)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_ReparamParallel)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_SharedSerial)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_SharedParallel)->Arg(10)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "subseas/skill.hpp"

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

void BM_Skill(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = random_vector(rng, n);
  const auto o = random_vector(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(subseas::skill(f, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Skill)->Arg(514)->Arg(4096);

void BM_EnsembleBenefit(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> members;
  for (std::size_t i = 0; i < m; ++i) members.push_back(random_vector(rng, 514));
  const std::vector<std::span<const double>> views(members.begin(), members.end());
  const auto o = random_vector(rng, 514);
  const auto w = subseas::EnsembleWeights::uniform(m);
  for (auto _ : state) benchmark::DoNotOptimize(subseas::verify_ensemble_benefit(views, w, o));
}
BENCHMARK(BM_EnsembleBenefit)->Arg(2)->Arg(8);

}  // namespace

BENCHMARK_MAIN();

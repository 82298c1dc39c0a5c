#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "subseas/llr.hpp"

namespace {

subseas::RegressionDesign random_design(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  std::normal_distribution<double> normal;
  subseas::RegressionDesign design;
  for (Eigen::Index i = 0; i < n; ++i) {
    design.dates.push_back(subseas::make_date(1980, 1, 1) + subseas::Days{static_cast<int>(i)});
  }
  design.features.resize(n, d);
  design.outcomes.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) design.features(i, j) = normal(rng);
    design.outcomes(i) = normal(rng);
  }
  design.offsets = Eigen::VectorXd::Zero(n);
  design.weights = Eigen::VectorXd::Ones(n);
  return design;
}

void BM_FitWllr(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Eigen::Index d = state.range(0);
  std::vector<subseas::RegressionDesign> designs;
  for (int g = 0; g < 64; ++g) designs.push_back(random_design(rng, 3000, d));
  for (auto _ : state) benchmark::DoNotOptimize(subseas::fit_wllr(subseas::DayOfYear{120}, 56, designs));
}
BENCHMARK(BM_FitWllr)->Arg(4)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_SolveMinNorm(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const Eigen::Index d = state.range(0);
  const auto design = random_design(rng, 500, d);
  const Eigen::MatrixXd gram = design.features.transpose() * design.features;
  const Eigen::VectorXd moment = design.features.transpose() * design.outcomes;
  for (auto _ : state) benchmark::DoNotOptimize(subseas::solve_min_norm(gram, moment));
}
BENCHMARK(BM_SolveMinNorm)->Arg(4)->Arg(14)->Arg(24);

}  // namespace

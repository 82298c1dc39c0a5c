#include <vector>

#include <benchmark/benchmark.h>

#include "subseas/autoknn.hpp"
#include "subseas/synthetic.hpp"

namespace {

const subseas::PreparedDataset& prepared() {
  static const subseas::PreparedDataset data = [] {
    auto s = subseas::generate_synthetic(11, subseas::GridSpec::box(38, 45, 240, 247), {1990, 2010});
    return subseas::prepare(std::move(s.dataset), {1990, 2009});
  }();
  return data;
}

void BM_KnnSimilarities(benchmark::State& state) {
  const auto& data = prepared();
  const subseas::Frame& anomalies = data.anomalies_of("tmp2m");
  const subseas::Date target = subseas::make_date(2010, 6, 1);
  std::vector<subseas::Date> candidates;
  for (subseas::Date d : anomalies.dates()) {
    if (d >= anomalies.dates().front() + subseas::Days{424} && d < target) candidates.push_back(d);
  }
  for (auto _ : state) benchmark::DoNotOptimize(subseas::knn_similarities(target, anomalies, candidates));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(candidates.size()));
}
BENCHMARK(BM_KnnSimilarities)->Unit(benchmark::kMillisecond);

void BM_AutoknnForecast(benchmark::State& state) {
  const auto& data = prepared();
  const subseas::Horizon horizon = subseas::Horizon::weeks34();
  const subseas::Date target = subseas::make_date(2010, 6, 1);
  auto config = subseas::AutoknnConfig::temperature();
  config.span = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const subseas::DatasetView view(data, subseas::issue_of_target(target, horizon));
    benchmark::DoNotOptimize(subseas::autoknn_forecast(target, horizon, config, view));
  }
}
BENCHMARK(BM_AutoknnForecast)->Arg(28)->Arg(182)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

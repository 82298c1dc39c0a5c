#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "subseas/multillr.hpp"
#include "subseas/synthetic.hpp"

namespace {

struct Fixture {
  subseas::PreparedDataset data;
  subseas::FeatureCatalog catalog;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    auto s = subseas::generate_synthetic(12, subseas::GridSpec::box(38, 45, 240, 247), {1990, 2010});
    Fixture out{subseas::prepare(std::move(s.dataset), {1990, 2009}), {}};
    out.catalog = subseas::FeatureCatalog::default_for(out.data.data, subseas::Horizon::weeks34());
    return out;
  }();
  return f;
}

const subseas::Horizon kHorizon = subseas::Horizon::weeks34();
const subseas::Date kTarget = subseas::make_date(2010, 6, 1);

void BM_LoyocvEngine(benchmark::State& state) {
  const auto& f = fixture();
  const subseas::DatasetView view(f.data, subseas::issue_of_target(kTarget, kHorizon));
  const auto design = subseas::build_design(f.catalog, kTarget, kHorizon, view);
  for (auto _ : state) benchmark::DoNotOptimize(subseas::LoyocvEngine(design));
}
BENCHMARK(BM_LoyocvEngine)->Unit(benchmark::kMillisecond);

void BM_LoyocvEvaluate(benchmark::State& state) {
  const auto& f = fixture();
  const subseas::DatasetView view(f.data, subseas::issue_of_target(kTarget, kHorizon));
  const auto design = subseas::build_design(f.catalog, kTarget, kHorizon, view);
  const subseas::LoyocvEngine engine(design);
  std::vector<std::size_t> columns(f.catalog.size());
  std::iota(columns.begin(), columns.end(), std::size_t{0});
  for (auto _ : state) benchmark::DoNotOptimize(engine.evaluate(columns));
}
BENCHMARK(BM_LoyocvEvaluate)->Unit(benchmark::kMillisecond);

void BM_MultillrForecast(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    const subseas::DatasetView view(f.data, subseas::issue_of_target(kTarget, kHorizon));
    benchmark::DoNotOptimize(subseas::multillr_forecast(kTarget, kHorizon, f.catalog, view));
  }
}
BENCHMARK(BM_MultillrForecast)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

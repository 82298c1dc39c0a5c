#include <filesystem>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "subseas/backtest.hpp"
#include "subseas/error.hpp"
#include "subseas/report.hpp"

using namespace subseas;
namespace fs = std::filesystem;

namespace {

const std::string kRun = R"([run]
horizon = weeks34
first_issue = 2011-04-18
last_issue = 2012-04-17
base_years = 2005-2009
models = llr, knn, both, truth
seed = 3
threads = 1

[synthetic]
years = 2005-2012
grid = box:40,41,250,251
n_features = 4
n_active = 2

[model:llr]
kind = multillr
catalog = ones, tmp2m@29:anom, x01@29, x02@29, x03@29, x04@29

[model:knn]
kind = autoknn
k = 10
neighbors_used = 5

[model:both]
kind = ensemble
members = llr, knn

[model:truth]
kind = echo
)";

std::string with_threads(std::string text, int threads) {
  const std::string key = "threads = 1";
  return text.replace(text.find(key), key.size(), "threads = " + std::to_string(threads));
}

struct Run {
  RunConfig config;
  BacktestResult result;
};

Run run(const std::string& text) {
  RunConfig config = RunConfig::parse(text);
  const PreparedDataset data = load_prepared(config);
  BacktestResult result = run_backtest(config, data);
  return {std::move(config), std::move(result)};
}

std::map<std::string, std::string> output_bytes(const Run& r) {
  fixtures::TempDir dir;
  write_backtest_outputs(r.result, r.config, dir.path().string());
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir.path())) {
    out[entry.path().filename().string()] = fixtures::read_text(entry.path().string());
  }
  return out;
}

const Run& single_thread() {
  static const Run r = run(kRun);
  return r;
}

}  // namespace

TEST(Backtest, ScheduleCoversOneEvaluationYear) {
  const auto& r = single_thread().result;
  ASSERT_EQ(r.issues.size(), 26u);
  EXPECT_EQ(r.issues.front(), make_date(2011, 4, 18));
  for (std::size_t n = 0; n < r.issues.size(); ++n) {
    EXPECT_EQ(r.targets[n], r.issues[n] + Days{15});
    EXPECT_EQ(evaluation_year(r.issues[n]), 2011);
  }
  EXPECT_EQ(r.models, (std::vector<std::string>{"llr", "knn", "both", "truth"}));
}

TEST(Backtest, EchoModelScoresOneEverywhere) {
  const auto& r = single_thread().result;
  for (const auto& rec : r.records[3]) {
    ASSERT_TRUE(rec.skill.has_value()) << rec.error;
    EXPECT_NEAR(*rec.skill, 1.0, 1e-12);
  }
}

TEST(Backtest, EveryModelProducesSkillWithoutGateViolations) {
  const auto& r = single_thread().result;
  EXPECT_EQ(r.total_violations(), 0u);
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    for (const auto& rec : r.records[m]) {
      ASSERT_TRUE(rec.skill.has_value()) << r.models[m] << ": " << rec.error;
      EXPECT_GE(*rec.skill, -1.0);
      EXPECT_LE(*rec.skill, 1.0);
    }
  }
  for (const auto& a : r.audit) {
    ASSERT_TRUE(a.latest_read.has_value());
    EXPECT_LE(*a.latest_read, a.cutoff);
    EXPECT_LT(a.cutoff, a.issue);
  }
  ASSERT_TRUE(r.records[0][0].trace.has_value());
  ASSERT_TRUE(r.records[1][0].neighbors.has_value());
}

TEST(Backtest, EnsembleChecksHold) {
  const auto& r = single_thread().result;
  ASSERT_EQ(r.benefit.size(), r.issues.size());
  for (const auto& b : r.benefit) {
    EXPECT_EQ(b.ensemble, "both");
    EXPECT_FALSE(b.report.degenerate);
    EXPECT_TRUE(b.report.sign_match) << format_date(b.issue);
    EXPECT_TRUE(b.report.magnitude_ok) << format_date(b.issue);
  }
}

TEST(Backtest, OutputIndependentOfThreadCount) {
  const auto one = output_bytes(single_thread());
  const auto eight = output_bytes(run(with_threads(kRun, 8)));
  ASSERT_EQ(one.size(), eight.size());
  for (const auto& [name, bytes] : one) {
    if (name == "config.ini") continue;
    EXPECT_EQ(bytes, eight.at(name)) << name;
  }
  for (const char* name : {"skills.csv", "summary.csv", "summary.md", "histogram.csv", "forecasts_llr.csv",
                           "selection_traces_llr.csv", "feature_frequencies_llr.csv", "neighbors_knn.csv",
                           "ensemble_checks.csv", "errors.csv", "audit.csv"}) {
    EXPECT_TRUE(one.count(name)) << name;
  }
}

TEST(Backtest, FailingModelIsRecordedWithItsCode) {
  fixtures::TempDir dir;
  // Forecast file covering only the first target date.
  fixtures::write_text(dir.file("fc.csv"),
                       "lat,lon,start_date,value\n"
                       "40,250,2011-05-03,1\n40,251,2011-05-03,-1\n41,250,2011-05-03,2\n41,251,2011-05-03,0.5\n");
  const std::string text = R"([run]
horizon = weeks34
first_issue = 2011-04-18
last_issue = 2011-05-16
base_years = 2005-2009
models = dyn, narrow
seed = 3

[synthetic]
years = 2005-2012
grid = box:40,41,250,251

[model:dyn]
kind = file
path = fc.csv
values = anomaly

[model:narrow]
kind = multillr
catalog = ones, tmp2m@3
)";
  const RunConfig config = RunConfig::parse(text, dir.path().string());
  const BacktestResult r = run_backtest(config, load_prepared(config));
  ASSERT_EQ(r.issues.size(), 3u);
  const auto& dyn = r.records[0];
  ASSERT_TRUE(dyn[0].skill.has_value());
  EXPECT_TRUE(dyn[0].error_code.empty());
  for (std::size_t n = 1; n < 3; ++n) {
    EXPECT_FALSE(dyn[n].skill.has_value());
    EXPECT_FALSE(dyn[n].forecast.has_value());
    EXPECT_EQ(dyn[n].error_code, to_string(ErrorCode::MissingSource));
  }
  for (const auto& rec : r.records[1]) {
    EXPECT_FALSE(rec.skill.has_value());
    EXPECT_EQ(rec.error_code, to_string(ErrorCode::LagViolation)) << rec.error;
  }
  EXPECT_EQ(r.total_violations(), 0u);
}

TEST(Backtest, RejectsVariableMismatch) {
  std::string text = kRun;
  text.insert(text.find("seed"), "variable = precip\n");
  const RunConfig config = RunConfig::parse(text);
  EXPECT_THROW(load_prepared(config), Error);
}

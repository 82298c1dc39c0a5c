#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "subseas/autoknn.hpp"
#include "subseas/error.hpp"
#include "subseas/synthetic.hpp"

using namespace subseas;

namespace {

const GridSpec kGrid = GridSpec::box(40, 42, 250, 252);
const Horizon kHorizon = Horizon::weeks34();

Frame random_anomalies(std::uint64_t seed, Date first, Date last, const GridSpec& grid = kGrid) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  return fixtures::make_frame("tmp2m", grid, fixtures::days_between(first, last),
                              [&](Date, std::size_t) { return normal(rng); });
}

std::vector<Date> dates_in(const Frame& f, Date from, Date to) {
  std::vector<Date> out;
  for (Date d : f.dates()) {
    if (d >= from && d <= to) out.push_back(d);
  }
  return out;
}

// Constant base years, then a random anomaly pattern repeating every 365 days.
PreparedDataset periodic_dataset() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  const Date start = make_date(2001, 1, 1);
  std::vector<double> pattern(365 * kGrid.size());
  for (double& p : pattern) p = normal(rng);
  Dataset ds;
  ds.target_variable = "tmp2m";
  ds.target = fixtures::make_frame(
      "tmp2m", kGrid, fixtures::days_between(make_date(1999, 1, 1), make_date(2006, 12, 31)), [&](Date d, std::size_t g) {
        const double level = 90.0 + static_cast<double>(g);
        if (d < start) return level;
        const auto phase = static_cast<std::size_t>((d - start).count() % 365);
        return level + pattern[phase * kGrid.size() + g];
      });
  return prepare(std::move(ds), {1999, 2000});
}

}  // namespace

TEST(AutoknnConfig, DefaultsAndFeatureCounts) {
  const auto t = AutoknnConfig::for_variable("tmp2m");
  EXPECT_EQ(t.k, 20u);
  EXPECT_EQ(t.neighbors_used, 20u);
  EXPECT_EQ(t.feature_count(), 24u);
  const auto p = AutoknnConfig::for_variable("precipitation");
  EXPECT_EQ(p.variable, KnnVariable::Precipitation);
  EXPECT_EQ(p.feature_count(), 5u);
  EXPECT_EQ(p.span, 56);
  EXPECT_EQ(t.lags(kHorizon), (std::vector<int>{29, 58, 365}));
  EXPECT_EQ(t.lags(Horizon::weeks56()), (std::vector<int>{43, 86, 365}));
  EXPECT_THROW(AutoknnConfig::for_variable("rhum"), Error);
  AutoknnConfig bad;
  bad.neighbors_used = 21;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(KnnSimilarities, MatchOracleAndRankings) {
  const Frame a = random_anomalies(1, make_date(2000, 1, 1), make_date(2003, 12, 31));
  const Date target = make_date(2003, 11, 1);
  const auto candidates = dates_in(a, make_date(2001, 3, 1), make_date(2003, 10, 1));
  const auto sims = knn_similarities(target, a, candidates);
  const auto expected = oracle::similarities(target, a, candidates, 365, 60);
  ASSERT_EQ(sims.size(), expected.size());
  for (std::size_t i = 0; i < sims.size(); ++i) {
    EXPECT_EQ(sims[i].date, expected[i].first);
    EXPECT_NEAR(sims[i].value, expected[i].second, 1e-12);
    EXPECT_GE(sims[i].value, -1.0);
    EXPECT_LE(sims[i].value, 1.0);
  }
  const Date issue = issue_of_target(target, kHorizon);
  std::vector<Date> ranked;
  for (const auto& s : top_k_neighbors(target, sims, 20, issue).neighbors) ranked.push_back(s.date);
  EXPECT_EQ(ranked, oracle::top_k(expected, 20, issue, 14));
}

TEST(KnnSimilarities, SkipsUnusableDays) {
  Frame a = random_anomalies(2, make_date(2000, 1, 1), make_date(2002, 6, 30));
  a.at(*a.find(make_date(2001, 5, 1)), 3) = kMissing;
  std::fill(a.row(*a.find(make_date(2001, 3, 10))).begin(), a.row(*a.find(make_date(2001, 3, 10))).end(), 0.0);
  const Date target = make_date(2002, 6, 1);
  const auto candidates = dates_in(a, make_date(2001, 2, 27), make_date(2002, 5, 1));
  const auto sims = knn_similarities(target, a, candidates);
  const auto expected = oracle::similarities(target, a, candidates, 365, 60);
  ASSERT_EQ(sims.size(), expected.size());
  for (std::size_t i = 0; i < sims.size(); ++i) EXPECT_NEAR(sims[i].value, expected[i].second, 1e-12);
  // Candidates whose history starts before the frame are left out.
  EXPECT_EQ(sims.front().date, make_date(2001, 2, 28));
  EXPECT_THROW(knn_similarities(make_date(2000, 6, 1), a, candidates), Error);
}

TEST(KnnSimilarities, SelfSimilarityAndSymmetry) {
  const Frame a = random_anomalies(3, make_date(2000, 1, 1), make_date(2002, 12, 31));
  const Date s = make_date(2002, 4, 1), t = make_date(2002, 9, 9);
  EXPECT_NEAR(knn_similarities(t, a, std::vector<Date>{t}).front().value, 1.0, 1e-14);
  EXPECT_NEAR(knn_similarities(t, a, std::vector<Date>{s}).front().value,
              knn_similarities(s, a, std::vector<Date>{t}).front().value, 1e-15);
}

TEST(KnnSimilarities, InvariantToPerDayRescaling) {
  const Frame a = random_anomalies(4, make_date(2000, 1, 1), make_date(2002, 12, 31));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  Frame b = a;
  for (std::size_t i = 0; i < b.rows(); ++i) {
    const double k = scale(rng);
    for (double& v : b.row(i)) v *= k;
  }
  const Date target = make_date(2002, 12, 1);
  const auto candidates = dates_in(a, make_date(2001, 6, 1), make_date(2002, 10, 1));
  const auto x = knn_similarities(target, a, candidates);
  const auto y = knn_similarities(target, b, candidates);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i].value, y[i].value, 1e-13);
}

TEST(KnnSimilarities, IdenticalPatternGivesOne) {
  std::vector<double> pattern{1, -2, 0.5, 3, 1, -1, 2, 0, 4};
  const Frame a = fixtures::make_frame("t", kGrid, fixtures::days_between(make_date(2000, 1, 1), make_date(2001, 12, 31)),
                                       [&](Date, std::size_t g) { return pattern[g]; });
  const auto candidates = dates_in(a, make_date(2001, 3, 1), make_date(2001, 9, 1));
  for (const auto& s : knn_similarities(make_date(2001, 12, 1), a, candidates)) EXPECT_NEAR(s.value, 1.0, 1e-15);
}

TEST(TopK, ViabilityTiesAndArgmax) {
  const Date issue = make_date(2017, 4, 18);
  const std::vector<Similarity> sims{{make_date(2017, 4, 4), 0.9},   // ends Apr 17: viable
                                     {make_date(2017, 4, 5), 0.99},  // ends Apr 18: not viable
                                     {make_date(2016, 1, 2), 0.5},
                                     {make_date(2015, 1, 2), 0.5},
                                     {make_date(2016, 7, 2), -0.2}};
  const auto top = top_k_neighbors(make_date(2017, 5, 3), sims, 3, issue);
  ASSERT_EQ(top.neighbors.size(), 3u);
  EXPECT_EQ(top.neighbors[0].date, make_date(2017, 4, 4));
  EXPECT_EQ(top.neighbors[1].date, make_date(2015, 1, 2));
  EXPECT_EQ(top.neighbors[2].date, make_date(2016, 1, 2));
  EXPECT_EQ(top_k_neighbors(make_date(2017, 5, 3), sims, 1, issue).neighbors.front().date, make_date(2017, 4, 4));
  EXPECT_EQ(top_k_neighbors(make_date(2017, 5, 3), sims, 10, issue).neighbors.size(), 4u);
}

TEST(UnitSpread, HasUnitPopulationStd) {
  std::mt19937_64 rng(6);
  const auto v = fixtures::normal_vector(rng, 100);
  const auto s = unit_spread(v);
  EXPECT_NEAR(population_stddev(s), 1.0, 1e-14);
  EXPECT_NEAR(s[3] / s[7], v[3] / v[7], 1e-14);
  EXPECT_THROW(unit_spread(std::vector<double>{2, 2, 2}), Error);
  EXPECT_THROW(unit_spread(std::vector<double>{1, kMissing}), Error);
}

TEST(AutoknnForecast, NeighborsMatchStandaloneSearch) {
  const auto s = generate_synthetic(7, kGrid, {2000, 2004});
  const auto prepared = prepare(s.dataset, {2000, 2003});
  const Date target = make_date(2004, 10, 2);
  const Date issue = issue_of_target(target, kHorizon);
  const DatasetView view(prepared, issue);
  auto config = AutoknnConfig::temperature();
  config.span = 20;
  const auto out = autoknn_forecast(target, kHorizon, config, view);
  EXPECT_EQ(view.violations(), 0u);
  EXPECT_LE(*view.latest_read(), view.cutoff());

  const Frame visible = prepared.anomalies_of("tmp2m").until(view.cutoff());
  std::vector<Date> candidates;
  for (Date d : visible.dates()) {
    if (d >= visible.dates().front() + Days{424}) candidates.push_back(d);
  }
  const auto sims = knn_similarities(target, visible, candidates);
  const auto expected = top_k_neighbors(target, sims, config.k, issue);
  EXPECT_EQ(out.neighbors.neighbors, expected.neighbors);

  const auto naive = oracle::top_k(oracle::similarities(target, visible, candidates, 365, 60), config.k, issue, 14);
  ASSERT_EQ(naive.size(), out.neighbors.neighbors.size());
  for (std::size_t i = 0; i < naive.size(); ++i) EXPECT_EQ(out.neighbors.neighbors[i].date, naive[i]);

  EXPECT_GT(out.training_rows, 0u);
  EXPECT_EQ(out.forecast.values.size(), kGrid.size());
  for (double v : out.forecast.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(AutoknnForecast, RepeatingAnomaliesArePredicted) {
  const auto prepared = periodic_dataset();
  const Date target = make_date(2006, 6, 1);
  const DatasetView view(prepared, issue_of_target(target, kHorizon));
  const auto out = autoknn_forecast(target, kHorizon, AutoknnConfig::temperature(), view);
  const auto observed = *prepared.anomalies_of("tmp2m").row_at(target);
  EXPECT_GE(skill(out.forecast.values, observed), 0.999);
  EXPECT_NEAR(out.neighbors.neighbors.front().value, 1.0, 1e-12);
  EXPECT_EQ((target - out.neighbors.neighbors.front().date).count() % 365, 0);
  EXPECT_GT(out.dropped_rows, 0u);
}

TEST(AutoknnForecast, PrecipitationDefaultsRun) {
  const auto prepared = periodic_dataset();
  const Date target = make_date(2006, 2, 1);
  const DatasetView view(prepared, issue_of_target(target, kHorizon));
  const auto out = autoknn_forecast(target, kHorizon, AutoknnConfig::precipitation(), view);
  const auto observed = *prepared.anomalies_of("tmp2m").row_at(target);
  EXPECT_GE(skill(out.forecast.values, observed), 0.999);
}

TEST(AutoknnForecast, RejectsMismatchedIssueAndShortHistory) {
  const auto prepared = periodic_dataset();
  const Date target = make_date(2006, 6, 1);
  const DatasetView wrong(prepared, issue_of_target(target, kHorizon) - Days{1});
  EXPECT_THROW(autoknn_forecast(target, kHorizon, AutoknnConfig::temperature(), wrong), Error);
  const Date early = make_date(1999, 9, 1);
  const DatasetView view(prepared, issue_of_target(early, kHorizon));
  EXPECT_THROW(autoknn_forecast(early, kHorizon, AutoknnConfig::temperature(), view), Error);
}

TEST(NeighborDiagnostics, OneRowPerRank) {
  fixtures::TempDir dir;
  NeighborSet a{make_date(2017, 5, 3), {{make_date(2012, 4, 30), 0.5}, {make_date(2010, 6, 1), 0.25}}, 2};
  NeighborSet b{make_date(2017, 5, 17), {{make_date(2011, 5, 1), 0.75}}, 1};
  const std::vector<NeighborSet> sets{a, b};
  write_neighbor_diagnostics(sets, dir.file("n.csv"));
  EXPECT_EQ(fixtures::read_text(dir.file("n.csv")),
            "target_date,target_month,rank,neighbor_date,neighbor_month,neighbor_year,similarity\n"
            "2017-05-03,5,1,2012-04-30,4,2012,0.5\n"
            "2017-05-03,5,2,2010-06-01,6,2010,0.25\n"
            "2017-05-17,5,1,2011-05-01,5,2011,0.75\n");
}

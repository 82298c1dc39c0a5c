#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subseas/dataset.hpp"
#include "subseas/frame.hpp"
#include "subseas/geotime.hpp"
#include "subseas/skill.hpp"

namespace subseas {

enum class KnnVariable { Temperature, Precipitation };

struct AutoknnConfig {
  KnnVariable variable = KnnVariable::Temperature;
  std::size_t k = 20;
  std::size_t neighbors_used = 20;
  int history = 60;     ///< days of anomaly history compared per candidate
  int year_lag = 365;   ///< history windows end this many days before each date
  int span = 182;       ///< day-of-year window of the regression; 182 keeps every date

  static AutoknnConfig temperature();
  static AutoknnConfig precipitation();
  /// "tmp2m"/"temperature" or "precip"/"precipitation".
  static AutoknnConfig for_variable(std::string_view name);

  /// Lagged target anomalies used as regressors: freshest, twice freshest, a year.
  std::vector<int> lags(const Horizon& horizon) const;
  /// lags + ones + neighbors_used
  std::size_t feature_count() const { return 4 + neighbors_used; }
  /// Throws Error{InvalidArgument}.
  void validate() const;
};

struct Similarity {
  Date date{};
  double value = 0.0;
  bool operator==(const Similarity&) const = default;
};

/// Mean over h in [0, history) of skill(a[t - year_lag - h], a[target - year_lag - h])
/// for every candidate t. Terms whose anomaly day is absent, has a missing
/// cell or has zero norm are skipped and the mean is over the remaining terms;
/// a candidate with no usable term, or whose history starts before the
/// frame's first date, is left out. Output follows candidate order. Throws
/// Error{InvalidArgument} when the target's own history is out of range.
std::vector<Similarity> knn_similarities(Date target, const Frame& anomalies, std::span<const Date> candidates,
                                         int year_lag = 365, int history = 60);

/// Ranked neighbors of one date: similarity non-increasing, ties broken
/// towards the earlier date.
struct NeighborSet {
  Date target_date{};
  std::vector<Similarity> neighbors;
  std::size_t k = 0;
};

/// The k most similar viable candidates, where a candidate starting at s is
/// viable iff s + period_days - 1 < issue. Fewer than k viable candidates
/// returns all of them with a warning.
NeighborSet top_k_neighbors(Date target, std::span<const Similarity> sims, std::size_t k, Date issue,
                            int period_days = 14);

/// values / population_stddev(values). Throws Error{Degenerate} if a value is
/// missing or the spread is zero.
std::vector<double> unit_spread(std::span<const double> values);

struct AutoknnOutput {
  ForecastAnomaly forecast;
  NeighborSet neighbors;        ///< neighbors of the target date
  std::size_t training_rows = 0;
  std::size_t dropped_rows = 0;  ///< window dates lacking lags, neighbors or spread
};

/// Weighted local autoregression on [lag anomalies, ones, knn1..knn_m] with
/// climatology offsets and weights 1 / Var_g(target anomaly). Every training
/// date gets its own neighbor search, restricted to candidates viable at that
/// date's issue date. Throws Error{EmptyWindow} if the target date has fewer
/// than neighbors_used viable neighbors and Error{MissingSource} if its lag
/// features are missing.
AutoknnOutput autoknn_forecast(Date target_date, const Horizon& horizon, const AutoknnConfig& config,
                               const DatasetView& view);

/// CSV `target_date,target_month,rank,neighbor_date,neighbor_month,neighbor_year,similarity`,
/// one row per (target date, rank).
void write_neighbor_diagnostics(std::span<const NeighborSet> sets, const std::string& path);

}  // namespace subseas

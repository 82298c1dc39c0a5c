#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "subseas/dataset.hpp"
#include "subseas/geotime.hpp"
#include "subseas/llr.hpp"
#include "subseas/skill.hpp"

namespace subseas {

/// One candidate regressor: the value of `source` `lag` days before the
/// training date, optionally as an anomaly. An empty source is the constant
/// feature `ones`.
struct CatalogEntry {
  std::string name;
  std::string source;
  int lag = 0;
  bool anomaly = false;

  bool is_constant() const { return source.empty(); }
  bool operator==(const CatalogEntry&) const = default;
};

class FeatureCatalog {
 public:
  FeatureCatalog() = default;
  /// Throws Error{InvalidArgument} on duplicate names.
  explicit FeatureCatalog(std::vector<CatalogEntry> entries);

  static CatalogEntry ones();
  /// Named `<source>_shift<lag>`, with an `_anom` suffix for anomalies.
  static CatalogEntry lagged(std::string source, int lag, bool anomaly);

  /// Comma- or semicolon-separated items: `ones`, `<source>@<lag>` or
  /// `<source>@<lag>:anom`.
  static FeatureCatalog parse(std::string_view list);

  /// ones; target anomalies at the freshest lag, twice the freshest lag and
  /// 365 days; every dataset feature at the freshest lag.
  static FeatureCatalog default_for(const Dataset& dataset, const Horizon& horizon);

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::vector<std::string> names() const;
  std::string to_string() const;

 private:
  std::vector<CatalogEntry> entries_;
};

/// Catalog columns for every admissible training date inside the day-of-year
/// window of the target date, per grid point, plus the target date's own
/// feature vector.
struct TrainingData {
  FeatureCatalog catalog;
  Horizon horizon;
  Date target_date{};
  std::size_t grid_size = 0;
  std::vector<Date> dates;
  std::vector<double> x;            ///< (row * G + g) * d + column
  std::vector<double> y;            ///< row * G + g
  std::vector<double> clim;         ///< row * G + g
  std::vector<double> target_x;     ///< g * d + column
  std::vector<double> target_clim;  ///< g

  std::size_t feature_count() const { return catalog.size(); }
  std::span<const double> features(std::size_t row, std::size_t g) const {
    return {x.data() + (row * grid_size + g) * feature_count(), feature_count()};
  }
  std::span<const double> target_features(std::size_t g) const {
    return {target_x.data() + g * feature_count(), feature_count()};
  }
  double outcome(std::size_t row, std::size_t g) const { return y[row * grid_size + g]; }
  double climatology(std::size_t row, std::size_t g) const { return clim[row * grid_size + g]; }
  /// Outcome and every catalog feature are present.
  bool usable(std::size_t row, std::size_t g) const;
};

/// Reads every catalog column through the gated view. Training dates are the
/// admissible target dates within `span` days (circularly) of the target
/// date's day of year. Throws Error{LagViolation} for a non-constant entry
/// whose lag is below the horizon's freshest lag, Error{MissingSource} for
/// unknown sources, and Error{InvalidArgument} if the view's issue date is not
/// the target's issue date.
TrainingData build_design(const FeatureCatalog& catalog, Date target_date, const Horizon& horizon,
                          const DatasetView& view, int span = 56);

struct LoyocvResult {
  std::vector<Date> dates;                        ///< evaluated dates, doy == d*
  std::vector<std::vector<double>> predictions;   ///< predicted anomalies per date
  std::vector<double> skills;
  double mean_skill = 0.0;
  std::size_t skipped = 0;                        ///< dates without a defined skill
};

/// Leave-one-year-out cross-validation on the training dates that share the
/// target's day of year. For each such date t, rows in
/// [t - freshest_lag, t - freshest_lag + 364] are held out, the remaining
/// window rows are fit with unit weights and no offsets, and t is predicted.
/// Per-fold normal equations are accumulated once over the full catalog, so a
/// feature subset costs one small solve per fold and grid point.
class LoyocvEngine {
 public:
  explicit LoyocvEngine(const TrainingData& data, int span = 56);

  const TrainingData& data() const { return *data_; }
  DayOfYear center() const { return center_; }
  const std::vector<Date>& evaluation_dates() const { return eval_dates_; }
  std::pair<Date, Date> holdout(std::size_t fold) const;
  /// Training dates used by `fold` at grid index g.
  std::vector<Date> fold_training_dates(std::size_t fold, std::size_t g) const;

  /// Throws Error{NoEvaluableDates} when no fold yields a defined skill and
  /// Error{InvalidArgument} for an empty column set.
  LoyocvResult evaluate(std::span<const std::size_t> columns) const;

 private:
  bool in_fold(std::size_t fold, std::size_t row, std::size_t g) const;

  const TrainingData* data_;
  int span_;
  DayOfYear center_;
  std::vector<Date> eval_dates_;
  std::vector<std::size_t> eval_rows_;
  std::vector<NormalEquations> folds_;  ///< fold * G + g
};

LoyocvResult loyocv(const TrainingData& data, std::span<const std::size_t> columns, int span = 56);

struct SelectionStep {
  std::string removed;
  double mean_skill = 0.0;                ///< after removal
  std::vector<std::string> candidates;    ///< features considered this step
  std::vector<double> candidate_skills;   ///< mean skill without each candidate (NaN if undefined)
};

struct SelectionTrace {
  std::vector<std::string> initial;
  double initial_skill = 0.0;
  std::vector<SelectionStep> steps;
  std::vector<std::string> selected;
  double final_skill = 0.0;
  /// Candidate scores of the last, non-removing iteration.
  std::vector<std::string> final_candidates;
  std::vector<double> final_candidate_skills;
  /// Stopped because only one feature remained.
  bool forced_stop = false;
};

/// Backward stepwise selection on mean LOYOCV skill: while the best removal
/// loses less than `tol`, drop it (ties go to the lowest catalog index). The
/// last remaining feature is never removed.
SelectionTrace backward_stepwise(const LoyocvEngine& engine, double tol = 0.01);

/// CSV with header `step,removed_feature,mean_skill`; step 0 is the full set.
void write_selection_trace(const SelectionTrace& trace, const std::string& path);

/// Number of traces in which each catalog feature was selected, catalog order.
std::vector<std::pair<std::string, std::size_t>> selection_frequencies(const FeatureCatalog& catalog,
                                                                        std::span<const SelectionTrace> traces);

struct MultillrOptions {
  double tol = 0.01;
  int span = 56;
};

struct MultillrOutput {
  ForecastAnomaly forecast;
  SelectionTrace trace;
};

/// Selects features for the target's day of year, refits on every admissible
/// window row with the selected set and returns the predicted anomaly.
MultillrOutput multillr_forecast(Date target_date, const Horizon& horizon, const FeatureCatalog& catalog,
                                 const DatasetView& view, const MultillrOptions& options = {});

}  // namespace subseas

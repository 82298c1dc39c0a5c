#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subseas/climatology.hpp"
#include "subseas/frame.hpp"

namespace subseas {

/// A dataset directory: one `target_<var>.csv` plus any number of
/// `feature_<name>.csv` files, all on the same grid. Every row is a two-week
/// aggregate keyed by its period start date.
struct Dataset {
  std::string target_variable;
  Frame target;
  std::map<std::string, Frame, std::less<>> features;
  int period_days = 14;

  const GridSpec& grid() const { return target.grid(); }
  bool has_source(std::string_view name) const;
  /// The target frame when `name` is the target variable, otherwise the named
  /// feature. Throws Error{MissingSource}.
  const Frame& source(std::string_view name) const;
};

Dataset load_dataset(const std::string& directory);
void write_dataset(const Dataset& dataset, const std::string& directory);

/// Dataset plus climatologies over a fixed base period and the derived
/// anomaly frames.
struct PreparedDataset {
  Dataset data;
  YearRange base_years;
  std::map<std::string, Climatology, std::less<>> climatologies;
  std::map<std::string, Frame, std::less<>> anomalies;

  const Climatology& climatology(std::string_view source) const;
  const Frame& anomalies_of(std::string_view source) const;
};

/// Computes the target climatology (required) and feature climatologies
/// (skipped with a log line when the base period does not cover them).
PreparedDataset prepare(Dataset dataset, YearRange base_years);

/// Read-gated view of a prepared dataset at a forecast issue date. Only
/// periods fully observed before the issue date are visible: a period starting
/// at s is admissible iff s + period_days - 1 <= issue - 1. Attempts to read
/// past the cutoff return nothing and are counted as violations.
class DatasetView {
 public:
  DatasetView(const PreparedDataset& data, Date issue);
  DatasetView(const DatasetView&) = delete;
  DatasetView& operator=(const DatasetView&) = delete;

  Date issue() const { return issue_; }
  /// Last admissible period start.
  Date cutoff() const { return cutoff_; }
  int period_days() const { return data_->data.period_days; }
  const std::string& target_variable() const { return data_->data.target_variable; }
  const GridSpec& grid() const { return data_->data.grid(); }
  YearRange base_years() const { return data_->base_years; }

  bool has_source(std::string_view name) const { return data_->data.has_source(name); }
  bool has_anomalies(std::string_view name) const;
  /// Admissible dates of a source (its rows up to the cutoff).
  std::span<const Date> dates(std::string_view source) const;
  std::optional<std::span<const double>> row(std::string_view source, Date date) const;
  std::optional<std::span<const double>> anomaly_row(std::string_view source, Date date) const;
  /// Base-period climatologies precede every admissible issue date and are
  /// always readable.
  const Climatology& climatology(std::string_view source) const { return data_->climatology(source); }

  std::size_t violations() const { return violations_.load(); }
  /// Latest date actually returned by a gated read, if any.
  std::optional<Date> latest_read() const;

 private:
  std::optional<std::span<const double>> gated(const Frame& frame, Date date) const;

  const PreparedDataset* data_;
  Date issue_;
  Date cutoff_;
  mutable std::atomic<std::size_t> violations_{0};
  mutable std::atomic<long long> latest_read_;
};

}  // namespace subseas

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "subseas/frame.hpp"
#include "subseas/geotime.hpp"

namespace subseas {

/// Long-term mean per month-day and grid point. Keys are the 365 days of a
/// common year; Feb 29 lookups resolve to Feb 28.
class Climatology {
 public:
  Climatology() = default;
  Climatology(std::string variable, GridSpec grid);

  const std::string& variable() const { return variable_; }
  const GridSpec& grid() const { return grid_; }

  bool covers(DayOfYear doy) const { return present_[index(doy)]; }
  bool covers(Date date) const { return covers(day_of_year(date)); }

  /// Throws Error{UncoveredMonthDay} if the month-day has no value.
  std::span<const double> at(DayOfYear doy) const;
  std::span<const double> at(Date date) const { return at(day_of_year(date)); }

  /// Number of base-period observations behind each value.
  std::span<const int> counts(DayOfYear doy) const;

  void set(DayOfYear doy, std::span<const double> values, std::span<const int> counts = {});

 private:
  static std::size_t index(DayOfYear doy) { return static_cast<std::size_t>(doy.value() - 1); }

  std::string variable_;
  GridSpec grid_;
  std::array<bool, 365> present_{};
  std::vector<double> values_;
  std::vector<int> counts_;
};

/// Mean of frame values over dates whose year lies in `base_years`, per
/// month-day and grid point, divided by the count of present observations.
/// Feb 29 rows do not contribute. Throws Error{UncoveredMonthDay} when a
/// month-day present in the base period has a grid point with no observation.
Climatology compute_climatology(const Frame& frame, YearRange base_years);

/// value - climatology(month-day of the row date), missing stays missing.
Frame anomalize(const Frame& frame, const Climatology& clim);
/// Inverse of anomalize: anomaly + climatology.
Frame add_climatology(const Frame& anomalies, const Climatology& clim);

/// Sentinel-year encoding: each month-day is written once with a
/// representative date in 1799-12-19 .. 1800-12-18.
void write_climatology(const Climatology& clim, const std::string& path);
/// Accepts any dates; each row is keyed by its month-day.
Climatology read_climatology(const std::string& path, const ReadOptions& options = {});
Frame climatology_as_frame(const Climatology& clim);

}  // namespace subseas

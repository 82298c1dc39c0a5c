#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace subseas {

/// Calendar dates are epoch-day integers (days since 1970-01-01).
using Date = std::chrono::sys_days;
using Days = std::chrono::days;

Date make_date(int year, unsigned month, unsigned day);

/// Parses strict ISO-8601 "YYYY-MM-DD"; throws Error{Parse} otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date date);

int year_of(Date date);
unsigned month_of(Date date);

/// Day of year in 1..365 under the convention that Feb 29 is the same day as
/// Feb 28. Every later day of a leap year therefore shares its value with the
/// same month-day of a common year.
class DayOfYear {
 public:
  constexpr DayOfYear() = default;
  /// Throws Error{InvalidArgument} outside 1..365.
  explicit DayOfYear(int value);

  constexpr int value() const { return value_; }
  constexpr auto operator<=>(const DayOfYear&) const = default;

 private:
  int value_ = 1;
};

DayOfYear day_of_year(Date date);

/// Representative (month, day) of a common year for the given day of year.
std::chrono::month_day month_day_of(DayOfYear doy);

/// min(|a-b|, 365-|a-b|)
int circular_distance(DayOfYear a, DayOfYear b);

/// Dates whose circular day-of-year distance to `center` is at most `span`.
/// Input order is preserved. Span must lie in 0..182.
std::vector<Date> circular_window(DayOfYear center, int span,
                                  const std::vector<Date>& dates);

bool in_circular_window(DayOfYear center, int span, Date date);

enum class HorizonKind { Weeks34, Weeks56 };

/// Forecast horizon. The target period starts `issue_to_target_offset` days
/// after the issue date; the freshest fully observed two-week aggregate
/// starts `freshest_lag` days before the target date.
struct Horizon {
  HorizonKind kind = HorizonKind::Weeks34;
  int issue_to_target_offset = 15;
  int freshest_lag = 29;

  static Horizon weeks34();
  static Horizon weeks56();
  static Horizon from_kind(HorizonKind kind);
  /// Accepts "weeks34" / "weeks56" (also "34w" / "56w").
  static Horizon parse(std::string_view name);

  std::string name() const;
  bool operator==(const Horizon&) const = default;
};

Date target_start(Date issue, const Horizon& horizon);
Date issue_of_target(Date target, const Horizon& horizon);

/// Biweekly issue dates between `first` and `last` inclusive. Stepping restarts
/// on each anniversary of `first`, so every year-long cycle holds at most 26
/// issue dates (26 * 14 = 364 days).
std::vector<Date> issue_schedule(Date first, Date last);

/// Issue dates from Apr 18 of year Y through Apr 17 of year Y+1 belong to
/// evaluation year Y.
int evaluation_year(Date issue);

struct YearRange {
  int first = 0;
  int last = 0;
  bool contains(int year) const { return year >= first && year <= last; }
  bool operator==(const YearRange&) const = default;
};

struct GridPoint {
  int lat = 0;  ///< integer degrees north
  int lon = 0;  ///< integer degrees east, 0..359
  auto operator<=>(const GridPoint&) const = default;
};

/// Ordered set of grid points. Points are sorted latitude-major ascending,
/// then longitude ascending; every grid-length vector in the library uses this
/// order.
class GridSpec {
 public:
  GridSpec() = default;
  /// Sorts the points; throws Error{InvalidArgument} on duplicates.
  explicit GridSpec(std::vector<GridPoint> points);

  /// Western-US contest grid: 1-degree points between 31N-49N and 124W-93W
  /// following an approximate land mask, 514 points in total.
  static GridSpec contest();
  /// Every integer point of the rectangle, inclusive on both ends.
  static GridSpec box(int lat_min, int lat_max, int lon_min, int lon_max);
  /// Reads a "lat,lon" CSV with header.
  static GridSpec read(const std::string& path);

  const std::vector<GridPoint>& points() const { return points_; }
  const std::vector<int>& latitudes() const { return latitudes_; }
  const std::vector<int>& longitudes() const { return longitudes_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::optional<std::size_t> index_of(GridPoint p) const;

  bool operator==(const GridSpec& other) const { return points_ == other.points_; }

 private:
  std::vector<GridPoint> points_;
  std::vector<int> latitudes_;
  std::vector<int> longitudes_;
};

}  // namespace subseas

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subseas/geotime.hpp"
#include "subseas/numeric.hpp"

namespace subseas {

/// Values of one variable indexed by (period start date, grid point). Rows are
/// dates in strictly increasing order, columns follow the grid order. Missing
/// cells hold NaN.
class Frame {
 public:
  Frame() = default;
  /// Throws Error{InvalidArgument} if dates are not strictly increasing or the
  /// value count does not equal dates * grid points.
  Frame(std::string variable, GridSpec grid, std::vector<Date> dates, std::vector<double> values);

  /// Frame with the given dates and all cells missing.
  static Frame missing(std::string variable, GridSpec grid, std::vector<Date> dates);

  const std::string& variable() const { return variable_; }
  void set_variable(std::string name) { variable_ = std::move(name); }
  const GridSpec& grid() const { return grid_; }
  const std::vector<Date>& dates() const { return dates_; }
  std::size_t rows() const { return dates_.size(); }
  std::size_t cols() const { return grid_.size(); }
  bool empty() const { return dates_.empty(); }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols(), cols()}; }
  double at(std::size_t i, std::size_t g) const { return values_[i * cols() + g]; }
  double& at(std::size_t i, std::size_t g) { return values_[i * cols() + g]; }
  std::span<const double> values() const { return values_; }

  std::optional<std::size_t> find(Date date) const;
  /// Row for `date`, or an empty optional when the frame has no such row.
  std::optional<std::span<const double>> row_at(Date date) const;

  /// Rows with date <= last.
  Frame until(Date last) const;

  /// Cell-wise equality where two missing cells compare equal. Values are
  /// compared bit-for-bit.
  bool identical(const Frame& other) const;

 private:
  std::string variable_;
  GridSpec grid_;
  std::vector<Date> dates_;
  std::vector<double> values_;
};

struct ReadOptions {
  /// When set, the frame uses exactly this grid; rows naming any other point
  /// are rejected. Otherwise the grid is the set of points present in the file.
  std::optional<GridSpec> grid;
  /// Variable name; defaults to the file stem with any "target_"/"feature_"
  /// prefix removed.
  std::string variable;
};

/// Reads the columnar format: header "lat,lon,start_date,value", one cell per
/// line, empty value meaning missing.
Frame read_frame(const std::string& path, const ReadOptions& options = {});
/// Writes rows sorted by date then grid order; values in shortest round-trip
/// decimal form. Output is byte-deterministic.
void write_frame(const Frame& frame, const std::string& path);

std::string format_value(double value);

enum class AggregationKind { Mean, Sum };

struct AggregationRule {
  AggregationKind kind = AggregationKind::Mean;
  int window = 14;
  /// Strict: any missing constituent day makes the aggregate missing.
  /// Lenient: aggregate over present days; missing only if all are missing.
  bool strict = true;
};

/// Value at date t aggregates daily values over t .. t+window-1. Days absent
/// from the input count as missing. One output row per input date.
Frame aggregate_daily(const Frame& daily, const AggregationRule& rule);

}  // namespace subseas

#include "subseas/frame.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string_view>

#include "subseas/error.hpp"

namespace subseas {

namespace {

constexpr std::string_view kHeader = "lat,lon,start_date,value";

std::string default_variable(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  for (std::string_view prefix : {"target_", "feature_"}) {
    if (stem.starts_with(prefix)) return stem.substr(prefix.size());
  }
  return stem;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Frame::Frame(std::string variable, GridSpec grid, std::vector<Date> dates, std::vector<double> values)
    : variable_(std::move(variable)), grid_(std::move(grid)), dates_(std::move(dates)), values_(std::move(values)) {
  if (values_.size() != dates_.size() * grid_.size()) {
    throw Error(ErrorCode::InvalidArgument, "frame '" + variable_ + "': value count does not match shape");
  }
  if (std::adjacent_find(dates_.begin(), dates_.end(), std::greater_equal<>{}) != dates_.end()) {
    throw Error(ErrorCode::InvalidArgument, "frame '" + variable_ + "': dates must be strictly increasing");
  }
}

Frame Frame::missing(std::string variable, GridSpec grid, std::vector<Date> dates) {
  std::vector<double> values(dates.size() * grid.size(), kMissing);
  return Frame(std::move(variable), std::move(grid), std::move(dates), std::move(values));
}

std::optional<std::size_t> Frame::find(Date date) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end() || *it != date) return std::nullopt;
  return static_cast<std::size_t>(it - dates_.begin());
}

std::optional<std::span<const double>> Frame::row_at(Date date) const {
  if (auto i = find(date)) return row(*i);
  return std::nullopt;
}

Frame Frame::until(Date last) const {
  const auto n = static_cast<std::size_t>(std::upper_bound(dates_.begin(), dates_.end(), last) - dates_.begin());
  std::vector<Date> dates(dates_.begin(), dates_.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<double> values(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n * cols()));
  return Frame(variable_, grid_, std::move(dates), std::move(values));
}

bool Frame::identical(const Frame& other) const {
  if (variable_ != other.variable_ || !(grid_ == other.grid_) || dates_ != other.dates_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double a = values_[i];
    const double b = other.values_[i];
    if (is_missing(a) && is_missing(b)) continue;
    if (std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b)) return false;
  }
  return true;
}

std::string format_value(double value) {
  if (is_missing(value)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::InvalidArgument, "cannot format value");
  return std::string(buf, ptr);
}

Frame read_frame(const std::string& path, const ReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);

  const auto fail = [&](int lineno, const std::string& what) -> Error {
    return Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": " + what);
  };

  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw fail(1, "expected header '" + std::string(kHeader) + "'");
  }

  struct Cell {
    GridPoint point;
    Date date;
    double value;
  };
  std::vector<Cell> cells;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::string_view rest(line);
    std::string_view fields[4];
    for (int f = 0; f < 3; ++f) {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) throw fail(lineno, "malformed row, expected 4 fields");
      fields[f] = rest.substr(0, comma);
      rest.remove_prefix(comma + 1);
    }
    if (rest.find(',') != std::string_view::npos) throw fail(lineno, "malformed row, expected 4 fields");
    fields[3] = rest;

    Cell cell{};
    if (!parse_number(fields[0], cell.point.lat) || !parse_number(fields[1], cell.point.lon)) {
      throw fail(lineno, "malformed lat/lon");
    }
    try {
      cell.date = parse_date(fields[2]);
    } catch (const Error& e) {
      throw fail(lineno, e.what());
    }
    if (fields[3].empty()) {
      cell.value = kMissing;
    } else if (!parse_number(fields[3], cell.value)) {
      throw fail(lineno, "malformed value '" + std::string(fields[3]) + "'");
    }
    if (options.grid && !options.grid->index_of(cell.point)) {
      throw Error(ErrorCode::UnknownGridPoint, path + ":" + std::to_string(lineno) + ": grid point (" +
                                                   std::to_string(cell.point.lat) + "," +
                                                   std::to_string(cell.point.lon) + ") not in grid");
    }
    cells.push_back(cell);
  }

  GridSpec grid;
  if (options.grid) {
    grid = *options.grid;
  } else {
    std::vector<GridPoint> points;
    for (const auto& c : cells) points.push_back(c.point);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    grid = GridSpec(std::move(points));
  }
  std::vector<Date> dates;
  for (const auto& c : cells) dates.push_back(c.date);
  std::sort(dates.begin(), dates.end());
  dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

  const std::string variable = options.variable.empty() ? default_variable(path) : options.variable;
  Frame frame = Frame::missing(variable, grid, dates);
  std::vector<bool> seen(frame.rows() * frame.cols(), false);
  for (const auto& c : cells) {
    const std::size_t i = *frame.find(c.date);
    const std::size_t g = *grid.index_of(c.point);
    const std::size_t k = i * frame.cols() + g;
    if (seen[k]) {
      throw Error(ErrorCode::DuplicateKey, path + ": duplicate entry for (" + std::to_string(c.point.lat) + "," +
                                               std::to_string(c.point.lon) + "," + format_date(c.date) + ")");
    }
    seen[k] = true;
    frame.at(i, g) = c.value;
  }
  return frame;
}

void write_frame(const Frame& frame, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << kHeader << '\n';
  const auto& points = frame.grid().points();
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    const std::string date = format_date(frame.dates()[i]);
    for (std::size_t g = 0; g < points.size(); ++g) {
      out << points[g].lat << ',' << points[g].lon << ',' << date << ',' << format_value(frame.at(i, g)) << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

Frame aggregate_daily(const Frame& daily, const AggregationRule& rule) {
  if (rule.window < 1) throw Error(ErrorCode::InvalidArgument, "aggregation window must be >= 1");
  Frame out = Frame::missing(daily.variable(), daily.grid(), daily.dates());
  const std::size_t G = daily.cols();
  std::vector<double> sum(G), count(G);
  std::vector<bool> any_missing(G);
  for (std::size_t i = 0; i < daily.rows(); ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0.0);
    std::fill(any_missing.begin(), any_missing.end(), false);
    const Date start = daily.dates()[i];
    std::size_t j = i;
    for (int k = 0; k < rule.window; ++k) {
      const Date day = start + Days{k};
      while (j < daily.rows() && daily.dates()[j] < day) ++j;
      const bool present = j < daily.rows() && daily.dates()[j] == day;
      for (std::size_t g = 0; g < G; ++g) {
        const double v = present ? daily.at(j, g) : kMissing;
        if (is_missing(v)) {
          any_missing[g] = true;
        } else {
          sum[g] += v;
          count[g] += 1.0;
        }
      }
    }
    for (std::size_t g = 0; g < G; ++g) {
      if (count[g] == 0.0 || (rule.strict && any_missing[g])) continue;
      out.at(i, g) = rule.kind == AggregationKind::Sum ? sum[g] : sum[g] / count[g];
    }
  }
  return out;
}

}  // namespace subseas

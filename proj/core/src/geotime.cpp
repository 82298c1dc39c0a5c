#include "subseas/geotime.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

#include "subseas/error.hpp"

namespace subseas {

namespace {

using std::chrono::year_month_day;

constexpr std::array<int, 13> kCumulativeDays = {0,   31,  59,  90,  120, 151, 181,
                                                 212, 243, 273, 304, 334, 365};

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::Parse, "invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

Date anniversary(Date first, int years_after) {
  const year_month_day ymd{first};
  year_month_day shifted{ymd.year() + std::chrono::years{years_after}, ymd.month(), ymd.day()};
  if (!shifted.ok()) {
    // Feb 29 anchor in a common year.
    shifted = year_month_day{shifted.year(), ymd.month(), std::chrono::day{28}};
  }
  return Date{shifted};
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                           std::chrono::day{day}};
  if (!ymd.ok()) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "invalid calendar date %04d-%02u-%02u", year, month, day);
    throw Error(ErrorCode::InvalidArgument, buf);
  }
  return Date{ymd};
}

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::Parse, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const int y = parse_int(text.substr(0, 4), "year");
  const int m = parse_int(text.substr(5, 2), "month");
  const int d = parse_int(text.substr(8, 2), "day");
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                           std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error(ErrorCode::Parse, "invalid date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date date) {
  const year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

int year_of(Date date) { return static_cast<int>(year_month_day{date}.year()); }

unsigned month_of(Date date) { return static_cast<unsigned>(year_month_day{date}.month()); }

DayOfYear::DayOfYear(int value) : value_(value) {
  if (value < 1 || value > 365) {
    throw Error(ErrorCode::InvalidArgument, "day of year out of range: " + std::to_string(value));
  }
}

DayOfYear day_of_year(Date date) {
  const year_month_day ymd{date};
  const auto month = static_cast<unsigned>(ymd.month());
  auto day = static_cast<int>(static_cast<unsigned>(ymd.day()));
  if (month == 2 && day == 29) day = 28;
  return DayOfYear{kCumulativeDays[month - 1] + day};
}

std::chrono::month_day month_day_of(DayOfYear doy) {
  const int v = doy.value();
  unsigned month = 1;
  while (kCumulativeDays[month] < v) ++month;
  return std::chrono::month{month} /
         std::chrono::day{static_cast<unsigned>(v - kCumulativeDays[month - 1])};
}

int circular_distance(DayOfYear a, DayOfYear b) {
  const int diff = std::abs(a.value() - b.value());
  return std::min(diff, 365 - diff);
}

bool in_circular_window(DayOfYear center, int span, Date date) {
  return circular_distance(day_of_year(date), center) <= span;
}

std::vector<Date> circular_window(DayOfYear center, int span, const std::vector<Date>& dates) {
  if (span < 0 || span > 182) {
    throw Error(ErrorCode::InvalidArgument, "span must lie in 0..182");
  }
  std::vector<Date> out;
  for (Date d : dates) {
    if (in_circular_window(center, span, d)) out.push_back(d);
  }
  return out;
}

Horizon Horizon::weeks34() { return Horizon{HorizonKind::Weeks34, 15, 29}; }
Horizon Horizon::weeks56() { return Horizon{HorizonKind::Weeks56, 29, 43}; }

Horizon Horizon::from_kind(HorizonKind kind) {
  return kind == HorizonKind::Weeks34 ? weeks34() : weeks56();
}

Horizon Horizon::parse(std::string_view name) {
  if (name == "weeks34" || name == "34w") return weeks34();
  if (name == "weeks56" || name == "56w") return weeks56();
  throw Error(ErrorCode::InvalidArgument, "unknown horizon '" + std::string(name) + "'");
}

std::string Horizon::name() const { return kind == HorizonKind::Weeks34 ? "weeks34" : "weeks56"; }

Date target_start(Date issue, const Horizon& horizon) {
  return issue + Days{horizon.issue_to_target_offset};
}

Date issue_of_target(Date target, const Horizon& horizon) {
  return target - Days{horizon.issue_to_target_offset};
}

std::vector<Date> issue_schedule(Date first, Date last) {
  if (last < first) throw Error(ErrorCode::InvalidArgument, "issue schedule: last precedes first");
  std::vector<Date> out;
  for (int y = 0;; ++y) {
    const Date anchor = anniversary(first, y);
    if (anchor > last) break;
    const Date next = anniversary(first, y + 1);
    for (int k = 0; k < 26; ++k) {
      const Date d = anchor + Days{14 * k};
      if (d > last || d >= next) break;
      out.push_back(d);
    }
  }
  return out;
}

int evaluation_year(Date issue) {
  const year_month_day ymd{issue};
  const auto y = static_cast<int>(ymd.year());
  const auto md = ymd.month() / ymd.day();
  return md >= std::chrono::April / 18 ? y : y - 1;
}

GridSpec::GridSpec(std::vector<GridPoint> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  if (std::adjacent_find(points_.begin(), points_.end()) != points_.end()) {
    throw Error(ErrorCode::InvalidArgument, "grid contains duplicate points");
  }
  std::set<int> lats, lons;
  for (const auto& p : points_) {
    lats.insert(p.lat);
    lons.insert(p.lon);
  }
  latitudes_.assign(lats.begin(), lats.end());
  longitudes_.assign(lons.begin(), lons.end());
}

GridSpec GridSpec::contest() {
  // Per-latitude longitude runs in degrees west, from 49N down to 31N.
  struct Run { int lat, west, east; };
  static constexpr std::array<Run, 19> kRuns = {{
      {49, 122, 95}, {48, 124, 94}, {47, 124, 94}, {46, 124, 94}, {45, 124, 94},
      {44, 124, 94}, {43, 124, 94}, {42, 124, 94}, {41, 124, 94}, {40, 124, 94},
      {39, 123, 94}, {38, 123, 94}, {37, 122, 94}, {36, 121, 94}, {35, 120, 95},
      {34, 119, 96}, {33, 117, 97}, {32, 114, 103}, {31, 111, 105},
  }};
  std::vector<GridPoint> points;
  for (const auto& run : kRuns) {
    for (int w = run.west; w >= run.east; --w) points.push_back({run.lat, 360 - w});
  }
  return GridSpec(std::move(points));
}

GridSpec GridSpec::box(int lat_min, int lat_max, int lon_min, int lon_max) {
  std::vector<GridPoint> points;
  for (int lat = lat_min; lat <= lat_max; ++lat) {
    for (int lon = lon_min; lon <= lon_max; ++lon) points.push_back({lat, lon});
  }
  return GridSpec(std::move(points));
}

GridSpec GridSpec::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open grid file " + path);
  std::string line;
  std::getline(in, line);
  if (line != "lat,lon") throw Error(ErrorCode::Parse, path + ":1: expected header 'lat,lon'");
  std::vector<GridPoint> points;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": malformed row");
    }
    const std::string_view view(line);
    points.push_back({parse_int(view.substr(0, comma), "lat"), parse_int(view.substr(comma + 1), "lon")});
  }
  return GridSpec(std::move(points));
}

std::optional<std::size_t> GridSpec::index_of(GridPoint p) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), p);
  if (it == points_.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

}  // namespace subseas

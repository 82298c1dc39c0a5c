#include "subseas/climatology.hpp"

#include <algorithm>

#include "subseas/error.hpp"

namespace subseas {

namespace {

Date sentinel_date(DayOfYear doy) {
  const auto md = month_day_of(doy);
  const auto month = static_cast<unsigned>(md.month());
  const auto day = static_cast<unsigned>(md.day());
  return make_date(month == 12 && day >= 19 ? 1799 : 1800, month, day);
}

bool is_leap_day(Date date) {
  const std::chrono::year_month_day ymd{date};
  return ymd.month() == std::chrono::February && ymd.day() == std::chrono::day{29};
}

}  // namespace

Climatology::Climatology(std::string variable, GridSpec grid)
    : variable_(std::move(variable)),
      grid_(std::move(grid)),
      values_(365 * grid_.size(), kMissing),
      counts_(365 * grid_.size(), 0) {}

std::span<const double> Climatology::at(DayOfYear doy) const {
  if (!covers(doy)) {
    const auto md = month_day_of(doy);
    throw Error(ErrorCode::UncoveredMonthDay,
                "climatology '" + variable_ + "' has no value for month " +
                    std::to_string(static_cast<unsigned>(md.month())) + " day " +
                    std::to_string(static_cast<unsigned>(md.day())));
  }
  return {values_.data() + index(doy) * grid_.size(), grid_.size()};
}

std::span<const int> Climatology::counts(DayOfYear doy) const {
  return {counts_.data() + index(doy) * grid_.size(), grid_.size()};
}

void Climatology::set(DayOfYear doy, std::span<const double> values, std::span<const int> counts) {
  if (values.size() != grid_.size()) throw Error(ErrorCode::InvalidArgument, "climatology row length mismatch");
  const std::size_t off = index(doy) * grid_.size();
  std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(off));
  if (!counts.empty()) std::copy(counts.begin(), counts.end(), counts_.begin() + static_cast<std::ptrdiff_t>(off));
  present_[index(doy)] = true;
}

Climatology compute_climatology(const Frame& frame, YearRange base_years) {
  const std::size_t G = frame.cols();
  std::vector<double> sums(365 * G, 0.0);
  std::vector<int> counts(365 * G, 0);
  std::array<bool, 365> seen{};
  // Rows are visited in ascending date order, which fixes the summation order.
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    const Date d = frame.dates()[i];
    if (!base_years.contains(year_of(d)) || is_leap_day(d)) continue;
    const auto k = static_cast<std::size_t>(day_of_year(d).value() - 1);
    seen[k] = true;
    for (std::size_t g = 0; g < G; ++g) {
      const double v = frame.at(i, g);
      if (is_missing(v)) continue;
      sums[k * G + g] += v;
      counts[k * G + g] += 1;
    }
  }
  Climatology clim(frame.variable(), frame.grid());
  std::vector<double> row(G);
  for (std::size_t k = 0; k < 365; ++k) {
    if (!seen[k]) continue;
    const DayOfYear doy(static_cast<int>(k + 1));
    for (std::size_t g = 0; g < G; ++g) {
      const int n = counts[k * G + g];
      if (n == 0) {
        throw Error(ErrorCode::UncoveredMonthDay,
                    "climatology '" + frame.variable() + "': no observations for day of year " +
                        std::to_string(k + 1) + " at grid index " + std::to_string(g));
      }
      row[g] = sums[k * G + g] / n;
    }
    clim.set(doy, row, std::span<const int>(counts.data() + k * G, G));
  }
  return clim;
}

namespace {

template <typename Op>
Frame combine(const Frame& frame, const Climatology& clim, Op op) {
  if (!(frame.grid() == clim.grid())) throw Error(ErrorCode::InvalidArgument, "climatology grid mismatch");
  std::vector<double> values(frame.values().begin(), frame.values().end());
  Frame out(frame.variable(), frame.grid(), frame.dates(), std::move(values));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto c = clim.at(out.dates()[i]);
    auto row = out.row(i);
    for (std::size_t g = 0; g < row.size(); ++g) {
      if (!is_missing(row[g])) row[g] = op(row[g], c[g]);
    }
  }
  return out;
}

}  // namespace

Frame anomalize(const Frame& frame, const Climatology& clim) {
  return combine(frame, clim, [](double v, double c) { return v - c; });
}

Frame add_climatology(const Frame& anomalies, const Climatology& clim) {
  return combine(anomalies, clim, [](double v, double c) { return v + c; });
}

Frame climatology_as_frame(const Climatology& clim) {
  std::vector<Date> dates;
  std::vector<DayOfYear> keys;
  for (int v = 1; v <= 365; ++v) {
    if (clim.covers(DayOfYear{v})) keys.push_back(DayOfYear{v});
  }
  // Dec 19-31 map to 1799 and therefore sort first.
  std::sort(keys.begin(), keys.end(),
            [](DayOfYear a, DayOfYear b) { return sentinel_date(a) < sentinel_date(b); });
  for (auto k : keys) dates.push_back(sentinel_date(k));
  Frame frame = Frame::missing(clim.variable(), clim.grid(), dates);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto c = clim.at(keys[i]);
    std::copy(c.begin(), c.end(), frame.row(i).begin());
  }
  return frame;
}

void write_climatology(const Climatology& clim, const std::string& path) {
  write_frame(climatology_as_frame(clim), path);
}

Climatology read_climatology(const std::string& path, const ReadOptions& options) {
  const Frame frame = read_frame(path, options);
  Climatology clim(frame.variable(), frame.grid());
  std::array<bool, 365> seen{};
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    const Date d = frame.dates()[i];
    if (is_leap_day(d)) continue;
    const DayOfYear doy = day_of_year(d);
    if (seen[static_cast<std::size_t>(doy.value() - 1)]) {
      throw Error(ErrorCode::DuplicateKey, path + ": month-day of " + format_date(d) + " appears twice");
    }
    seen[static_cast<std::size_t>(doy.value() - 1)] = true;
    clim.set(doy, frame.row(i));
  }
  return clim;
}

}  // namespace subseas

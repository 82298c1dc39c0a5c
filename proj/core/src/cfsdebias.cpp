#include "subseas/cfsdebias.hpp"

#include "subseas/error.hpp"

namespace subseas {

Frame average_members(std::span<const Frame> members) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "average_members: no members");
  const Frame& first = members.front();
  for (const Frame& m : members) {
    if (m.grid() != first.grid() || m.dates() != first.dates()) {
      throw Error(ErrorCode::InvalidArgument, "average_members: members differ in grid or dates");
    }
  }
  Frame out = Frame::missing(first.variable(), first.grid(), first.dates());
  for (std::size_t i = 0; i < first.rows(); ++i) {
    for (std::size_t g = 0; g < first.cols(); ++g) {
      double sum = 0.0;
      int present = 0;
      for (const Frame& m : members) {
        const double v = m.at(i, g);
        if (is_missing(v)) continue;
        sum += v;
        ++present;
      }
      if (present > 0) out.at(i, g) = sum / present;
    }
  }
  return out;
}

void DebiasClimPair::validate() const {
  if (reforecast.grid() != observed.grid()) {
    throw Error(ErrorCode::InvalidArgument, "debias: reforecast and observed climatologies use different grids");
  }
  for (int d = 1; d <= 365; ++d) {
    if (reforecast.covers(DayOfYear(d)) != observed.covers(DayOfYear(d))) {
      throw Error(ErrorCode::InvalidArgument, "debias: climatologies cover different month-days");
    }
  }
}

Frame debias(const Frame& forecast, const DebiasClimPair& pair) {
  pair.validate();
  if (forecast.grid() != pair.observed.grid()) {
    throw Error(ErrorCode::InvalidArgument, "debias: forecast grid differs from the climatology grid");
  }
  Frame out = forecast;
  for (std::size_t i = 0; i < forecast.rows(); ++i) {
    const Date t = forecast.dates()[i];
    const auto model = pair.reforecast.at(t);
    const auto obs = pair.observed.at(t);
    auto row = out.row(i);
    for (std::size_t g = 0; g < row.size(); ++g) row[g] = row[g] - model[g] + obs[g];
  }
  return out;
}

}  // namespace subseas

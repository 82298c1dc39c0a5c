#pragma once

#include <span>

#include "subseas/climatology.hpp"
#include "subseas/frame.hpp"

namespace subseas {

/// Cell-wise mean over member forecasts, ignoring members that are missing a
/// cell; missing only when every member is. Members must share variable grid
/// and dates. Throws Error{InvalidArgument} for no members or mismatched
/// members.
Frame average_members(std::span<const Frame> members);

/// Model (reforecast) and observed climatologies over the same period.
struct DebiasClimPair {
  Climatology reforecast;
  Climatology observed;

  /// Throws Error{InvalidArgument} when grids or month-day coverage differ.
  void validate() const;
  DebiasClimPair swapped() const { return {observed, reforecast}; }
};

/// forecast - reforecast(month-day) + observed(month-day), cell-wise.
/// Throws Error{UncoveredMonthDay} if a forecast date's month-day is not
/// covered.
Frame debias(const Frame& forecast, const DebiasClimPair& pair);

}  // namespace subseas

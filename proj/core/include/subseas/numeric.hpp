#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace subseas {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

// Pairwise (cascade) summation with a fixed split, so results depend only on
// the input order and never on thread scheduling.
double pairwise_sum(std::span<const double> values);
double pairwise_dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> values);

double mean(std::span<const double> values);
/// Population variance (divides by the length).
double population_variance(std::span<const double> values);
double population_stddev(std::span<const double> values);

bool all_finite(std::span<const double> values);

}  // namespace subseas

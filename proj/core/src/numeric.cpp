#include "subseas/numeric.hpp"

#include <algorithm>

namespace subseas {

namespace {

constexpr std::size_t kBlock = 16;

double dot_range(const double* a, const double* b, std::size_t n) {
  if (n <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t half = n / 2;
  return dot_range(a, b, half) + dot_range(a + half, b + half, n - half);
}

double sum_range(const double* a, std::size_t n) {
  if (n <= kBlock) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  const std::size_t half = n / 2;
  return sum_range(a, half) + sum_range(a + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return sum_range(values.data(), values.size()); }

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  return dot_range(a.data(), b.data(), std::min(a.size(), b.size()));
}

double norm2(std::span<const double> values) { return std::sqrt(pairwise_dot(values, values)); }

double mean(std::span<const double> values) {
  if (values.empty()) return kMissing;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  if (values.empty()) return kMissing;
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) { return std::sqrt(population_variance(values)); }

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace subseas

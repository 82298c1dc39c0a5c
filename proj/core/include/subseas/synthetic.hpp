#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subseas/climatology.hpp"
#include "subseas/dataset.hpp"

namespace subseas {

/// Parameters of the synthetic generator. The target is
///
///   y(t, g) = seasonal(doy(t), g) + sum_j beta[j][g] * x_j(t - feature_lag, g) + noise
///
/// over a sparse active subset of the candidate features x_j. Features are
/// two-week means of unit-variance daily AR(1) fields. With the defaults, every
/// target value stays inside [64, 128), where sums and differences of values
/// and their climatologies are exact in binary64.
struct SyntheticSpec {
  std::string target_variable = "tmp2m";
  int n_features = 10;
  int n_active = 3;
  int feature_lag = 29;
  double baseline = 96.0;
  double seasonal_amplitude = 4.0;
  double spatial_offset = 3.0;
  double coefficient_min = 0.5;
  double coefficient_max = 1.5;
  double feature_persistence = 0.9;
  /// Expected skill of the true signal against the realized anomaly; sets the
  /// noise level unless `noise_sd` is given.
  double target_skill = 0.8;
  std::optional<double> noise_sd;
  /// Members of a synthetic dynamical forecast: target plus a smooth
  /// seasonal bias plus member noise.
  int model_members = 0;
  double model_bias = 1.5;
  double model_noise_sd = 1.0;
  int period_days = 14;
};

struct SyntheticTruth {
  std::uint64_t seed = 0;
  std::vector<std::string> features;
  std::vector<std::string> active;
  /// Per active feature, one coefficient per grid point.
  std::map<std::string, std::vector<double>> coefficients;
  double noise_sd = 0.0;
  /// Mean over dates of skill(true signal, signal + noise).
  double oracle_skill = 0.0;
  int feature_lag = 0;
  Climatology seasonal;
};

struct SyntheticDataset {
  Dataset dataset;
  SyntheticTruth truth;
  std::vector<Frame> model_members;
};

/// Deterministic per seed. Target dates cover Jan 1 of years.first through
/// Dec 31 of years.last; feature frames start feature_lag days earlier.
SyntheticDataset generate_synthetic(std::uint64_t seed, const GridSpec& grid, YearRange years,
                                    const SyntheticSpec& spec = {});

/// Writes the dataset files plus manifest.txt (key=value), coefficients.csv,
/// seasonal.csv (sentinel-year climatology) and model_member_<i>.csv.
void write_synthetic(const SyntheticDataset& synthetic, const std::string& directory);

std::map<std::string, std::string> read_manifest(const std::string& path);

}  // namespace subseas

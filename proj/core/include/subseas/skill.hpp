#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subseas/geotime.hpp"

namespace subseas {

/// Cosine similarity <f, o> / (|f| |o|) between a forecast anomaly and the
/// observed anomaly over the grid. Throws Error{UndefinedSkill} if either
/// vector has zero norm (or the lengths differ).
double skill(std::span<const double> forecast, std::span<const double> observed);

/// Forecast anomaly over the grid for one target period.
struct ForecastAnomaly {
  std::string model_name;
  Date target_start{};
  Horizon horizon;
  std::vector<double> values;
};

/// Nonnegative weights summing to one (within 1e-12).
class EnsembleWeights {
 public:
  /// Throws Error{InvalidArgument} if a weight is negative or the sum is off.
  explicit EnsembleWeights(std::vector<double> weights);
  static EnsembleWeights uniform(std::size_t m);

  const std::vector<double>& values() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<double> weights_;
};

/// sum_i p_i * f_i / |f_i|. Throws Error{Degenerate} for a zero-norm input.
std::vector<double> normalized_average(std::span<const std::span<const double>> forecasts,
                                       const EnsembleWeights& weights);

struct EnsembleOutput {
  ForecastAnomaly forecast;
  /// The normalized constituents cancelled exactly; the forecast is the zero
  /// vector and has no defined skill.
  bool degenerate = false;
};

/// Throws Error{Degenerate} for zero-norm constituents and
/// Error{InvalidArgument} when targets, horizons or lengths disagree.
EnsembleOutput ensemble(std::span<const ForecastAnomaly> forecasts, const EnsembleWeights& weights,
                        std::string model_name = {});

/// Evaluation of the ensemble-benefit inequality on one instance:
/// sign(sum p_i cos_i) == sign(cos(ensemble)) and |sum p_i cos_i| <= |cos(ensemble)|.
struct EnsembleBenefitReport {
  double lhs = 0.0;               ///< sum_i p_i cos(f_i, observed)
  std::optional<double> rhs;      ///< cos(ensemble, observed); empty when degenerate
  bool degenerate = false;
  bool sign_match = false;
  bool magnitude_ok = false;      ///< |lhs| <= |rhs| + slack
  bool strict = false;            ///< |lhs| < |rhs|
};

EnsembleBenefitReport verify_ensemble_benefit(std::span<const std::span<const double>> forecasts,
                                              const EnsembleWeights& weights,
                                              std::span<const double> observed, double slack = 1e-12);

}  // namespace subseas

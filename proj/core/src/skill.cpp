#include "subseas/skill.hpp"

#include <algorithm>
#include <cmath>

#include "subseas/error.hpp"
#include "subseas/numeric.hpp"

namespace subseas {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double skill(std::span<const double> forecast, std::span<const double> observed) {
  if (forecast.size() != observed.size()) {
    throw Error(ErrorCode::UndefinedSkill, "skill: length mismatch");
  }
  const double nf = norm2(forecast);
  const double no = norm2(observed);
  if (!(nf > 0.0) || !(no > 0.0)) {
    throw Error(ErrorCode::UndefinedSkill, "skill undefined for zero-norm anomaly vector");
  }
  return std::clamp(pairwise_dot(forecast, observed) / (nf * no), -1.0, 1.0);
}

EnsembleWeights::EnsembleWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(ErrorCode::InvalidArgument, "ensemble weights: empty");
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ensemble weights must be nonnegative");
  }
  if (std::abs(pairwise_sum(weights_) - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "ensemble weights must sum to 1");
  }
}

EnsembleWeights EnsembleWeights::uniform(std::size_t m) {
  return EnsembleWeights(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

std::vector<double> normalized_average(std::span<const std::span<const double>> forecasts,
                                       const EnsembleWeights& weights) {
  if (forecasts.empty() || forecasts.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "ensemble: need one weight per forecast");
  }
  const std::size_t n = forecasts.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    if (forecasts[i].size() != n) throw Error(ErrorCode::InvalidArgument, "ensemble: length mismatch");
    const double norm = norm2(forecasts[i]);
    if (!(norm > 0.0)) throw Error(ErrorCode::Degenerate, "ensemble: zero-norm constituent forecast");
    const double scale = weights.values()[i] / norm;
    for (std::size_t g = 0; g < n; ++g) out[g] += scale * forecasts[i][g];
  }
  return out;
}

EnsembleOutput ensemble(std::span<const ForecastAnomaly> forecasts, const EnsembleWeights& weights,
                        std::string model_name) {
  if (forecasts.empty()) throw Error(ErrorCode::InvalidArgument, "ensemble: no forecasts");
  std::vector<std::span<const double>> views;
  std::string constituents;
  for (const auto& f : forecasts) {
    if (f.target_start != forecasts.front().target_start || !(f.horizon == forecasts.front().horizon)) {
      throw Error(ErrorCode::InvalidArgument, "ensemble: constituents target different periods");
    }
    views.emplace_back(f.values);
    constituents += (constituents.empty() ? "" : "+") + f.model_name;
  }
  EnsembleOutput out;
  out.forecast.model_name = model_name.empty() ? "ensemble(" + constituents + ")" : std::move(model_name);
  out.forecast.target_start = forecasts.front().target_start;
  out.forecast.horizon = forecasts.front().horizon;
  out.forecast.values = normalized_average(views, weights);
  out.degenerate = !(norm2(out.forecast.values) > 0.0);
  return out;
}

EnsembleBenefitReport verify_ensemble_benefit(std::span<const std::span<const double>> forecasts,
                                              const EnsembleWeights& weights, std::span<const double> observed,
                                              double slack) {
  EnsembleBenefitReport report;
  double lhs = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) lhs += weights.values()[i] * skill(forecasts[i], observed);
  report.lhs = lhs;
  const std::vector<double> combined = normalized_average(forecasts, weights);
  if (!(norm2(combined) > 0.0)) {
    report.degenerate = true;
    return report;
  }
  const double rhs = skill(combined, observed);
  report.rhs = rhs;
  report.sign_match =
      sign_of(lhs) == sign_of(rhs) || (std::abs(lhs) <= slack && std::abs(rhs) <= slack);
  report.magnitude_ok = std::abs(lhs) <= std::abs(rhs) + slack;
  report.strict = std::abs(lhs) < std::abs(rhs);
  return report;
}

}  // namespace subseas

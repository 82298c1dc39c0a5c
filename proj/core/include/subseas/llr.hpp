#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "subseas/geotime.hpp"

namespace subseas {

/// Training data of one grid point: for each date t, features x_t, outcome
/// y_t, offset b_t and weight w_t.
struct RegressionDesign {
  std::vector<Date> dates;
  Eigen::MatrixXd features;  ///< rows = dates, columns = regressors
  Eigen::VectorXd outcomes;
  Eigen::VectorXd offsets;
  Eigen::VectorXd weights;
};

/// Accumulated weighted normal equations: gram = sum w x x^T and
/// moment = sum w x (y - b). Rows are added in the order given.
struct NormalEquations {
  Eigen::MatrixXd gram;
  Eigen::VectorXd moment;
  std::size_t rows = 0;
  double weight_sum = 0.0;

  explicit NormalEquations(Eigen::Index d = 0)
      : gram(Eigen::MatrixXd::Zero(d, d)), moment(Eigen::VectorXd::Zero(d)) {}

  template <typename Row>
  void add(const Row& x, double residual_target, double w) {
    gram.noalias() += w * x * x.transpose();
    moment.noalias() += (w * residual_target) * x;
    ++rows;
    weight_sum += w;
  }
};

/// Minimum-norm minimizer of the quadratic with the given normal equations.
/// Eigenvalues at or below rel_cutoff * (largest eigenvalue) are treated as
/// zero, which yields the pseudo-inverse solution for singular systems.
Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment,
                               double rel_cutoff = 1e-10);

/// Normal equations over the rows of `design` within the circular
/// day-of-year window; rows with any missing entry are dropped.
NormalEquations accumulate_window(const RegressionDesign& design, DayOfYear center, int span);

struct FitResult {
  std::vector<Eigen::VectorXd> coefficients;  ///< one per grid point
  std::vector<std::size_t> rows_used;         ///< effective training-set size per grid point
  DayOfYear center;
  int span = 0;
};

/// Weighted local linear regression, fit independently per grid point:
/// beta_g minimizes sum_{t in window} w (y - b - beta . x)^2.
/// Throws Error{EmptyWindow} when a grid point has no usable row in the window
/// and Error{ZeroWeights} when all its weights are zero.
FitResult fit_wllr(DayOfYear center, int span, std::span<const RegressionDesign> designs);

/// y_g = b_g + beta_g . x_g. Throws Error{InvalidArgument} on length mismatch.
std::vector<double> predict(const FitResult& fit, std::span<const Eigen::VectorXd> features,
                            std::span<const double> offsets);

}  // namespace subseas

#include "subseas/llr.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "subseas/error.hpp"
#include "subseas/parallel.hpp"

namespace subseas {

Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment, double rel_cutoff) {
  const Eigen::Index d = gram.rows();
  if (d == 0) return Eigen::VectorXd(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double largest = lambda(d - 1);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  if (!(largest > 0.0)) return beta;
  const double cutoff = rel_cutoff * largest;
  const Eigen::VectorXd projected = eig.eigenvectors().transpose() * moment;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (lambda(k) > cutoff) beta.noalias() += (projected(k) / lambda(k)) * eig.eigenvectors().col(k);
  }
  return beta;
}

NormalEquations accumulate_window(const RegressionDesign& design, DayOfYear center, int span) {
  const Eigen::Index n = static_cast<Eigen::Index>(design.dates.size());
  if (design.features.rows() != n || design.outcomes.size() != n || design.offsets.size() != n ||
      design.weights.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "regression design: inconsistent row counts");
  }
  NormalEquations eq(design.features.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!in_circular_window(center, span, design.dates[static_cast<std::size_t>(i)])) continue;
    const double w = design.weights(i);
    const double target = design.outcomes(i) - design.offsets(i);
    if (!std::isfinite(w) || !std::isfinite(target) || !design.features.row(i).allFinite()) continue;
    if (w < 0.0) throw Error(ErrorCode::InvalidArgument, "regression design: negative weight");
    eq.add(design.features.row(i).transpose(), target, w);
  }
  return eq;
}

FitResult fit_wllr(DayOfYear center, int span, std::span<const RegressionDesign> designs) {
  if (span < 0 || span > 182) throw Error(ErrorCode::InvalidArgument, "span must lie in 0..182");
  FitResult fit;
  fit.center = center;
  fit.span = span;
  fit.coefficients.resize(designs.size());
  fit.rows_used.resize(designs.size());
  std::vector<int> status(designs.size(), 0);
  parallel_for_each_index(designs.size(), [&](std::size_t g) {
    const NormalEquations eq = accumulate_window(designs[g], center, span);
    fit.rows_used[g] = eq.rows;
    if (eq.rows == 0) {
      status[g] = 1;
    } else if (!(eq.weight_sum > 0.0)) {
      status[g] = 2;
    } else {
      fit.coefficients[g] = solve_min_norm(eq.gram, eq.moment);
    }
  });
  for (std::size_t g = 0; g < status.size(); ++g) {
    if (status[g] == 1) {
      throw Error(ErrorCode::EmptyWindow, "no usable training rows in window at grid index " + std::to_string(g));
    }
    if (status[g] == 2) {
      throw Error(ErrorCode::ZeroWeights, "all training weights are zero at grid index " + std::to_string(g));
    }
  }
  return fit;
}

std::vector<double> predict(const FitResult& fit, std::span<const Eigen::VectorXd> features,
                            std::span<const double> offsets) {
  if (features.size() != fit.coefficients.size() || offsets.size() != fit.coefficients.size()) {
    throw Error(ErrorCode::InvalidArgument, "predict: grid length mismatch");
  }
  std::vector<double> out(features.size());
  for (std::size_t g = 0; g < features.size(); ++g) {
    if (features[g].size() != fit.coefficients[g].size()) {
      throw Error(ErrorCode::InvalidArgument, "predict: feature length does not match coefficients");
    }
    out[g] = offsets[g] + fit.coefficients[g].dot(features[g]);
  }
  return out;
}

}  // namespace subseas

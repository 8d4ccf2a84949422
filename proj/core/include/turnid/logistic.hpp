#pragma once

#include <span>
#include <string>
#include <vector>

#include "turnid/features.hpp"

namespace turnid {

struct LogisticParams {
  /// L2 penalty on every weight, bias included.
  double lambda = 1e-3;
  /// Stop once the gradient norm falls to this value.
  double tolerance = 1e-6;
  std::size_t max_iterations = 20000;
};

/// Per-feature z-scoring fitted on training data. Zero-variance features map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(std::span<const std::vector<double>> rows);
  std::vector<double> apply(std::span<const double> x) const;
};

/// Multinomial logistic regression on standardized features.
struct LogisticModel {
  std::vector<std::string> labels;
  std::size_t feature_count = 0;
  /// Row-major classes x (feature_count + 1); the last column is the bias.
  std::vector<double> weights;
  double lambda = 0.0;
  Standardizer standardizer;
  /// Loss after every accepted step, starting with the initial loss.
  std::vector<double> loss_history;
  double gradient_norm = 0.0;
  bool converged = false;

  std::vector<double> probabilities(std::span<const double> x) const;
  /// Most probable label; ties go to the smallest label.
  std::string predict(std::span<const double> x) const;
};

/// Mean cross-entropy plus (lambda / 2) * ||W||^2 over already-standardized rows.
/// Writes the gradient (same layout as LogisticModel::weights) when `gradient` is non-null.
double logistic_objective(std::span<const double> weights, std::span<const std::vector<double>> rows,
                          std::span<const std::size_t> classes, std::size_t class_count, double lambda,
                          std::vector<double>* gradient);

/// Gradient descent with Barzilai-Borwein initial steps and Armijo backtracking.
/// Throws NumericError if the loss becomes non-finite.
LogisticModel train_logistic(std::span<const std::vector<double>> rows, std::span<const std::string> labels,
                             const LogisticParams& params = {});
LogisticModel train_logistic(std::span<const FeatureVector> data, const LogisticParams& params = {});

}  // namespace turnid

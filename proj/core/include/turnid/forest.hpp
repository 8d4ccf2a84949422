#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "turnid/features.hpp"

namespace turnid {

/// Random-forest hyperparameters. Zero means "derive from the data" where noted.
struct ForestParams {
  std::size_t tree_count = 200;
  /// 0: ceil(sqrt(feature count)).
  std::size_t features_per_split = 0;
  /// 0: unbounded.
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  /// 0: the training set size.
  std::size_t bootstrap_size = 0;
  std::uint64_t seed = 1;
};

/// Split node when feature >= 0 (x[feature] <= threshold goes left), leaf otherwise.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  /// Class histogram of the in-bag samples reaching a leaf; empty for split nodes.
  std::vector<std::uint32_t> counts;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  /// Majority class of the reached leaf; ties go to the smallest class index.
  std::size_t vote(std::span<const double> x) const;
};

struct ForestPrediction {
  std::string label;
  std::size_t class_index = 0;
  /// Fraction of trees voting for each class, indexed like ForestModel::labels.
  std::vector<double> vote_fractions;
};

struct ForestModel {
  ForestParams params;
  /// Sorted ascending; class index order is label order.
  std::vector<std::string> labels;
  std::size_t feature_count = 0;
  std::vector<DecisionTree> trees;
  /// Normalized mean Gini decrease per feature (all zero if no tree ever split).
  std::vector<double> importances;
  /// Featurization model the forest was trained with, when built from aligned segments.
  std::optional<SitePca> pca;

  /// Plurality of tree votes; ties go to the lexicographically smallest label.
  ForestPrediction predict(std::span<const double> x) const;
};

/// Gini impurity 1 - sum p_c^2 of a class histogram (0 for an empty one).
double gini(std::span<const std::uint32_t> counts) noexcept;

/// Trains on rows of equal length. Each tree uses the stream derive_seed(seed, tree index).
ForestModel train_forest(std::span<const std::vector<double>> rows, std::span<const std::string> labels,
                         const ForestParams& params);
ForestModel train_forest(std::span<const FeatureVector> data, const ForestParams& params);

/// (feature name, weight) sorted by weight descending, ties by feature index.
std::vector<std::pair<std::string, double>> feature_importance(const ForestModel& model);

/// Sum of a 144-wide importance vector over each sensor's features, sorted descending.
std::vector<std::pair<Sensor, double>> sensor_importance(std::span<const double> importances);

}  // namespace turnid

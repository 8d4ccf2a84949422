#include "turnid/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "turnid/error.hpp"
#include "turnid/parallel.hpp"
#include "turnid/rng.hpp"

namespace turnid {

double gini(std::span<const std::uint32_t> counts) noexcept {
  double total = 0.0;
  for (auto c : counts) total += c;
  if (total == 0.0) return 0.0;
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = c / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

namespace {

std::size_t argmax_first(std::span<const std::uint32_t> counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return best;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const std::vector<double>> rows, std::span<const std::size_t> classes,
              std::size_t class_count, const ForestParams& params, std::size_t mtry)
      : rows_(rows), classes_(classes), class_count_(class_count), params_(params), mtry_(mtry) {}

  DecisionTree build(Rng& rng, std::vector<double>& importance) {
    const std::size_t n = rows_.size();
    const std::size_t boot = params_.bootstrap_size ? params_.bootstrap_size : n;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> sample(boot);
    for (auto& s : sample) s = pick(rng);

    DecisionTree tree;
    struct Pending {
      int node;
      std::vector<std::size_t> idx;
      std::size_t depth;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(sample), 0});
    const double total = static_cast<double>(boot);

    while (!stack.empty()) {
      Pending cur = std::move(stack.back());
      stack.pop_back();
      std::vector<std::uint32_t> counts = histogram(cur.idx);

      const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
      const bool depth_limited = params_.max_depth > 0 && cur.depth >= params_.max_depth;
      Split split;
      if (!pure && !depth_limited && cur.idx.size() >= 2 * params_.min_samples_leaf) {
        split = best_split(cur.idx, counts, rng);
      }
      if (split.feature < 0) {
        tree.nodes[static_cast<std::size_t>(cur.node)].counts = std::move(counts);
        continue;
      }

      importance[static_cast<std::size_t>(split.feature)] += split.decrease / total;
      std::vector<std::size_t> left, right;
      for (std::size_t i : cur.idx) {
        (rows_[i][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);
      }
      const int l = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      const int r = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[static_cast<std::size_t>(cur.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = l;
      node.right = r;
      // Right child is pushed first so the left subtree is numbered before it.
      stack.push_back({r, std::move(right), cur.depth + 1});
      stack.push_back({l, std::move(left), cur.depth + 1});
    }
    return tree;
  }

 private:
  std::vector<std::uint32_t> histogram(const std::vector<std::size_t>& idx) const {
    std::vector<std::uint32_t> counts(class_count_, 0);
    for (std::size_t i : idx) ++counts[classes_[i]];
    return counts;
  }

  // Draws features without replacement; keeps drawing past mtry until at
  // least one feature admits a valid partition.
  Split best_split(const std::vector<std::size_t>& idx, const std::vector<std::uint32_t>& counts, Rng& rng) {
    const std::size_t f_count = rows_.front().size();
    std::vector<std::size_t> order(f_count);
    std::iota(order.begin(), order.end(), 0);

    const double n = static_cast<double>(idx.size());
    const double parent = n * gini(counts);
    Split best;
    std::vector<std::pair<double, std::size_t>> column(idx.size());
    std::vector<std::uint32_t> left(class_count_);
    std::vector<std::uint32_t> right(class_count_);

    for (std::size_t drawn = 0; drawn < f_count; ++drawn) {
      if (drawn >= mtry_ && best.feature >= 0) break;
      std::uniform_int_distribution<std::size_t> pick(drawn, f_count - 1);
      std::swap(order[drawn], order[pick(rng)]);
      const std::size_t f = order[drawn];

      for (std::size_t k = 0; k < idx.size(); ++k) column[k] = {rows_[idx[k]][f], classes_[idx[k]]};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;

      std::fill(left.begin(), left.end(), 0);
      right = counts;
      const std::size_t min_leaf = params_.min_samples_leaf;
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        ++left[column[k].second];
        --right[column[k].second];
        const double a = column[k].first;
        const double b = column[k + 1].first;
        if (a == b) continue;
        const std::size_t n_left = k + 1;
        const std::size_t n_right = column.size() - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double child = static_cast<double>(n_left) * gini(left) + static_cast<double>(n_right) * gini(right);
        const double decrease = parent - child;
        if (decrease > best.decrease) {
          double t = a + 0.5 * (b - a);
          if (!(t > a && t < b)) t = a;
          best = {static_cast<int>(f), t, decrease};
        }
      }
    }
    if (best.feature >= 0) best.decrease = std::max(best.decrease, 0.0);
    return best;
  }

  std::span<const std::vector<double>> rows_;
  std::span<const std::size_t> classes_;
  std::size_t class_count_;
  const ForestParams& params_;
  std::size_t mtry_;
};

}  // namespace

std::size_t DecisionTree::vote(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return argmax_first(nodes[i].counts);
}

ForestPrediction ForestModel::predict(std::span<const double> x) const {
  if (x.size() != feature_count) {
    throw PreconditionError("feature vector has " + std::to_string(x.size()) + " values, model expects " +
                            std::to_string(feature_count));
  }
  std::vector<std::uint32_t> votes(labels.size(), 0);
  for (const auto& tree : trees) ++votes[tree.vote(x)];
  ForestPrediction p;
  p.class_index = argmax_first(votes);
  p.label = labels[p.class_index];
  p.vote_fractions.resize(labels.size());
  for (std::size_t c = 0; c < labels.size(); ++c) {
    p.vote_fractions[c] = static_cast<double>(votes[c]) / static_cast<double>(trees.size());
  }
  return p;
}

ForestModel train_forest(std::span<const std::vector<double>> rows, std::span<const std::string> labels,
                         const ForestParams& params) {
  if (rows.empty()) throw PreconditionError("cannot train a forest on empty data");
  if (rows.size() != labels.size()) throw PreconditionError("row and label counts differ");
  if (rows.size() < 2) throw PreconditionError("forest training needs at least 2 samples");
  if (params.tree_count < 1) throw PreconditionError("tree count must be at least 1");
  if (params.min_samples_leaf < 1) throw PreconditionError("min samples per leaf must be at least 1");
  const std::size_t f_count = rows.front().size();
  if (f_count == 0) throw PreconditionError("rows have no features");
  for (const auto& r : rows) {
    if (r.size() != f_count) throw PreconditionError("rows differ in length");
    for (double v : r) {
      if (!std::isfinite(v)) throw PreconditionError("non-finite feature value");
    }
  }

  ForestModel model;
  model.params = params;
  model.feature_count = f_count;
  model.labels.assign(labels.begin(), labels.end());
  std::sort(model.labels.begin(), model.labels.end());
  model.labels.erase(std::unique(model.labels.begin(), model.labels.end()), model.labels.end());
  if (model.labels.size() < 2) {
    throw PreconditionError("forest training needs at least 2 classes, got only \"" + model.labels.front() + "\"");
  }

  std::vector<std::size_t> classes(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    classes[i] = static_cast<std::size_t>(
        std::lower_bound(model.labels.begin(), model.labels.end(), labels[i]) - model.labels.begin());
  }

  std::size_t mtry = params.features_per_split;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(f_count))));
  if (mtry > f_count) throw PreconditionError("features per split exceeds feature count");
  model.params.features_per_split = mtry;

  model.trees.resize(params.tree_count);
  std::vector<std::vector<double>> per_tree(params.tree_count, std::vector<double>(f_count, 0.0));
  parallel_for(params.tree_count, [&](std::size_t t) {
    Rng rng = make_rng(params.seed, t);
    TreeBuilder builder(rows, classes, model.labels.size(), model.params, mtry);
    model.trees[t] = builder.build(rng, per_tree[t]);
  });

  model.importances.assign(f_count, 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t f = 0; f < f_count; ++f) model.importances[f] += imp[f];
  }
  const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
  if (total > 0.0) {
    for (double& v : model.importances) v /= total;
  }
  return model;
}

ForestModel train_forest(std::span<const FeatureVector> data, const ForestParams& params) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  rows.reserve(data.size());
  labels.reserve(data.size());
  for (const auto& fv : data) {
    rows.push_back(fv.values);
    labels.push_back(fv.driver_id);
  }
  return train_forest(rows, labels, params);
}

std::vector<std::pair<std::string, double>> feature_importance(const ForestModel& model) {
  const bool named = model.feature_count == kFeatureCount;
  std::vector<std::size_t> order(model.importances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return model.importances[a] > model.importances[b]; });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(order.size());
  for (std::size_t f : order) {
    out.emplace_back(named ? feature_names()[f] : "f" + std::to_string(f), model.importances[f]);
  }
  return out;
}

std::vector<std::pair<Sensor, double>> sensor_importance(std::span<const double> importances) {
  if (importances.size() != kFeatureCount) throw PreconditionError("sensor importance needs 144 features");
  std::vector<std::pair<Sensor, double>> out;
  for (Sensor s : kAllSensors) {
    double sum = 0.0;
    for (std::size_t k = 0; k < kFeaturesPerSensor; ++k) sum += importances[index(s) * kFeaturesPerSensor + k];
    out.emplace_back(s, sum);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

}  // namespace turnid

#include "turnid/model_io.hpp"

#include <json.hpp>

#include "turnid/error.hpp"

namespace turnid {

using nlohmann::json;

namespace {

json pca_to_json(const SitePca& pca) {
  json sensors = json::array();
  for (Sensor s : kAllSensors) {
    const PcaProjection& p = pca.sensors[index(s)];
    sensors.push_back({{"sensor", std::string(log_name(s))},
                       {"mean", p.mean},
                       {"components", p.components},
                       {"explained_variance", p.explained_variance},
                       {"kept", p.kept}});
  }
  return {{"site", pca.site_id}, {"rows", pca.rows}, {"sensors", std::move(sensors)}};
}

SitePca pca_from_json(const json& j) {
  SitePca pca;
  pca.site_id = j.at("site").get<int>();
  pca.rows = j.at("rows").get<std::size_t>();
  const json& sensors = j.at("sensors");
  if (sensors.size() != kSensorCount) throw ParseError(0, "pca block must list 12 sensors");
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    const json& o = sensors[i];
    PcaProjection& p = pca.sensors[i];
    p.mean = o.at("mean").get<std::vector<double>>();
    p.components = o.at("components").get<std::vector<std::vector<double>>>();
    p.explained_variance = o.at("explained_variance").get<std::vector<double>>();
    p.kept = o.at("kept").get<std::size_t>();
  }
  return pca;
}

}  // namespace

std::string model_to_json(const ForestModel& model) {
  json trees = json::array();
  for (const DecisionTree& tree : model.trees) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold;
    json counts = json::array();
    for (const TreeNode& n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      counts.push_back(n.counts);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"counts", std::move(counts)}});
  }

  const ForestParams& p = model.params;
  json out;
  out["version"] = kModelFormatVersion;
  out["params"] = {{"tree_count", p.tree_count},
                   {"features_per_split", p.features_per_split},
                   {"max_depth", p.max_depth},
                   {"min_samples_leaf", p.min_samples_leaf},
                   {"bootstrap_size", p.bootstrap_size},
                   {"seed", p.seed}};
  out["labels"] = model.labels;
  out["feature_count"] = model.feature_count;
  out["pca"] = model.pca ? pca_to_json(*model.pca) : json(nullptr);
  out["trees"] = std::move(trees);
  out["importances"] = model.importances;
  return out.dump() + "\n";
}

ForestModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("invalid model file: ") + e.what());
  }
  try {
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError(0, "unsupported model version " + std::to_string(version));
    }
    ForestModel m;
    const json& p = j.at("params");
    m.params.tree_count = p.at("tree_count").get<std::size_t>();
    m.params.features_per_split = p.at("features_per_split").get<std::size_t>();
    m.params.max_depth = p.at("max_depth").get<std::size_t>();
    m.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    m.params.bootstrap_size = p.at("bootstrap_size").get<std::size_t>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.feature_count = j.at("feature_count").get<std::size_t>();
    if (!j.at("pca").is_null()) m.pca = pca_from_json(j.at("pca"));
    m.importances = j.at("importances").get<std::vector<double>>();

    for (const json& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto counts = t.at("counts").get<std::vector<std::vector<std::uint32_t>>>();
      const std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || counts.size() != n || n == 0) {
        throw ParseError(0, "tree node arrays differ in length");
      }
      DecisionTree tree;
      tree.nodes.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        TreeNode& node = tree.nodes[i];
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.counts = counts[i];
        const bool leaf = node.feature < 0;
        if (leaf && node.counts.size() != m.labels.size()) throw ParseError(0, "leaf histogram size mismatch");
        if (!leaf && (node.feature >= static_cast<int>(m.feature_count) || node.left <= static_cast<int>(i) ||
                      node.right <= static_cast<int>(i) || node.left >= static_cast<int>(n) ||
                      node.right >= static_cast<int>(n))) {
          throw ParseError(0, "invalid split node");
        }
      }
      m.trees.push_back(std::move(tree));
    }
    if (m.trees.empty()) throw ParseError(0, "model has no trees");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("invalid model file: ") + e.what());
  }
}

}  // namespace turnid

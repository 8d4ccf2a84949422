#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "turnid/error.hpp"

namespace turnid::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParseError(0, "unknown key \"" + key + "\" in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ParseError(0, "run config must be a JSON object");
    reject_unknown(j,
                   {"inputs", "out", "sites", "drivers", "seed", "reps", "threads", "top", "radius",
                    "straightaway_offset", "drop", "detect", "forest"},
                   "run config");
    RunConfig c;
    read(j, "inputs", c.inputs);
    read(j, "out", c.out);
    read(j, "sites", c.sites);
    read(j, "drivers", c.drivers);
    read(j, "seed", c.seed);
    read(j, "reps", c.repetitions);
    read(j, "threads", c.threads);
    read(j, "top", c.top);
    read(j, "radius", c.radius_m);
    read(j, "straightaway_offset", c.straightaway_offset_m);
    if (j.contains("drop")) {
      const auto drop = j.at("drop").get<std::string>();
      if (drop == "earliest") c.drop = DropOrder::Earliest;
      else if (drop == "latest") c.drop = DropOrder::Latest;
      else throw ParseError(0, "\"drop\" must be \"earliest\" or \"latest\"");
    }
    if (j.contains("detect")) {
      const json& d = j.at("detect");
      reject_unknown(d,
                     {"min_heading_change", "max_duration", "stable_window", "stable_tolerance", "rate_window",
                      "min_turn_rate", "merge_gap", "boundary_tolerance"},
                     "\"detect\"");
      read(d, "min_heading_change", c.detect.min_heading_change_deg);
      read(d, "max_duration", c.detect.max_duration_s);
      read(d, "stable_window", c.detect.stable_window_s);
      read(d, "stable_tolerance", c.detect.stable_tolerance_deg);
      read(d, "rate_window", c.detect.rate_window_s);
      read(d, "min_turn_rate", c.detect.min_turn_rate_deg_s);
      read(d, "merge_gap", c.detect.merge_gap_s);
      read(d, "boundary_tolerance", c.detect.boundary_tolerance_deg);
    }
    if (j.contains("forest")) {
      const json& f = j.at("forest");
      reject_unknown(f, {"trees", "features_per_split", "max_depth", "min_samples_leaf", "bootstrap_size"},
                     "\"forest\"");
      read(f, "trees", c.forest.tree_count);
      read(f, "features_per_split", c.forest.features_per_split);
      read(f, "max_depth", c.forest.max_depth);
      read(f, "min_samples_leaf", c.forest.min_samples_leaf);
      read(f, "bootstrap_size", c.forest.bootstrap_size);
    }
    return c;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("invalid run config: ") + e.what());
  }
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["inputs"] = c.inputs;
  j["out"] = c.out;
  j["sites"] = c.sites;
  j["drivers"] = c.drivers;
  j["seed"] = c.seed;
  j["reps"] = c.repetitions;
  j["threads"] = c.threads;
  j["top"] = c.top;
  j["radius"] = c.radius_m;
  j["straightaway_offset"] = c.straightaway_offset_m;
  j["drop"] = c.drop == DropOrder::Earliest ? "earliest" : "latest";
  j["detect"] = {{"min_heading_change", c.detect.min_heading_change_deg},
                 {"max_duration", c.detect.max_duration_s},
                 {"stable_window", c.detect.stable_window_s},
                 {"stable_tolerance", c.detect.stable_tolerance_deg},
                 {"rate_window", c.detect.rate_window_s},
                 {"min_turn_rate", c.detect.min_turn_rate_deg_s},
                 {"merge_gap", c.detect.merge_gap_s},
                 {"boundary_tolerance", c.detect.boundary_tolerance_deg}};
  j["forest"] = {{"trees", c.forest.tree_count},
                 {"features_per_split", c.forest.features_per_split},
                 {"max_depth", c.forest.max_depth},
                 {"min_samples_leaf", c.forest.min_samples_leaf},
                 {"bootstrap_size", c.forest.bootstrap_size}};
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_config_from_json(buf.str());
}

}  // namespace turnid::cli

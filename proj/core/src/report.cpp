#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "turnid/error.hpp"
#include "turnid/eval.hpp"

namespace turnid {

using nlohmann::json;

std::string report_to_json(const EvalReport& r) {
  json importance = json::array();
  for (const auto& [sensor, weight] : r.sensor_importance) {
    importance.push_back({{"sensor", std::string(log_name(sensor))}, {"weight", weight}});
  }
  json out;
  out["site"] = r.site_id;
  out["kind"] = r.segment_kind;
  out["drivers"] = r.drivers;
  out["sessions_per_driver"] = r.sessions_per_driver;
  out["repetitions"] = r.repetitions;
  out["seed"] = r.seed;
  out["accuracy"] = r.accuracy;
  out["driver_ids"] = r.driver_ids;
  out["confusion_counts"] = r.confusion_counts;
  out["confusion_percent"] = r.confusion_percent;
  out["sensor_importance"] = std::move(importance);
  out["fold_accuracies"] = r.fold_accuracies;
  return out.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EvalReport r;
    r.site_id = j.at("site").get<int>();
    r.segment_kind = j.at("kind").get<std::string>();
    r.drivers = j.at("drivers").get<std::size_t>();
    r.sessions_per_driver = j.at("sessions_per_driver").get<std::size_t>();
    r.repetitions = j.at("repetitions").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.driver_ids = j.at("driver_ids").get<std::vector<std::string>>();
    r.confusion_counts = j.at("confusion_counts").get<std::vector<std::vector<std::size_t>>>();
    r.confusion_percent = j.at("confusion_percent").get<std::vector<std::vector<int>>>();
    for (const auto& o : j.at("sensor_importance")) {
      const auto name = o.at("sensor").get<std::string>();
      const auto sensor = sensor_from_log_name(name);
      if (!sensor) throw ParseError(0, "unknown sensor \"" + name + "\" in report");
      r.sensor_importance.emplace_back(*sensor, o.at("weight").get<double>());
    }
    r.fold_accuracies = j.at("fold_accuracies").get<std::vector<double>>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("invalid report file: ") + e.what());
  }
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_table(std::span<const EvalReport> reports, const std::map<int, std::string>& site_types,
                         std::span<const SkippedSite> skipped) {
  std::set<std::size_t> ns;
  std::set<int> sites;
  std::map<std::pair<int, std::size_t>, const EvalReport*> cell;
  for (const auto& r : reports) {
    ns.insert(r.drivers);
    sites.insert(r.site_id);
    cell[{r.site_id, r.drivers}] = &r;
  }
  auto type_of = [&](int site) {
    auto it = site_types.find(site);
    return it == site_types.end() || it->second.empty() ? std::string("unlabeled") : it->second;
  };

  constexpr std::size_t kSiteW = 6, kTypeW = 28, kCellW = 16;
  std::ostringstream out;
  out << pad("Site", kSiteW) << pad("Type", kTypeW);
  for (std::size_t n : ns) out << pad("n = " + std::to_string(n), kCellW);
  out << '\n' << std::string(kSiteW + kTypeW + kCellW * ns.size(), '-') << '\n';

  for (int site : sites) {
    out << pad(std::to_string(site), kSiteW) << pad(type_of(site), kTypeW);
    for (std::size_t n : ns) {
      auto it = cell.find({site, n});
      if (it == cell.end()) {
        out << pad("-", kCellW);
      } else {
        out << pad(fmt("%.1f%%", 100.0 * it->second->accuracy) + " (" +
                       std::to_string(it->second->sessions_per_driver) + ")",
                   kCellW);
      }
    }
    out << '\n';
  }
  out << std::string(kSiteW + kTypeW + kCellW * ns.size(), '-') << '\n';

  auto average_row = [&](const std::string& title, auto&& include) {
    out << pad("", kSiteW) << pad(title, kTypeW);
    for (std::size_t n : ns) {
      double sum = 0.0;
      std::size_t count = 0;
      for (int site : sites) {
        auto it = cell.find({site, n});
        if (it != cell.end() && include(site)) {
          sum += it->second->accuracy;
          ++count;
        }
      }
      out << pad(count ? fmt("%.1f%%", 100.0 * sum / static_cast<double>(count)) : "-", kCellW);
    }
    out << '\n';
  };

  std::set<std::string> types;
  for (int site : sites) types.insert(type_of(site));
  if (types.size() > 1) {
    for (const auto& t : types) average_row(t + " average", [&](int site) { return type_of(site) == t; });
  }
  average_row("Average across all sites", [](int) { return true; });

  for (const auto& s : skipped) {
    out << "skipped: site " << s.site_id << " (n = " << s.drivers << "): " << s.reason << '\n';
  }
  return out.str();
}

}  // namespace turnid

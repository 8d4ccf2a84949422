#include "turnid/turndetect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "turnid/error.hpp"

namespace turnid {

namespace {

struct Run {
  std::size_t first;
  std::size_t last;
  int sign;
};

std::size_t samples_for(double seconds, double period) {
  return static_cast<std::size_t>(std::llround(seconds / period));
}

// Maximal runs of samples whose heading rate exceeds the threshold with one sign.
std::vector<Run> rate_runs(const std::vector<double>& heading, double period,
                           const TurnDetectParams& p) {
  const std::size_t n = heading.size();
  const std::size_t half = std::max<std::size_t>(1, samples_for(0.5 * p.rate_window_s, period));
  std::vector<int> sign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    if (hi == lo) continue;
    const double rate = (heading[hi] - heading[lo]) / (static_cast<double>(hi - lo) * period);
    if (rate >= p.min_turn_rate_deg_s) sign[i] = 1;
    else if (rate <= -p.min_turn_rate_deg_s) sign[i] = -1;
  }

  std::vector<Run> runs;
  for (std::size_t i = 0; i < n;) {
    if (sign[i] == 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && sign[j + 1] == sign[i]) ++j;
    runs.push_back({i, j, sign[i]});
    i = j + 1;
  }

  const std::size_t max_gap = samples_for(p.merge_gap_s, period);
  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!merged.empty() && merged.back().sign == r.sign && r.first - merged.back().last - 1 <= max_gap) {
      merged.back().last = r.last;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

LatLon midpoint_position(const DenseTrace& trace, std::size_t a, std::size_t b) {
  const std::size_t sum = a + b;
  const LatLon& lo = trace.positions[sum / 2];
  if (sum % 2 == 0) return lo;
  const LatLon& hi = trace.positions[sum / 2 + 1];
  return {0.5 * (lo.lat + hi.lat), 0.5 * (lo.lon + hi.lon)};
}

LatLon centroid(const std::vector<TurnEvent>& members) {
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& m : members) {
    lat += m.center.lat;
    lon += m.center.lon;
  }
  const double n = static_cast<double>(members.size());
  return {lat / n, lon / n};
}

}  // namespace

std::vector<TurnEvent> detect_turns(const DenseTrace& trace, const TurnDetectParams& p) {
  std::vector<TurnEvent> events;
  const std::size_t n = trace.size();
  if (n < 2) return events;

  const auto heading = unwrap_degrees(trace.column(Sensor::Heading));
  const std::size_t stable_n = samples_for(p.stable_window_s, trace.period);

  for (const Run& run : rate_runs(heading, trace.period, p)) {
    std::size_t start = run.first;
    while (start < run.last && std::abs(heading[start + 1] - heading[run.first]) <= p.boundary_tolerance_deg) {
      ++start;
    }
    std::size_t end = run.last;
    while (end > start && std::abs(heading[end - 1] - heading[run.last]) <= p.boundary_tolerance_deg) {
      --end;
    }

    // run endpoints sit on settled heading (the rate window is centered), the
    // trimmed window only bounds the ramp in time
    const double change = heading[run.last] - heading[run.first];
    const double duration = static_cast<double>(end - start) * trace.period;
    if (std::abs(change) < p.min_heading_change_deg) continue;
    if (duration >= p.max_duration_s) continue;
    if (start < stable_n) continue;

    const auto pre_begin = heading.begin() + static_cast<std::ptrdiff_t>(start - stable_n);
    const auto pre_end = heading.begin() + static_cast<std::ptrdiff_t>(start) + 1;
    const auto [lo, hi] = std::minmax_element(pre_begin, pre_end);
    if (*hi - *lo > p.stable_tolerance_deg) continue;

    TurnEvent ev;
    ev.session_id = trace.session_id;
    ev.driver_id = trace.driver_id;
    ev.start_time = trace.time_at(start);
    ev.end_time = trace.time_at(end);
    ev.heading_change_deg = change;
    ev.center = midpoint_position(trace, start, end);
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<TurnSite> cluster_turn_sites(std::span<const TurnEvent> events, double radius_m) {
  const std::size_t n = events.size();
  std::vector<bool> assigned(n, false);
  std::vector<TurnSite> sites;

  std::size_t remaining = n;
  while (remaining > 0) {
    // Seed: unassigned event with the most unassigned neighbors; ties go to
    // the earliest start time, then input order.
    std::size_t best = n;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (!assigned[j] && distance_m(events[i].center, events[j].center) <= radius_m) ++count;
      }
      if (best == n || count > best_count ||
          (count == best_count && events[i].start_time < events[best].start_time)) {
        best = i;
        best_count = count;
      }
    }

    std::vector<std::size_t> member_idx;
    for (std::size_t j = 0; j < n; ++j) {
      if (!assigned[j] && distance_m(events[best].center, events[j].center) <= radius_m) {
        member_idx.push_back(j);
      }
    }

    // Shrink until every member lies within the radius of the centroid.
    TurnSite site;
    for (;;) {
      site.members.clear();
      for (std::size_t j : member_idx) site.members.push_back(events[j]);
      site.center = centroid(site.members);
      std::vector<std::size_t> kept;
      for (std::size_t j : member_idx) {
        if (distance_m(site.center, events[j].center) <= radius_m) kept.push_back(j);
      }
      if (kept.size() == member_idx.size()) break;
      if (kept.empty()) kept.push_back(best);
      member_idx = std::move(kept);
    }

    for (std::size_t j : member_idx) assigned[j] = true;
    remaining -= member_idx.size();
    site.count = site.members.size();
    sites.push_back(std::move(site));
  }

  std::stable_sort(sites.begin(), sites.end(),
                   [](const TurnSite& a, const TurnSite& b) { return a.count > b.count; });
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i].site_id = static_cast<int>(i + 1);
  return sites;
}

std::optional<RawSegment> extract_segment(const DenseTrace& trace, const LatLon& center, int site_id,
                                          double radius_m) {
  const std::size_t n = trace.size();
  if (n == 0) return std::nullopt;

  std::vector<double> dist(n);
  std::size_t closest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = distance_m(trace.positions[i], center);
    if (dist[i] < dist[closest]) closest = i;
  }
  if (dist[closest] > radius_m) return std::nullopt;

  std::size_t first = closest;
  while (first > 0 && dist[first - 1] <= radius_m) --first;
  std::size_t last = closest;
  while (last + 1 < n && dist[last + 1] <= radius_m) ++last;

  RawSegment seg;
  seg.session_id = trace.session_id;
  seg.driver_id = trace.driver_id;
  seg.site_id = site_id;
  seg.session_start = trace.start_time;
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(last) + 1;
  for (Sensor s : kAllSensors) {
    const auto& col = trace.column(s);
    seg.values[index(s)].assign(col.begin() + b, col.begin() + e);
  }
  auto& heading = seg.values[index(Sensor::Heading)];
  heading = unwrap_degrees(heading);

  seg.positions.assign(trace.positions.begin() + b, trace.positions.begin() + e);
  seg.times.reserve(seg.positions.size());
  seg.arc_length.reserve(seg.positions.size());
  for (std::size_t i = first; i <= last; ++i) {
    seg.times.push_back(trace.time_at(i));
    if (i == first) {
      seg.arc_length.push_back(0.0);
    } else {
      seg.arc_length.push_back(seg.arc_length.back() +
                               distance_m(trace.positions[i - 1], trace.positions[i]));
    }
  }
  return seg;
}

TurnSite offset_site(std::span<const DenseTrace> traces, const TurnSite& site, double offset_m,
                     double radius_m) {
  double lat = 0.0;
  double lon = 0.0;
  std::size_t used = 0;
  for (const DenseTrace& trace : traces) {
    if (trace.size() == 0) continue;
    std::size_t closest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const double d = distance_m(trace.positions[i], site.center);
      if (d < best) {
        best = d;
        closest = i;
      }
    }
    if (best > radius_m) continue;
    double travelled = 0.0;
    std::size_t i = closest;
    while (i + 1 < trace.size() && travelled < offset_m) {
      travelled += distance_m(trace.positions[i], trace.positions[i + 1]);
      ++i;
    }
    if (travelled < offset_m) continue;
    lat += trace.positions[i].lat;
    lon += trace.positions[i].lon;
    ++used;
  }
  if (used == 0) {
    throw PreconditionError("no trace reaches " + std::to_string(offset_m) + " m past site " +
                            std::to_string(site.site_id));
  }
  TurnSite out;
  out.site_id = site.site_id;
  out.center = {lat / static_cast<double>(used), lon / static_cast<double>(used)};
  out.count = used;
  out.type = site.type;
  return out;
}

std::string sites_to_json(std::span<const TurnSite> sites) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TurnSite& s : sites) {
    nlohmann::json o;
    o["site"] = s.site_id;
    o["lat"] = s.center.lat;
    o["lon"] = s.center.lon;
    o["count"] = s.count;
    if (!s.type.empty()) o["type"] = s.type;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<TurnSite> sites_from_json(const std::string& text) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("invalid site file: ") + e.what());
  }
  if (!arr.is_array()) throw ParseError(0, "site file must hold a JSON array");
  std::vector<TurnSite> sites;
  try {
    for (const auto& o : arr) {
      TurnSite s;
      s.site_id = o.at("site").get<int>();
      s.center = {o.at("lat").get<double>(), o.at("lon").get<double>()};
      s.count = o.at("count").get<std::size_t>();
      if (o.contains("type")) s.type = o.at("type").get<std::string>();
      sites.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("invalid site entry: ") + e.what());
  }
  return sites;
}

}  // namespace turnid

#include "turnid/pipeline.hpp"

#include <optional>

#include "turnid/parallel.hpp"

namespace turnid {

std::vector<DenseTrace> densify_all(std::span<const Session> sessions, double period) {
  std::vector<DenseTrace> out(sessions.size());
  parallel_for(sessions.size(), [&](std::size_t i) { out[i] = densify(sessions[i], period); });
  return out;
}

std::vector<TurnEvent> detect_all(std::span<const DenseTrace> traces, const TurnDetectParams& params) {
  std::vector<std::vector<TurnEvent>> per(traces.size());
  parallel_for(traces.size(), [&](std::size_t i) { per[i] = detect_turns(traces[i], params); });
  std::vector<TurnEvent> out;
  for (auto& v : per) {
    for (auto& e : v) out.push_back(std::move(e));
  }
  return out;
}

std::vector<RawSegment> site_segments(std::span<const DenseTrace> traces, const TurnSite& site, double radius_m) {
  std::vector<std::optional<RawSegment>> per(traces.size());
  parallel_for(traces.size(), [&](std::size_t i) { per[i] = extract_segment(traces[i], site, radius_m); });
  std::vector<RawSegment> out;
  for (auto& s : per) {
    if (s && s->size() >= 2) out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace turnid

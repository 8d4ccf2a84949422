#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turnid/geo.hpp"
#include "turnid/ingest.hpp"

namespace turnid {

/// Thresholds of the turn definition and of the heading-rate segmentation that
/// finds candidate ramps.
struct TurnDetectParams {
  double min_heading_change_deg = 70.0;
  double max_duration_s = 10.0;
  /// Length of the required stable-heading stretch before the turn.
  double stable_window_s = 5.0;
  /// Max total unwrapped heading variation allowed in the stable stretch.
  double stable_tolerance_deg = 10.0;
  /// Heading rate is a centered difference over this window.
  double rate_window_s = 1.0;
  double min_turn_rate_deg_s = 2.0;
  /// Same-sign rate runs separated by at most this gap are merged.
  double merge_gap_s = 0.3;
  /// Ramp boundaries are trimmed to where heading leaves this band around the run endpoints.
  double boundary_tolerance_deg = 2.0;
};

struct TurnEvent {
  std::string session_id;
  std::string driver_id;
  double start_time = 0.0;
  double end_time = 0.0;
  /// Signed net change of the unwrapped heading, degrees (positive = clockwise).
  double heading_change_deg = 0.0;
  /// GPS position at the time midpoint of the ramp.
  LatLon center;

  double duration() const noexcept { return end_time - start_time; }
};

/// A recurring turn location. Sites read back from a site file carry no members.
struct TurnSite {
  int site_id = 0;
  LatLon center;
  std::size_t count = 0;
  /// Optional human annotation ("rural", "urban", ...); used only to group report rows.
  std::string type;
  std::vector<TurnEvent> members;
};

/// The in-radius samples of one traversal of a site.
struct RawSegment {
  std::string session_id;
  std::string driver_id;
  int site_id = 0;
  /// Start time of the whole session; orders sessions chronologically.
  double session_start = 0.0;
  std::vector<double> times;
  /// Columns per Sensor. Heading is unwrapped (continuous) along the segment,
  /// starting in [0, 360).
  std::array<std::vector<double>, kSensorCount> values;
  std::vector<LatLon> positions;
  /// Cumulative path length from the first sample, meters.
  std::vector<double> arc_length;

  std::size_t size() const noexcept { return positions.size(); }
  const std::vector<double>& column(Sensor s) const { return values[index(s)]; }
};

std::vector<TurnEvent> detect_turns(const DenseTrace& trace, const TurnDetectParams& params = {});

/// Greedy clustering of turn centerpoints. Sites come back sorted by member
/// count descending and numbered from 1 in that order.
std::vector<TurnSite> cluster_turn_sites(std::span<const TurnEvent> events,
                                         double radius_m = kAnalysisRadiusM);

/// The contiguous in-radius run containing the closest approach to `center`,
/// or nullopt when the trace never enters the radius.
std::optional<RawSegment> extract_segment(const DenseTrace& trace, const LatLon& center, int site_id,
                                          double radius_m = kAnalysisRadiusM);

inline std::optional<RawSegment> extract_segment(const DenseTrace& trace, const TurnSite& site,
                                                 double radius_m = kAnalysisRadiusM) {
  return extract_segment(trace, site.center, site.site_id, radius_m);
}

/// A site centered `offset_m` of travelled path after the closest approach to
/// `site`, averaged over every trace that visits `site`. Used to evaluate the
/// straightaway following a turn. Throws PreconditionError if no trace reaches
/// the offset.
TurnSite offset_site(std::span<const DenseTrace> traces, const TurnSite& site, double offset_m,
                     double radius_m = kAnalysisRadiusM);

/// Site file: [{"site": int, "lat": float, "lon": float, "count": int}, ...].
std::string sites_to_json(std::span<const TurnSite> sites);
std::vector<TurnSite> sites_from_json(const std::string& text);

}  // namespace turnid

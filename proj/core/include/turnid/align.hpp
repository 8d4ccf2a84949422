#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "turnid/turndetect.hpp"

namespace turnid {

/// One traversal resampled at the baseline's K ground-truth locations.
/// Row i of every aligned segment of a site refers to the same place.
struct AlignedSegment {
  int site_id = 0;
  std::string driver_id;
  std::string session_id;
  double session_start = 0.0;
  /// Per-sensor columns of length K.
  std::array<std::vector<double>, kSensorCount> values;
  /// The baseline's sample locations (shared by every segment of the site).
  std::vector<LatLon> locations;

  std::size_t rows() const noexcept { return locations.size(); }
  const std::vector<double>& column(Sensor s) const { return values[index(s)]; }
  double at(std::size_t row, Sensor s) const { return values[index(s)][row]; }
};

/// (1/sqrt(K)) * sum_{i=1}^{K-1} (V_{i+1} - V_i)^2. Requires K >= 2.
double smoothness(std::span<const double> velocity);
double smoothness(const RawSegment& segment);

/// Index of the smoothest segment; ties go to the earliest session start.
std::size_t select_baseline(std::span<const RawSegment> segments);

/// Resamples `segment` at the baseline's locations. Each location is projected
/// onto the segment polyline; sensor values are interpolated linearly in arc
/// length between the two bracketing samples, clamped at the ends.
AlignedSegment align_segment(const RawSegment& segment, const RawSegment& baseline);

/// Selects the baseline and aligns every segment of one site against it.
std::vector<AlignedSegment> align_site(std::span<const RawSegment> segments);

/// CSV tensor: a "# site=..,K=..,columns=a;b;.." line, a column header, then K
/// rows per segment keyed by session and driver.
void write_aligned_csv(std::ostream& out, std::span<const AlignedSegment> segments);
std::vector<AlignedSegment> read_aligned_csv(std::istream& in);

}  // namespace turnid

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "turnid/align.hpp"
#include "turnid/ingest.hpp"

namespace turnid::testing {

/// Piecewise-linear heading: `hold_s` at `start_deg`, a linear ramp of
/// `change_deg` over `ramp_s`, then `tail_s` at the final heading.
std::vector<double> heading_ramp(double hold_s, double change_deg, double ramp_s, double tail_s,
                                 double start_deg = 0.0, double period = kSamplePeriodS);

/// Dense trace driving at constant speed along the given (continuous) headings.
/// Stored headings are wrapped to [0, 360); other sensors are zero.
DenseTrace trace_from_heading(std::span<const double> heading_deg, double speed_mps,
                              LatLon start = {48.0, 11.0}, double start_time = 0.0,
                              std::string session = "s", std::string driver = "d");

/// Aligned segment whose value at (row, sensor) is fn(row, sensor).
AlignedSegment make_aligned(int site, const std::string& driver, const std::string& session, double start,
                            std::size_t rows, const std::function<double(std::size_t, Sensor)>& fn);

}  // namespace turnid::testing

#pragma once

#include <span>
#include <vector>

#include "turnid/align.hpp"
#include "turnid/ingest.hpp"
#include "turnid/turndetect.hpp"

namespace turnid {

/// densify() over every session, in parallel; output order follows input order.
std::vector<DenseTrace> densify_all(std::span<const Session> sessions, double period = kSamplePeriodS);

/// detect_turns() over every trace, concatenated in trace order.
std::vector<TurnEvent> detect_all(std::span<const DenseTrace> traces, const TurnDetectParams& params = {});

/// One segment per trace that enters the site radius with at least 2 samples.
std::vector<RawSegment> site_segments(std::span<const DenseTrace> traces, const TurnSite& site,
                                      double radius_m = kAnalysisRadiusM);

}  // namespace turnid

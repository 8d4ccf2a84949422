#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "turnid/eval.hpp"
#include "turnid/geo.hpp"
#include "turnid/turndetect.hpp"

namespace turnid::cli {

/// Batch-run settings shared by all subcommands. Fields absent from a config
/// file keep these defaults; command-line flags override both.
struct RunConfig {
  std::vector<std::string> inputs;
  std::string out;
  std::string sites;
  std::vector<std::size_t> drivers{2};
  std::uint64_t seed = 1;
  std::size_t repetitions = 10;
  /// 0 uses every hardware thread.
  std::size_t threads = 0;
  std::size_t top = 12;
  double radius_m = kAnalysisRadiusM;
  /// Nonzero evaluates the straightaway this far past each site instead of the turn.
  double straightaway_offset_m = 0.0;
  DropOrder drop = DropOrder::Earliest;
  TurnDetectParams detect;
  ForestParams forest;
};

/// Throws ParseError on malformed JSON, unknown keys or wrong value types.
RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& config);

RunConfig load_run_config(const std::string& path);

}  // namespace turnid::cli

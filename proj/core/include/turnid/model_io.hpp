#pragma once

#include <string>

#include "turnid/forest.hpp"

namespace turnid {

inline constexpr int kModelFormatVersion = 1;

/// {"version":1, "params":{...}, "labels":[...], "pca":{...}, "trees":[...], "importances":[...]}.
/// Doubles are written in shortest round-trip form, so output is byte-stable.
std::string model_to_json(const ForestModel& model);

/// Throws ParseError on malformed input or an unsupported version.
ForestModel model_from_json(const std::string& text);

}  // namespace turnid

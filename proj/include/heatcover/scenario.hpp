#pragma once

#include <string>

#include "heatcover/mission.hpp"

namespace heatcover {

/// Parse a scenario file (strict JSON: unknown keys are errors) into a
/// validated mission config. Every omitted key takes its documented default.
MissionConfig parse_scenario(const std::string& path);
MissionConfig parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

/// Canonical serialization: parse(serialize(c)) == c, and serializing twice
/// yields identical bytes.
std::string serialize_scenario(const MissionConfig& cfg);

void validate_config(const MissionConfig& cfg);

}  // namespace heatcover

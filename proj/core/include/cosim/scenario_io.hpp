#pragma once

#include <filesystem>
#include <string>

#include "cosim/scenario.hpp"

namespace cosim {

/// Parse a scenario from its JSON text. Errors name the offending key.
Scenario scenario_from_json(const std::string& text);

/// Load and parse a scenario file.
Scenario load_scenario(const std::filesystem::path& path);

/// Serialize a scenario to JSON. Linear models are written inline;
/// second-order models are written by their built-in name. Reloading the
/// result reproduces the run bit-exactly.
std::string scenario_to_json(const Scenario& s);

} // namespace cosim

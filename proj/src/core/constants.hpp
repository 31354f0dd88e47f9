#pragma once

#include "layout.hpp"

#include <json.hpp>

#include <string_view>
#include <vector>

namespace socketlab {

/// Reference material values shipped with the library (data/socket_constants.json).
std::string_view bundled_constants_text();
const nlohmann::json& bundled_constants();

std::vector<SpringSpec> bundled_springs();
OperatingRange bundled_operating_range();

}  // namespace socketlab

#pragma once

#include <string>
#include <vector>

namespace kvg {

/// Scenario files under scenarios/, compiled in.
const std::vector<std::string>& embedded_scenarios();

}  // namespace kvg

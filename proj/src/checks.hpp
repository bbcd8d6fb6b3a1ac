#pragma once

#include <string>

#include "rlab/harness.hpp"

namespace rlab::checks {

/// Measures one registered check at one resolution (0 for checks that do not
/// depend on the grid). Parameters arrive merged with the defaults.
Measurement measure(const std::string& id, const nlohmann::json& params, int resolution);

}  // namespace rlab::checks

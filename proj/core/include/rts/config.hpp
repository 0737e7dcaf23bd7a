#pragma once

#include <string>

#include "rts/rts.hpp"

namespace rts {

/// Flat key-value experiment config with `#` comments. Every key has a
/// default; unknown keys are rejected. See docs in README for the key list.
RTSConfig parse_experiment_config(const std::string& path);
RTSConfig parse_experiment_config_text(const std::string& text);

}  // namespace rts

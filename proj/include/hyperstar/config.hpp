#pragma once

#include <string>

#include "hyperstar/nets.hpp"

namespace hyperstar {

// key=value text, one pair per line; '#' starts a comment; blank lines
// ignored. Unknown keys are rejected. Keys not present keep their defaults.
TrainConfig parse_config(const std::string& text);
TrainConfig load_config_file(const std::string& path);

// Canonical form: every key, fixed order, values printed to round-trip.
std::string serialize_config(const TrainConfig& cfg);

}  // namespace hyperstar

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "todi/harness.hpp"

namespace todi::config {

// Every key accepted in a run config, in canonical order. The names match the
// TrainConfig fields; the divergence spec is flattened into kind, lambda,
// mix_ratio and beta.
const std::vector<std::string>& config_keys();

// Flat "key = value" text. '#' starts a comment; blank lines are ignored.
// Unknown or repeated keys, malformed values and parameters that do not apply
// to the chosen kind are ConfigErrors. beta accepts "inf" for the step weight.
harness::TrainConfig parse_config(std::string_view text);

// Canonical, fully resolved form: one "key=value" line per applicable key in
// config_keys() order. parse_config(to_config_text(c)) == c.
std::string to_config_text(const harness::TrainConfig& config);

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

// Digest of the canonical text.
std::string config_digest(const harness::TrainConfig& config);

}  // namespace todi::config

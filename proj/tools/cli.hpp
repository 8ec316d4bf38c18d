#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrwp/core.hpp"
#include "mrwp/mobility.hpp"

namespace mrwp::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kViolation = 1, kConfigError = 2 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every recognised key with its default; null means "derived from the other fields".
json default_config();

/// Applies `key=value` overrides; dotted keys reach into nested objects and values parse as JSON when they can.
void apply_overrides(json& config, const std::vector<std::string>& overrides);

/**
 * Merges a user config over the defaults, applies overrides, rejects unknown
 * keys and fills the derived fields (L = sqrt n, R from the radius threshold,
 * v = R / c2) so the result is fully explicit.
 */
json resolve_config(const std::optional<json>& user, const std::vector<std::string>& overrides);

WorldParams params_from(const json& resolved);
InitMode init_from(const json& resolved);

/// Entry point; returns the process exit code.
int run(int argc, char** argv);

} // namespace mrwp::cli

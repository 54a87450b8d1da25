#pragma once

#include "chemo/engine.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chemo {

/// Malformed config text: unknown key, bad value or bad line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Applies `key = value` lines (with `#` comments) on top of `base`. Keys
/// are the SimConfig member names; optional members also accept `auto`.
SimConfig parse_config(const std::string& text, SimConfig base);

/// Reads and parses a config file; throws std::ios_base::failure when the
/// file cannot be read.
SimConfig load_config(const std::filesystem::path& path, SimConfig base);

/// Every member as (key, value) text in declaration order, parseable by
/// parse_config.
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& config);

std::string format_double(double v);

}  // namespace chemo

#pragma once

// Flat `key = value` configuration with dotted keys, optional [section]
// headers and JSON values. Unknown or repeated keys are errors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "minimal_bottle/blowup.hpp"
#include "minimal_bottle/skew.hpp"
#include "minimal_bottle/verify.hpp"

namespace minimal_bottle {

class ConfigError : public std::runtime_error {
 public:
  /// line is 1-based; 0 means the error is not tied to a line.
  ConfigError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

struct SystemConfig {
  CocycleSpec cocycle = CocycleSpec::liouville_default();
  ProfileSpec profile;
  int truncation = 60;
  std::int64_t horizon = 10000;
  double star_margin = 1e-9;
  BatteryOptions battery;
  std::filesystem::path output_dir = ".";

  /// Every module invariant, the engine's preconditions and the star-point scan.
  std::vector<std::string> violations() const;
};

/// Names of all accepted keys, in documentation order.
const std::vector<std::string>& config_keys();

SystemConfig parse_config(std::string_view text, const std::string& source = "<config>");
/// Throws ConfigError for unreadable files as well as malformed content.
SystemConfig load_config(const std::filesystem::path& path);

/// Canonical text of a configuration. Circle points on a ratio with
/// denominator <= 1000 round-trip exactly, others to double precision.
std::string render_config(const SystemConfig& config);

}  // namespace minimal_bottle

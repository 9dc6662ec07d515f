#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "iekf/filter.hpp"
#include "iekf/simulation.hpp"

namespace iekf::app {

inline constexpr int kSchemaVersion = 1;

enum class Mode { kSingle, kMonteCarlo, kCompare };

std::string to_string(Mode mode);
/// Accepts "single", "monte-carlo", "compare".
std::optional<Mode> parse_mode(std::string_view text);
/// Accepts "standard", "qr", "information".
std::optional<UpdateVariant> parse_variant(std::string_view text);

/// Process exit codes of the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitMissingFile = 3,
  kExitMalformedConfig = 4,
  kExitInvalidConfig = 5,
  kExitIoError = 6,
  kExitFilterFailure = 7,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

struct RunManifest {
  int schema_version = kSchemaVersion;
  sim::ScenarioConfig scenario;
  IekfConfig filter;
  std::string output_path = "iekf_results.csv";
  Mode mode = Mode::kSingle;
  int trials = 100;

  /// Re-runs every range check; throws ConfigError(kExitInvalidConfig).
  void validate() const;
};

/// Reads a YAML run description. Unknown keys are rejected with a
/// suggestion; each failure class maps to its own exit code.
RunManifest parse_config(const std::filesystem::path& path);
RunManifest parse_config_text(const std::string& text);

/// Closest known key (or the canonical key behind a known alias), if any is
/// close enough to be a plausible typo.
std::optional<std::string> suggest_key(std::string_view unknown,
                                       std::span<const std::string_view> known);

}  // namespace iekf::app

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairsim/sim.hpp"

namespace fairsim {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// The documented key set. Files are flat `key = value` lines with #
// comments; strings may be quoted. Unknown keys are rejected.
std::vector<std::string> config_keys();

// Parses a config file over built-in defaults.
SimConfig load_config(const std::filesystem::path& path);

// Applies one `key=value` override (the CLI --set form).
void apply_override(SimConfig& config, const std::string& assignment);

// Applies FAIRSIM_<KEY> environment overrides for every documented key.
void apply_env_overrides(SimConfig& config);

// Semantic validation beyond per-key parsing (ranges, cross-field rules).
// Throws ConfigError naming the offending key.
void validate(const SimConfig& config);

// Canonical resolved form: every key, sorted, normalized values. The hash
// is invariant under key reordering and whitespace in the source file and
// changes when any effective value changes.
std::string canonical_config(const SimConfig& config);
std::string config_hash(const SimConfig& config);

// Resolved config as JSON (written to the run directory).
std::string config_json(const SimConfig& config);
SimConfig config_from_json(const std::string& text);

struct RunManifest {
  std::string run_id;
  std::string config_hash;
  std::string dataset_fingerprint;
  int rounds_completed = 0;
  double wall_time = 0.0;  // seconds

  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

}  // namespace fairsim

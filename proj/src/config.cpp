#include "fairsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fairsim {

ConfigError::ConfigError(const std::string& key, const std::string& what)
    : std::runtime_error("config key '" + key + "': " + what), key_(key) {}

namespace {

std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

long long parse_int(const std::string& key, const std::string& text) {
  try {
    std::size_t consumed = 0;
    const long long value = std::stoll(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing junk");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a real number, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

// One entry per documented key: how to set it from text and how to print
// its current value in canonical form.
struct KeySpec {
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = {
      {"dataset",
       {[](SimConfig& c, const std::string& v) { c.dataset = v; },
        [](const SimConfig& c) { return c.dataset; }}},
      {"format",
       {[](SimConfig& c, const std::string& v) {
          try {
            c.format = dataset_format_from_string(v);
          } catch (const std::exception& e) {
            throw ConfigError("format", e.what());
          }
        },
        [](const SimConfig& c) { return to_string(c.format); }}},
      {"separator",
       {[](SimConfig& c, const std::string& v) { c.separator = v; },
        [](const SimConfig& c) { return c.separator; }}},
      {"T",
       {[](SimConfig& c, const std::string& v) {
          c.rounds = static_cast<int>(parse_int("T", v));
        },
        [](const SimConfig& c) { return std::to_string(c.rounds); }}},
      {"K",
       {[](SimConfig& c, const std::string& v) {
          c.final_list_length = static_cast<int>(parse_int("K", v));
        },
        [](const SimConfig& c) { return std::to_string(c.final_list_length); }}},
      {"L",
       {[](SimConfig& c, const std::string& v) {
          c.long_list_length = static_cast<int>(parse_int("L", v));
        },
        [](const SimConfig& c) { return std::to_string(c.long_list_length); }}},
      {"alpha",
       {[](SimConfig& c, const std::string& v) { c.alpha = parse_real("alpha", v); },
        [](const SimConfig& c) { return format_real(c.alpha); }}},
      {"split_ratio",
       {[](SimConfig& c, const std::string& v) {
          c.split_ratio = parse_real("split_ratio", v);
        },
        [](const SimConfig& c) { return format_real(c.split_ratio); }}},
      {"seed",
       {[](SimConfig& c, const std::string& v) {
          c.seed = static_cast<std::uint64_t>(parse_int("seed", v));
        },
        [](const SimConfig& c) { return std::to_string(c.seed); }}},
      {"pipeline",
       {[](SimConfig& c, const std::string& v) {
          try {
            c.pipeline = pipeline_from_string(v);
          } catch (const std::exception& e) {
            throw ConfigError("pipeline", e.what());
          }
        },
        [](const SimConfig& c) { return to_string(c.pipeline); }}},
      {"target_mode",
       {[](SimConfig& c, const std::string& v) {
          try {
            c.target_mode = target_mode_from_string(v);
          } catch (const std::exception& e) {
            throw ConfigError("target_mode", e.what());
          }
        },
        [](const SimConfig& c) { return to_string(c.target_mode); }}},
      {"epsilon_exposure",
       {[](SimConfig& c, const std::string& v) {
          c.epsilon_exposure = parse_real("epsilon_exposure", v);
        },
        [](const SimConfig& c) { return format_real(c.epsilon_exposure); }}},
      {"discrepancy_weight",
       {[](SimConfig& c, const std::string& v) {
          c.discrepancy_weight = parse_int("discrepancy_weight", v);
        },
        [](const SimConfig& c) { return std::to_string(c.discrepancy_weight); }}},
      {"mf_factors",
       {[](SimConfig& c, const std::string& v) {
          c.mf.factors = static_cast<int>(parse_int("mf_factors", v));
        },
        [](const SimConfig& c) { return std::to_string(c.mf.factors); }}},
      {"mf_learning_rate",
       {[](SimConfig& c, const std::string& v) {
          c.mf.learning_rate = parse_real("mf_learning_rate", v);
        },
        [](const SimConfig& c) { return format_real(c.mf.learning_rate); }}},
      {"mf_regularization",
       {[](SimConfig& c, const std::string& v) {
          c.mf.regularization = parse_real("mf_regularization", v);
        },
        [](const SimConfig& c) { return format_real(c.mf.regularization); }}},
      {"mf_epochs",
       {[](SimConfig& c, const std::string& v) {
          c.mf.epochs = static_cast<int>(parse_int("mf_epochs", v));
        },
        [](const SimConfig& c) { return std::to_string(c.mf.epochs); }}},
      {"mf_negatives",
       {[](SimConfig& c, const std::string& v) {
          c.mf.negatives_per_positive = static_cast<int>(parse_int("mf_negatives", v));
        },
        [](const SimConfig& c) { return std::to_string(c.mf.negatives_per_positive); }}},
      {"warm_start",
       {[](SimConfig& c, const std::string& v) { c.warm_start = parse_bool("warm_start", v); },
        [](const SimConfig& c) { return c.warm_start ? "true" : "false"; }}},
      {"freeze_test_set",
       {[](SimConfig& c, const std::string& v) {
          c.freeze_test_set = parse_bool("freeze_test_set", v);
        },
        [](const SimConfig& c) { return c.freeze_test_set ? "true" : "false"; }}},
      {"gini_population",
       {[](SimConfig& c, const std::string& v) {
          try {
            c.gini_population = gini_population_from_string(v);
          } catch (const std::exception& e) {
            throw ConfigError("gini_population", e.what());
          }
        },
        [](const SimConfig& c) { return to_string(c.gini_population); }}},
      {"dump_rerank",
       {[](SimConfig& c, const std::string& v) { c.dump_rerank = parse_bool("dump_rerank", v); },
        [](const SimConfig& c) { return c.dump_rerank ? "true" : "false"; }}},
      {"dump_lists",
       {[](SimConfig& c, const std::string& v) { c.dump_lists = parse_bool("dump_lists", v); },
        [](const SimConfig& c) { return c.dump_lists ? "true" : "false"; }}},
      {"output_dir",
       {[](SimConfig& c, const std::string& v) { c.output_dir = v; },
        [](const SimConfig& c) { return c.output_dir; }}},
  };
  return table;
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& text) {
  if (text.size() >= 2 && ((text.front() == '"' && text.back() == '"') ||
                           (text.front() == '\'' && text.back() == '\''))) {
    return text.substr(1, text.size() - 2);
  }
  return text;
}

void set_key(SimConfig& config, const std::string& key, const std::string& value) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second.set(config, unquote(value));
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, _] : key_table()) keys.push_back(key);
  return keys;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open config file: " + path.string());
  SimConfig config;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) {
      // Keep # inside quoted values.
      const auto quote = line.find('"');
      if (quote == std::string::npos || comment < quote) line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("(line " + std::to_string(line_number) + ")",
                        "expected key = value");
    set_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void apply_override(SimConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(assignment, "override must be key=value");
  set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_env_overrides(SimConfig& config) {
  for (const std::string& key : config_keys()) {
    std::string env_name = "FAIRSIM_";
    for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* value = std::getenv(env_name.c_str())) {
      set_key(config, key, value);
    }
  }
}

void validate(const SimConfig& config) {
  if (config.dataset.empty()) throw ConfigError("dataset", "path is required");
  if (config.rounds < 1) throw ConfigError("T", "must be >= 1");
  if (config.final_list_length < 1) throw ConfigError("K", "must be >= 1");
  if (config.long_list_length < config.final_list_length)
    throw ConfigError("L", "must be >= K");
  if (!(config.alpha < 0)) throw ConfigError("alpha", "must be negative");
  if (!(config.split_ratio > 0 && config.split_ratio < 1))
    throw ConfigError("split_ratio", "must be in (0, 1)");
  if (config.mf.factors < 1) throw ConfigError("mf_factors", "must be >= 1");
  if (!(config.mf.learning_rate > 0)) throw ConfigError("mf_learning_rate", "must be > 0");
  if (config.mf.regularization < 0)
    throw ConfigError("mf_regularization", "must be >= 0");
  if (config.mf.epochs < 1) throw ConfigError("mf_epochs", "must be >= 1");
  if (config.mf.negatives_per_positive < 1) throw ConfigError("mf_negatives", "must be >= 1");
  if (config.epsilon_exposure < 0) throw ConfigError("epsilon_exposure", "must be >= 0");
  if (config.discrepancy_weight < 0)
    throw ConfigError("discrepancy_weight", "must be >= 0 (0 selects the default)");
  if (config.separator.empty()) throw ConfigError("separator", "must be nonempty");
  if (config.output_dir.empty()) throw ConfigError("output_dir", "path is required");
}

std::string canonical_config(const SimConfig& config) {
  std::ostringstream out;
  for (const auto& [key, spec] : key_table()) {  // std::map: sorted keys
    out << key << '=' << spec.get(config) << '\n';
  }
  return out.str();
}

std::string config_hash(const SimConfig& config) {
  const std::string canonical = canonical_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : canonical) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xf);
  return out.str();
}

std::string config_json(const SimConfig& config) {
  nlohmann::json j;
  for (const auto& [key, spec] : key_table()) j[key] = spec.get(config);
  return j.dump(2);
}

SimConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SimConfig config;
  for (auto it = j.begin(); it != j.end(); ++it) {
    set_key(config, it.key(), it.value().get<std::string>());
  }
  return config;
}

void RunManifest::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["run_id"] = run_id;
  j["config_hash"] = config_hash;
  j["dataset_fingerprint"] = dataset_fingerprint;
  j["rounds_completed"] = rounds_completed;
  j["wall_time"] = wall_time;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path.string());
  nlohmann::json j;
  in >> j;
  RunManifest manifest;
  manifest.run_id = j.at("run_id").get<std::string>();
  manifest.config_hash = j.at("config_hash").get<std::string>();
  manifest.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
  manifest.rounds_completed = j.at("rounds_completed").get<int>();
  manifest.wall_time = j.at("wall_time").get<double>();
  return manifest;
}

}  // namespace fairsim

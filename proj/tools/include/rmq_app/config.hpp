#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace rmq::app {

/// One documented configuration key. `section` is a scenario name or "run".
struct KeySpec {
  std::string section;
  std::string key;
  std::string default_value;
  std::string help;
};

const std::vector<KeySpec>& schema();

/// Validation failure; `key()` is the offending "section.key".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Resolved key-value configuration: documented defaults overlaid by the
/// RMQ_SEED environment variable, a config file and command-line flags (in
/// increasing precedence).
class Config {
 public:
  Config();

  /// Strict INI merge: unknown sections and keys are rejected.
  void merge_file(const std::filesystem::path& path);
  /// Sets "section.key"; throws ConfigError for unknown keys.
  void set(const std::string& dotted_key, const std::string& value);

  [[nodiscard]] const std::string& text(const std::string& section, const std::string& key) const;
  [[nodiscard]] double real(const std::string& section, const std::string& key) const;
  [[nodiscard]] double positive(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::size_t count(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::uint64_t u64(const std::string& section, const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::vector<double> reals(const std::string& section, const std::string& key) const;
  /// One of `choices`; throws naming the key otherwise.
  [[nodiscard]] const std::string& choice(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& choices) const;

  /// The sections used by one scenario plus "run".
  [[nodiscard]] nlohmann::json to_json(const std::string& section) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

/// All defaults as an annotated INI document.
std::string defaults_ini();

}  // namespace rmq::app

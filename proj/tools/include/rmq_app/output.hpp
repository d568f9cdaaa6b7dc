#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rmq::app {

std::string sha256_hex(std::string_view data);
/// Current UTC time, ISO 8601 with second resolution.
std::string utc_timestamp();

/// Result files are staged in memory and written together, so a run that
/// fails validation leaves nothing behind.
class OutputDir {
 public:
  struct Entry {
    std::string name;
    std::string content;
  };

  void add(std::string name, std::string content);
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }

  /// Writes every staged file plus manifest.json (with `manifest` extended by
  /// the file list) into `dir`.
  void commit(const std::filesystem::path& dir, nlohmann::json manifest) const;

 private:
  std::vector<Entry> entries_;
};

std::string dump_json(const nlohmann::json& j);

}  // namespace rmq::app

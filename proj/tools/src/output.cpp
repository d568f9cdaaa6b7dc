#include "rmq_app/output.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace rmq::app {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(md[i]);
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void OutputDir::add(std::string name, std::string content) {
  for (auto& e : entries_) {
    if (e.name == name) {
      e.content = std::move(content);
      return;
    }
  }
  entries_.push_back({std::move(name), std::move(content)});
}

void OutputDir::commit(const std::filesystem::path& dir, nlohmann::json manifest) const {
  std::filesystem::create_directories(dir);
  auto& files = manifest["files"] = nlohmann::json::array();
  for (const auto& e : entries_) {
    std::ofstream f(dir / e.name, std::ios::binary);
    f << e.content;
    if (!f) throw std::runtime_error("cannot write " + (dir / e.name).string());
    files.push_back({{"path", e.name}, {"sha256", sha256_hex(e.content)}, {"bytes", e.content.size()}});
  }
  std::ofstream f(dir / "manifest.json", std::ios::binary);
  f << dump_json(manifest);
  if (!f) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
}

}  // namespace rmq::app

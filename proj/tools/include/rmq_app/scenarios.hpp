#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmq_app/config.hpp"
#include "rmq_app/output.hpp"

namespace rmq::app {

enum class Format { json, csv, both };

struct Context {
  const Config& cfg;
  std::uint64_t seed;
  std::size_t workers;
  Format format;
  OutputDir& out;
  std::ostringstream& log;
  std::ostream& console;

  [[nodiscard]] bool json() const noexcept { return format != Format::csv; }
  [[nodiscard]] bool csv() const noexcept { return format != Format::json; }
};

/// Exit status 0 on success, 3 when the scenario's statistical claim was
/// invalidated (artifacts are still written).
struct Outcome {
  int status = 0;
  std::string message;
};

const std::vector<std::string>& scenario_names();
/// Runs `name` (also the config section it reads). Throws ConfigError and
/// rmq::Error for invalid input.
Outcome run_scenario(const std::string& name, Context& ctx);

}  // namespace rmq::app

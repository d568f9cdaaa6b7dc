#include "rmq_app/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rmq/error.hpp"
#include "rmq_app/config.hpp"
#include "rmq_app/output.hpp"
#include "rmq_app/scenarios.hpp"

namespace rmq::app {
namespace {

struct Flags {
  std::string config;
  std::optional<std::string> seed;
  std::optional<std::string> workers;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::vector<std::string> sets;
};

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "INI file with [run] and scenario sections");
  sub->add_option("--seed", f.seed, "master seed (overrides [run] seed and RMQ_SEED)");
  sub->add_option("--workers", f.workers, "worker threads");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--format", f.format, "json | csv | both");
  sub->add_option("--set", f.sets, "override one key, e.g. --set born.n_runs=100");
}

int execute(const std::string& command, const std::string& scenario, const Flags& f, std::ostream& out,
            std::ostream& err) {
  const std::string started = utc_timestamp();
  Config cfg;
  if (const char* env = std::getenv("RMQ_SEED")) cfg.set("run.seed", env);
  if (!f.config.empty()) cfg.merge_file(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, "--set expects section.key=value");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) cfg.set("run.seed", *f.seed);
  if (f.workers) cfg.set("run.workers", *f.workers);
  if (f.out) cfg.set("run.out", *f.out);
  if (f.format) cfg.set("run.format", *f.format);

  const std::uint64_t seed = cfg.u64("run", "seed");
  const std::size_t workers = cfg.count("run", "workers");
  const auto& fmt = cfg.choice("run", "format", {"json", "csv", "both"});
  const Format format = fmt == "json" ? Format::json : fmt == "csv" ? Format::csv : Format::both;
  const std::filesystem::path dir = cfg.text("run", "out");
  if (dir.empty()) throw ConfigError("run.out", "must not be empty");

  OutputDir files;
  std::ostringstream log;
  log << command << '\n';
  Context ctx{cfg, seed, workers, format, files, log, out};
  const Outcome outcome = run_scenario(scenario, ctx);
  log << "status " << outcome.status << ": " << outcome.message << '\n';
  files.add("run.log", log.str());

  nlohmann::json manifest{{"tool", "rmq"},
                          {"command", command},
                          {"scenario", scenario},
                          {"config", cfg.to_json(scenario)},
                          {"master_seed", seed},
                          {"exit_status", outcome.status},
                          {"message", outcome.message},
                          {"started_at", started},
                          {"finished_at", utc_timestamp()}};
  files.commit(dir, manifest);
  (outcome.status == 0 ? out : err) << scenario << ": " << outcome.message << '\n';
  return outcome.status;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-matrix Schrodinger simulator", "rmq"};
  app.require_subcommand(1);
  Flags flags;
  std::string command, scenario;

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& section) {
    auto* sub = parent->add_subcommand(name, help);
    add_run_flags(sub, flags);
    sub->callback([&, sub, section] {
      command = (sub->get_parent() == &app ? "" : sub->get_parent()->get_name() + " ") + sub->get_name();
      scenario = section;
    });
  };
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo scenarios");
  simulate->require_subcommand(1);
  leaf(simulate, "born", "Born-rule statistics of collapse runs", "born");
  leaf(simulate, "survival", "Sparre Andersen survival of symmetric walks", "survival");
  leaf(simulate, "trajectory", "Mean motion under alternating free flow and kicks", "trajectory");
  leaf(simulate, "renewal", "Stroboscopic renewal cycles", "renewal");
  auto* check = app.add_subcommand("check", "Deterministic numerical checks");
  check->require_subcommand(1);
  leaf(check, "geometry", "Fubini-Study isometry and phase-space overlaps", "geometry");
  leaf(check, "velocity", "Fubini-Study speed decomposition", "velocity");
  leaf(check, "gue", "GUE spectrum against the semicircle", "gue");
  leaf(&app, "estimate", "Order-of-magnitude estimates for a macroscopic body", "estimate");
  app.add_subcommand("print-defaults", "Print every configuration key with its default")->callback([&] {
    command = "print-defaults";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  if (command == "print-defaults") {
    out << defaults_ini();
    return kExitOk;
  }
  try {
    return execute(command, scenario, flags, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << scenario << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::TimeoutFractionExceeded ? kExitStatistical : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace rmq::app

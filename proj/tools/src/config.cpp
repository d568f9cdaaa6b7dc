#include "rmq_app/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace rmq::app {

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"run", "seed", "0", "master seed (RMQ_SEED overrides the default; file and --seed override both)"},
      {"run", "workers", "1", "worker threads; results do not depend on it"},
      {"run", "out", "rmq_out", "output directory"},
      {"run", "format", "both", "json | csv | both"},

      {"born", "weights", "0.64,0.36", "Born weights |c_i|^2 (comma list, sums to 1)"},
      {"born", "centers", "-4,4", "packet and detector centres"},
      {"born", "sigma", "0.5", "packet width and detector resolution"},
      {"born", "grid_points", "512", "grid points"},
      {"born", "half_width", "16", "grid covers [-half_width, half_width)"},
      {"born", "window_count", "64", "kick dimension N (Gaussian window functions)"},
      {"born", "window_width", "0.19", "window function width"},
      {"born", "window_spacing", "0.375", "window function spacing"},
      {"born", "epsilon", "0.05", "target mean Fubini-Study step per kick"},
      {"born", "scale", "auto", "GUE scale, or auto to calibrate to epsilon"},
      {"born", "calibration_trials", "1000", "matrices used by the calibration"},
      {"born", "propagator", "taylor", "taylor | eigendecomposition"},
      {"born", "n_steps_max", "2000", "kicks per run before timeout"},
      {"born", "n_runs", "10000", "independent runs"},
      {"born", "batch_size", "64", "runs per batch between timeout-budget checks"},
      {"born", "mu_tol", "auto", "detector centre tolerance, or auto for sigma/2"},
      {"born", "trace", "false", "also write the foliation trace of run 0 (step,tau,s)"},

      {"survival", "law", "plus_minus_one", "gaussian | plus_minus_one"},
      {"survival", "n_walks", "100000", "walks"},
      {"survival", "n_max", "64", "largest n"},
      {"survival", "chunk", "10000", "walks per independent stream"},

      {"trajectory", "grid_points", "1024", "grid points"},
      {"trajectory", "half_width", "32", "grid half width"},
      {"trajectory", "center", "-2", "initial packet centre a"},
      {"trajectory", "width", "1", "initial packet width sigma"},
      {"trajectory", "momentum", "1", "initial momentum p"},
      {"trajectory", "potential", "free", "free | linear | harmonic"},
      {"trajectory", "potential_strength", "0", "slope (linear) or stiffness (harmonic)"},
      {"trajectory", "potential_center", "0", "harmonic centre"},
      {"trajectory", "epsilon", "0.01", "target mean Fubini-Study step per kick"},
      {"trajectory", "scale", "auto", "GUE scale, or auto"},
      {"trajectory", "calibration_trials", "300", "matrices used by the calibration"},
      {"trajectory", "window_count", "16", "kick dimension"},
      {"trajectory", "window_width", "1", "window function width"},
      {"trajectory", "window_spacing", "2", "window function spacing"},
      {"trajectory", "co_moving", "true", "re-centre the window on the packet before each kick"},
      {"trajectory", "dt_free", "0.02", "free step length"},
      {"trajectory", "n_free_substeps", "1", "split-steps per free step"},
      {"trajectory", "free_steps_per_kick", "5", "free steps per kick window"},
      {"trajectory", "t_final", "4", "total time"},
      {"trajectory", "n_seeds", "200", "independent trajectories"},

      {"renewal", "d_a", "1e-12", "position diffusion D_a (m^2/s)"},
      {"renewal", "step", "1e-12", "kick interval (s)"},
      {"renewal", "truncation_quantile", "0.999968", "Sparre Andersen truncation quantile"},
      {"renewal", "n_cycles", "10000", "renewal cycles"},

      {"geometry", "grid_points", "1024", "grid points"},
      {"geometry", "half_width", "20", "grid half width"},
      {"geometry", "sigma", "1", "packet width"},
      {"geometry", "n_separations", "100", "separations in (0, max_separation]"},
      {"geometry", "max_separation", "6", "largest separation in units of sigma"},
      {"geometry", "lattice", "10", "phase-space lattice points per axis"},

      {"velocity", "grid_points", "512", "grid points"},
      {"velocity", "half_width", "16", "grid half width"},
      {"velocity", "sigma", "1", "packet width"},
      {"velocity", "momenta", "0,1,2", "packet momenta"},
      {"velocity", "slopes", "0,0.5", "linear potential slopes g (V = g z)"},

      {"gue", "dimension", "200", "matrix dimension"},
      {"gue", "scale", "1", "GUE scale"},

      {"estimate", "gas_number_density", "2.4e25", "n (m^-3)"},
      {"estimate", "thermal_velocity", "500", "v_th (m/s)"},
      {"estimate", "interaction_range", "1e-9", "air interaction range (m)"},
      {"estimate", "photon_interaction_range", "1e-6", "radiation interaction range (m)"},
      {"estimate", "body_radius", "1e-3", "R (m)"},
      {"estimate", "body_mass", "1e-6", "M (kg)"},
      {"estimate", "body_speed", "1", "v (m/s)"},
      {"estimate", "resolution", "1e-6", "sigma (m)"},
      {"estimate", "gas_particle_mass", "4.8e-26", "m_air (kg)"},
      {"estimate", "hbar", "1e-34", "hbar (J s)"},
      {"estimate", "step", "1e-12", "coarse-grained interval dt (s)"},
      {"estimate", "air_window_bound", "1e-12", "air interaction window bound (s)"},
      {"estimate", "radiation_window_bound", "1e-15", "radiation interaction window bound (s)"},
      {"estimate", "return_confidence", "0.999968", "Sparre Andersen return quantile q"},
  };
  return keys;
}

namespace {

std::string dotted(const std::string& section, const std::string& key) { return section + "." + key; }

double parse_double(const std::string& name, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ConfigError(name, "expected a number, got '" + raw + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& name, const std::string& raw) {
  const std::string s = boost::algorithm::trim_copy(raw);
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ConfigError(name, "expected a non-negative integer, got '" + raw + "'");
  }
  return v;
}

}  // namespace

Config::Config() {
  for (const auto& k : schema()) values_[k.section][k.key] = k.default_value;
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw ConfigError(dotted_key, "expected section.key");
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  const auto s = values_.find(section);
  if (s == values_.end()) throw ConfigError(section, "unknown section");
  const auto k = s->second.find(key);
  if (k == s->second.end()) throw ConfigError(dotted_key, "unknown key");
  k->second = boost::algorithm::trim_copy(value);
}

void Config::merge_file(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("--config", e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError(section, "keys must live in a [section]");
    if (!values_.contains(section)) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) set(dotted(section, key), value.data());
  }
}

const std::string& Config::text(const std::string& section, const std::string& key) const {
  return values_.at(section).at(key);
}

double Config::real(const std::string& section, const std::string& key) const {
  const double v = parse_double(dotted(section, key), text(section, key));
  if (!std::isfinite(v)) throw ConfigError(dotted(section, key), "must be finite");
  return v;
}

double Config::positive(const std::string& section, const std::string& key) const {
  const double v = real(section, key);
  if (!(v > 0.0)) throw ConfigError(dotted(section, key), "must be positive");
  return v;
}

std::size_t Config::count(const std::string& section, const std::string& key) const {
  const auto v = parse_u64(dotted(section, key), text(section, key));
  if (v == 0) throw ConfigError(dotted(section, key), "must be positive");
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::u64(const std::string& section, const std::string& key) const {
  return parse_u64(dotted(section, key), text(section, key));
}

bool Config::flag(const std::string& section, const std::string& key) const {
  const std::string v = boost::algorithm::to_lower_copy(text(section, key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(dotted(section, key), "expected true or false, got '" + text(section, key) + "'");
}

std::vector<double> Config::reals(const std::string& section, const std::string& key) const {
  std::vector<std::string> parts;
  const std::string raw = text(section, key);
  boost::algorithm::split(parts, raw, boost::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_double(dotted(section, key), p));
  return out;
}

const std::string& Config::choice(const std::string& section, const std::string& key,
                                  const std::vector<std::string>& choices) const {
  const std::string& v = text(section, key);
  for (const auto& c : choices) {
    if (v == c) return v;
  }
  throw ConfigError(dotted(section, key), "expected one of " + boost::algorithm::join(choices, ", ") + ", got '" + v + "'");
}

nlohmann::json Config::to_json(const std::string& section) const {
  nlohmann::json out;
  for (const auto& name : {std::string("run"), section}) {
    for (const auto& [k, v] : values_.at(name)) out[name][k] = v;
  }
  return out;
}

std::string defaults_ini() {
  std::ostringstream out;
  std::string current;
  for (const auto& k : schema()) {
    if (k.section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << k.section << "]\n";
      current = k.section;
    }
    out << "; " << k.help << '\n' << k.key << " = " << k.default_value << '\n';
  }
  return out.str();
}

}  // namespace rmq::app

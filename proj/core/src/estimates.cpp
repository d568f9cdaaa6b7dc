#include "rmq/estimates.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "rmq/error.hpp"

namespace rmq::estimates {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    raise(ErrorKind::InvalidArgument, std::string(name) + " must be finite and positive");
  }
}

}  // namespace

void EnvironmentParams::validate() const {
  require_positive(gas_number_density.si(), "gas_number_density");
  require_positive(thermal_velocity.si(), "thermal_velocity");
  require_positive(interaction_range.si(), "interaction_range");
  require_positive(photon_interaction_range.si(), "photon_interaction_range");
  require_positive(body_radius.si(), "body_radius");
  require_positive(body_mass.si(), "body_mass");
  require_positive(body_speed.si(), "body_speed");
  require_positive(resolution.si(), "resolution");
  require_positive(gas_particle_mass.si(), "gas_particle_mass");
  require_positive(hbar.si(), "hbar");
  require_positive(step.si(), "step");
  require_positive(air_window_bound.si(), "air_window_bound");
  require_positive(radiation_window_bound.si(), "radiation_window_bound");
  if (!(return_confidence > 0.0 && return_confidence < 1.0)) {
    raise(ErrorKind::InvalidArgument, "return_confidence must lie in (0, 1)");
  }
}

Time collision_window(Length range, Velocity relative_speed) {
  require_positive(relative_speed.si(), "relative speed");
  return range / relative_speed;
}

Flux molecular_flux(NumberDensity n, Velocity thermal_velocity) { return n * thermal_velocity / 4.0; }

Rate collision_rate(NumberDensity n, Velocity thermal_velocity, Length radius) {
  const Area cross_section = std::numbers::pi * radius * radius;
  return molecular_flux(n, thermal_velocity) * cross_section;
}

DiffusionCoefficients diffusion_coefficients(const EnvironmentParams& env, Time dt) {
  const Rate gamma = collision_rate(env.gas_number_density, env.thermal_velocity, env.body_radius);
  const Momentum p_kick = env.gas_particle_mass * env.thermal_velocity;
  const MomentumDiffusion d_p = gamma * p_kick * p_kick;
  const Time ref{kDiffusionReferenceTime};
  const PositionDiffusion d_a = d_p / (env.body_mass * env.body_mass) * ref * ref;
  return {(gamma * dt).si(), p_kick, d_p, d_a};
}

double kick_to_momentum_ratio(const EnvironmentParams& env, Time dt) {
  const auto d = diffusion_coefficients(env, dt);
  const Momentum macro = env.body_mass * env.body_speed;
  return (d.p_kick / macro).si() * std::sqrt(d.n_kicks);
}

Time spreading_time(Mass mass, Length sigma, Action hbar) { return mass * sigma * sigma / hbar; }

double epsilon_bound(Velocity v, Time tau, Length sigma, Time spreading) {
  return (v * tau / sigma).si() + (tau / spreading).si();
}

double epsilon_bound(const EnvironmentParams& env, Time tau) {
  return epsilon_bound(env.body_speed, tau, env.resolution,
                       spreading_time(env.body_mass, env.resolution, env.hbar));
}

ReturnTime return_time(double confidence, Time dt) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    raise(ErrorKind::InvalidArgument, "confidence must lie in (0, 1)");
  }
  const double tail = 1.0 - confidence;
  const auto n = static_cast<std::uint64_t>(std::ceil(1.0 / (std::numbers::pi * tail * tail)));
  return {n, static_cast<double>(n) * dt};
}

Length displacement_per_cycle(PositionDiffusion d_a, Time t) {
  if (d_a.si() < 0.0 || t.si() < 0.0) raise(ErrorKind::InvalidArgument, "D_a and T must be non-negative");
  return sqrt(d_a * t);
}

Length spreading_increment(Mass mass, Length sigma, Action hbar, Time t) {
  return hbar * t / (mass * sigma) / 4.0;
}

EstimateReport compute_estimates(const EnvironmentParams& env) {
  env.validate();
  const Velocity c{kSpeedOfLight};
  EstimateReport r{};
  r.tau_collision = collision_window(env.interaction_range, env.thermal_velocity);
  r.tau_photon = collision_window(env.photon_interaction_range, c);
  r.flux = molecular_flux(env.gas_number_density, env.thermal_velocity);
  r.gamma = collision_rate(env.gas_number_density, env.thermal_velocity, env.body_radius);
  const auto d = diffusion_coefficients(env, env.step);
  r.n_kicks = d.n_kicks;
  r.p_kick = d.p_kick;
  r.d_p = d.d_p;
  r.d_a = d.d_a;
  r.momentum_ratio = kick_to_momentum_ratio(env, env.step);
  r.t_spr = spreading_time(env.body_mass, env.resolution, env.hbar);
  r.tau_over_t_spr_air = (env.air_window_bound / r.t_spr).si();
  r.tau_over_t_spr_radiation = (env.radiation_window_bound / r.t_spr).si();
  r.displacement_over_sigma_air = (env.body_speed * r.tau_collision / env.resolution).si();
  r.epsilon_air = epsilon_bound(env, r.tau_collision);
  r.epsilon_radiation = epsilon_bound(env, r.tau_photon);
  const auto ret = return_time(env.return_confidence, env.step);
  r.n_return = ret.n_steps;
  r.t_return = ret.duration;
  r.da_cycle = displacement_per_cycle(r.d_a, r.t_return);
  r.dsigma_cycle = spreading_increment(env.body_mass, env.resolution, env.hbar, r.t_return);
  return r;
}

std::vector<ReportRow> report_rows(const EstimateReport& r) {
  return {
      {"tau_collision", r.tau_collision.si(), "s"},
      {"tau_photon", r.tau_photon.si(), "s"},
      {"flux", r.flux.si(), "m^-2 s^-1"},
      {"Gamma", r.gamma.si(), "s^-1"},
      {"N_kicks", r.n_kicks, "1"},
      {"p_kick", r.p_kick.si(), "kg m/s"},
      {"D_p", r.d_p.si(), "kg^2 m^2/s^3"},
      {"D_a", r.d_a.si(), "m^2/s"},
      {"momentum_ratio", r.momentum_ratio, "1"},
      {"T_spr", r.t_spr.si(), "s"},
      {"tau_over_T_spr_air", r.tau_over_t_spr_air, "1"},
      {"tau_over_T_spr_radiation", r.tau_over_t_spr_radiation, "1"},
      {"displacement_over_sigma_air", r.displacement_over_sigma_air, "1"},
      {"epsilon_air", r.epsilon_air, "1"},
      {"epsilon_radiation", r.epsilon_radiation, "1"},
      {"n_return", static_cast<double>(r.n_return), "steps"},
      {"T_return", r.t_return.si(), "s"},
      {"da_cycle", r.da_cycle.si(), "m"},
      {"dsigma_cycle", r.dsigma_cycle.si(), "m"},
  };
}

std::string format_table(const EstimateReport& report) {
  const auto rows = report_rows(report);
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, row.name.size());
  std::ostringstream out;
  for (const auto& row : rows) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << row.name << std::right << std::setw(14)
        << std::scientific << std::setprecision(4) << row.value << "  " << row.unit << '\n';
  }
  return out.str();
}

}  // namespace rmq::estimates

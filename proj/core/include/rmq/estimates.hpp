#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmq/units.hpp"

namespace rmq::estimates {

using namespace units;

/// Reduced Planck constant, rounded as in order-of-magnitude work and CODATA.
inline constexpr double kHbarRounded = 1e-34;
inline constexpr double kHbarCodata = 1.054571817e-34;
inline constexpr double kSpeedOfLight = 2.99792458e8;

/// D_p / M^2 has dimension m^2 s^-3; position diffusion in m^2/s is quoted
/// per this reference time squared.
inline constexpr double kDiffusionReferenceTime = 1.0;

/// Physical inputs. Defaults describe a 1 mg, 1 mm body in room-temperature air
/// resolved at 1 micron.
struct EnvironmentParams {
  NumberDensity gas_number_density{2.4e25};
  Velocity thermal_velocity{5e2};
  Length interaction_range{1e-9};
  Length photon_interaction_range{1e-6};
  Length body_radius{1e-3};
  Mass body_mass{1e-6};
  Velocity body_speed{1.0};
  Length resolution{1e-6};
  Mass gas_particle_mass{4.8e-26};
  Action hbar{kHbarRounded};
  /// Coarse-grained kick interval.
  Time step{1e-12};
  /// Upper bounds on interaction windows used for tau / T_spr.
  Time air_window_bound{1e-12};
  Time radiation_window_bound{1e-15};
  double return_confidence = 0.999968;

  void validate() const;
};

Time collision_window(Length range, Velocity relative_speed);
Flux molecular_flux(NumberDensity n, Velocity thermal_velocity);
/// Flux times the geometric cross-section pi R^2.
Rate collision_rate(NumberDensity n, Velocity thermal_velocity, Length radius);

struct DiffusionCoefficients {
  double n_kicks;
  Momentum p_kick;
  MomentumDiffusion d_p;
  PositionDiffusion d_a;
};

DiffusionCoefficients diffusion_coefficients(const EnvironmentParams& env, Time dt);
/// p_kick sqrt(N) / (M v).
double kick_to_momentum_ratio(const EnvironmentParams& env, Time dt);

Time spreading_time(Mass mass, Length sigma, Action hbar);
/// v tau / sigma + tau / T_spr.
double epsilon_bound(Velocity v, Time tau, Length sigma, Time spreading);
double epsilon_bound(const EnvironmentParams& env, Time tau);

struct ReturnTime {
  std::uint64_t n_steps;
  Time duration;
};

/// n = ceil(1 / (pi (1 - q)^2)) steps of length dt.
ReturnTime return_time(double confidence, Time dt);
Length displacement_per_cycle(PositionDiffusion d_a, Time t);
/// Width growth of a free Gaussian over t, taken at the order hbar t / (4 M sigma).
Length spreading_increment(Mass mass, Length sigma, Action hbar, Time t);

struct EstimateReport {
  Time tau_collision;
  Time tau_photon;
  Flux flux;
  Rate gamma;
  double n_kicks;
  Momentum p_kick;
  MomentumDiffusion d_p;
  PositionDiffusion d_a;
  double momentum_ratio;
  Time t_spr;
  double tau_over_t_spr_air;
  double tau_over_t_spr_radiation;
  double displacement_over_sigma_air;
  double epsilon_air;
  double epsilon_radiation;
  std::uint64_t n_return;
  Time t_return;
  Length da_cycle;
  Length dsigma_cycle;
};

EstimateReport compute_estimates(const EnvironmentParams& env);

struct ReportRow {
  std::string name;
  double value;
  std::string unit;
};

/// Flattened report in a fixed order (shared by the JSON and table writers).
std::vector<ReportRow> report_rows(const EstimateReport& report);
std::string format_table(const EstimateReport& report);

}  // namespace rmq::estimates

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "rmq/statespace.hpp"

namespace rmq {

/// Detector class {phi : mu_z(phi) = center, delta_z(phi) <= resolution}.
struct ClassSpec {
  double center = 0.0;
  double resolution = 1.0;

  /// Default membership tolerance on mu_z: half the detection bin.
  [[nodiscard]] double default_mu_tol() const noexcept { return 0.5 * resolution; }

  /// Membership test on the moments. The width check allows 1e-9 relative
  /// slack so a sampled packet of width `resolution` belongs to its class.
  [[nodiscard]] bool admits(double mu, double delta, std::optional<double> mu_tol = {}) const noexcept {
    return std::abs(mu - center) <= mu_tol.value_or(default_mu_tol()) && delta <= resolution * (1.0 + 1e-9);
  }
};

/// Coordinates on the translation/scaling orbit: tau = mu_z, s = ln delta_z.
struct FoliationPoint {
  double tau = 0.0;
  double s = 0.0;
};

struct IsometryRow {
  double separation;
  double cos2_numeric;
  double cos2_closed_form;
  double abs_error;
};

struct IsometryReport {
  double max_abs_error = 0.0;
  std::size_t samples = 0;
  /// fs_distance / (da / 2 sigma) at da = sigma / 100.
  double local_scale_ratio = 1.0;
  std::vector<IsometryRow> rows;
};

bool class_membership(const GridState& state, const ClassSpec& spec, std::optional<double> mu_tol = {});

/// arccos(exp(-(c-d)^2 / 8 sigma^2)). Throws MixedResolutions.
double class_distance(const ClassSpec& a, const ClassSpec& b);

/// Diagnostic only, not a metric: max(0, |mu_z - c| - mu_tol) / sigma.
double surrogate_class_distance(const GridState& state, const ClassSpec& spec,
                                std::optional<double> mu_tol = {});

/// cos^2 of the FS distance between two equal-width momentum packets.
double phase_space_overlap(const PacketParams& p1, const PacketParams& p2,
                           const PhysicalConstants& consts = {});

/// phi_{tau,lambda}(z) = sqrt(lambda) phi(lambda (z - mu - tau) + mu), resampled
/// onto the same grid by cubic B-spline interpolation and renormalized.
GridState scale_translate(const GridState& state, double tau, double lambda);

FoliationPoint foliation_coords(const GridState& state);

/// |<T_tau, T_s>| / (|T_tau| |T_s|) for the horizontal tangent vectors of the
/// translation/scaling orbit through `state` (central differences, step `h`).
double tangent_orthogonality(const GridState& state, double h = 1e-4);

IsometryReport isometry_check(const Grid& grid, double sigma, std::size_t n_samples, double max_sep);

}  // namespace rmq

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>

#include <Eigen/Dense>

#include "rmq/random.hpp"
#include "rmq/statespace.hpp"

namespace rmq {

/// Hermitian matrix from the Gaussian unitary ensemble. Off-diagonal entries
/// have E|H_jk|^2 = scale^2 (real and imaginary parts with std scale/sqrt 2),
/// diagonal entries are real with std scale.
struct GueSample {
  Eigen::MatrixXcd entries;
  double scale = 0.0;

  [[nodiscard]] std::size_t dimension() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

GueSample sample_gue(std::size_t n, double scale, RandomStream& rng);
/// Same draw order as sample_gue, reusing `out`'s storage.
void sample_gue_into(Eigen::MatrixXcd& out, std::size_t n, double scale, RandomStream& rng);

/// Semicircle CDF on [-radius, radius]; the GUE spectral edge is 2 sqrt(N) scale.
double semicircle_cdf(double x, double radius);

/// Writes `index,eigenvalue` rows.
void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& eigenvalues);

/// Restricts kicks to the span of `count` evenly spaced Gaussians of the
/// given width (orthonormalized symmetrically). A `co_moving` window is
/// re-centered before every kick on the grid point nearest mu_z and carries
/// the state's mean momentum as a plane-wave factor.
struct GaussianWindow {
  std::size_t count = 64;
  double width = 0.19;
  double spacing = 0.375;
  bool co_moving = false;
  double center = 0.0;
};

enum class KickPropagator { eigendecomposition, taylor };

struct KickConfig {
  double dt = 1.0;
  double scale = 0.0;
  /// Kick dimension N; 0 means "whatever the grid or window implies".
  std::size_t dimension = 0;
  std::uint64_t seed = 0;
  double hbar = 1.0;
  std::optional<GaussianWindow> window;
  KickPropagator propagator = KickPropagator::eigendecomposition;

  void validate() const;
  /// Effective N on `grid`; throws DimensionMismatch if `dimension` disagrees.
  [[nodiscard]] std::size_t kick_dimension(const Grid& grid) const;
};

/// exp(-i H dt / hbar) for a Hermitian H via eigendecomposition.
Eigen::MatrixXcd kick_unitary(const Eigen::MatrixXcd& h, double dt, double hbar);

/// Applies exp(-i H t) v for Hermitian H by a truncated Taylor series with
/// adaptive order and substepping. `t` already includes 1/hbar.
void expm_action_taylor(const Eigen::MatrixXcd& h, double t, Eigen::VectorXcd& v);

/// Reusable kick operator for one grid and configuration. Not thread-safe;
/// give each worker its own instance.
class KickOperator {
 public:
  KickOperator(const Grid& grid, const KickConfig& cfg);

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] const KickConfig& config() const noexcept { return cfg_; }

  /// Draws a fresh GUE Hamiltonian and applies its propagator in place.
  void apply(Amplitudes& psi, RandomStream& rng);
  /// Applies exp(-i H dt / hbar) for a given Hamiltonian (dimension N).
  void apply(Amplitudes& psi, const Eigen::MatrixXcd& h);

  /// Coefficients of psi in the current kick subspace (sqrt(dx) psi for
  /// full-grid kicks).
  [[nodiscard]] Eigen::VectorXcd coefficients(const Amplitudes& psi) const;
  /// Positions a co-moving window on psi first.
  Eigen::VectorXcd coefficients_at(const Amplitudes& psi) {
    place_window(psi);
    return coefficients(psi);
  }

 private:
  void place_window(const Amplitudes& psi);

  Grid grid_;
  KickConfig cfg_;
  std::size_t dimension_;
  // Window profile: rows relative to the window's centre grid point.
  Eigen::MatrixXcd profile_;
  std::ptrdiff_t half_rows_ = 0;
  std::ptrdiff_t first_row_ = 0;
  double wavenumber_ = 0.0;
  Eigen::VectorXcd phase_;
  Eigen::MatrixXcd h_;
  Eigen::VectorXcd coeffs_;
  Eigen::VectorXcd kicked_;
};

GridState rm_kick(const GridState& state, const KickConfig& cfg, RandomStream& rng);

/// Returns the GUE scale whose mean Fubini-Study kick length on a reference
/// state equals `target_eps`. Uses `n_trials` pre-drawn unit-scale matrices
/// (common random numbers) and bisects on scale * dt / hbar.
double calibrate_step(std::size_t n, double target_eps, double dt, RandomStream& rng,
                      std::size_t n_trials = 1000, double hbar = 1.0);

/// Calibration on the actual state and kick configuration (window included).
double calibrate_step(const GridState& state, const KickConfig& cfg, double target_eps, RandomStream& rng,
                      std::size_t n_trials = 1000);

}  // namespace rmq

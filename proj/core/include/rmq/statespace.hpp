#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string_view>

#include <Eigen/Dense>

namespace rmq {

/// Norm deviation above which observables refuse a state.
inline constexpr double kNormTolerance = 1e-6;
/// Maximum probability mass allowed in the outer band of the grid.
inline constexpr double kLeakageTolerance = 1e-8;
/// Fraction of grid points at each end forming the edge band.
inline constexpr double kEdgeBandFraction = 0.05;
/// Packets must satisfy width >= kMinWidthInSpacings * dx ...
inline constexpr double kMinWidthInSpacings = 4.0;
/// ... and sit at least kMinEdgeClearance widths away from either edge.
inline constexpr double kMinEdgeClearance = 8.0;

struct PhysicalConstants {
  double hbar = 1.0;
  double mass = 1.0;

  void validate() const;
};

/// Uniform 1D position grid z_k = origin + k * dx, k = 0..n-1, dx = length / n.
class Grid {
 public:
  Grid(std::size_t n_points, double length, double origin);

  /// Grid covering [-half_width, half_width).
  static Grid centered(std::size_t n_points, double half_width);

  [[nodiscard]] std::size_t n_points() const noexcept { return n_points_; }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] double origin() const noexcept { return origin_; }
  [[nodiscard]] double spacing() const noexcept { return length_ / static_cast<double>(n_points_); }
  [[nodiscard]] double end() const noexcept { return origin_ + length_; }
  [[nodiscard]] double point(std::size_t k) const noexcept {
    return origin_ + static_cast<double>(k) * spacing();
  }
  [[nodiscard]] Eigen::VectorXd points() const;
  /// Number of points in each of the two edge bands.
  [[nodiscard]] std::size_t edge_band_points() const noexcept;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_points_;
  double length_;
  double origin_;
};

using Amplitudes = Eigen::VectorXcd;

/// Complex amplitudes on a grid. Immutable once constructed; operations
/// return new states, so values can be shared freely between threads.
class GridState {
 public:
  GridState(Grid grid, Amplitudes amplitudes);

  /// Rescales the amplitudes to unit norm under the grid inner product.
  static GridState normalized(Grid grid, Amplitudes amplitudes);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] std::size_t size() const noexcept { return grid_.n_points(); }
  [[nodiscard]] double norm() const;

 private:
  Grid grid_;
  Amplitudes amplitudes_;
};

struct PacketParams {
  double center = 0.0;
  double width = 1.0;
  double momentum = 0.0;
};

/// Normalized Gaussian g_{a,sigma}(z) e^{i p z / hbar} sampled on the grid.
GridState make_packet(const PacketParams& params, const Grid& grid,
                      const PhysicalConstants& consts = {});

/// Grid inner product <phi, psi> = sum conj(phi_k) psi_k dx.
std::complex<double> inner(const GridState& phi, const GridState& psi);
GridState normalize(const GridState& state);

struct PositionMoments {
  double mean;
  double stddev;
};

/// Mean and standard deviation of |phi|^2 dx. Throws NotNormalized.
PositionMoments position_moments(const GridState& state);
double mu_z(const GridState& state);
double delta_z(const GridState& state);

/// <psi| -i hbar d/dz |psi> with the derivative taken spectrally.
double momentum_mean(const Grid& grid, const Amplitudes& amplitudes, double hbar);
double momentum_mean(const GridState& state, const PhysicalConstants& consts = {});

/// Fubini-Study distance arccos |<phi, psi>| in [0, pi/2].
double fs_distance(const GridState& phi, const GridState& psi);

/// Probability mass inside the two edge bands.
double edge_leakage(const GridState& state);
/// Throws LeakageDetected if the edge-band mass exceeds kLeakageTolerance.
void require_leakage_free(const GridState& state, std::string_view context);
void require_normalized(const GridState& state);
void require_same_grid(const GridState& a, const GridState& b);

/// CSV with a `# grid n_points=.. length=.. origin=..` header line followed by
/// `index,z,re,im` rows.
void write_state_csv(std::ostream& out, const GridState& state);
GridState read_state_csv(std::istream& in);

}  // namespace rmq

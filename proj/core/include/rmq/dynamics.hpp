#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rmq/ensembles.hpp"
#include "rmq/fft.hpp"
#include "rmq/geometry.hpp"
#include "rmq/random.hpp"
#include "rmq/statespace.hpp"

namespace rmq {

/// Time-independent potential with analytic derivatives.
class Potential {
 public:
  enum class Kind { free, linear, harmonic };

  static Potential free() { return Potential(Kind::free, 0.0, 0.0); }
  /// V(z) = slope * z.
  static Potential linear(double slope) { return Potential(Kind::linear, slope, 0.0); }
  /// V(z) = stiffness (z - center)^2 / 2.
  static Potential harmonic(double stiffness, double center = 0.0) {
    return Potential(Kind::harmonic, stiffness, center);
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double strength() const noexcept { return strength_; }
  [[nodiscard]] double center() const noexcept { return center_; }

  [[nodiscard]] double value(double z) const noexcept;
  [[nodiscard]] double gradient(double z) const noexcept;
  [[nodiscard]] double curvature(double z) const noexcept;

 private:
  Potential(Kind kind, double strength, double center) : kind_(kind), strength_(strength), center_(center) {}

  Kind kind_;
  double strength_;
  double center_;
};

struct FreeHamiltonian {
  Grid grid;
  PhysicalConstants consts{};
  Potential potential = Potential::free();

  [[nodiscard]] Eigen::VectorXd potential_values() const;
};

/// Strang-split spectral propagator for one time step; reusable across steps.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const FreeHamiltonian& h, double dt);

  void step(Amplitudes& psi) const;
  [[nodiscard]] double dt() const noexcept { return dt_; }

 private:
  double dt_;
  bool has_potential_;
  Eigen::VectorXcd half_potential_;
  Eigen::VectorXcd kinetic_;
  std::shared_ptr<const FourierTransform> fft_;
};

/// One split-step of length dt. Throws LeakageDetected if the state touches
/// the edge band before or after the step.
GridState free_step(const GridState& state, const FreeHamiltonian& h, double dt);
/// n_steps split-steps covering total time t.
GridState free_evolve(const GridState& state, const FreeHamiltonian& h, double t, std::size_t n_steps);

/// <h> with the kinetic part evaluated spectrally.
double energy(const GridState& state, const FreeHamiltonian& h);
/// <phi|[z, p]|phi> with p the spectral derivative; i hbar for states away from the edges.
std::complex<double> position_momentum_commutator(const GridState& state, const PhysicalConstants& consts = {});

struct ClassicalState {
  double position = 0.0;
  double momentum = 0.0;
};

/// Velocity-Verlet integration, ceil(t_final / dt) equal steps. The returned
/// trajectory includes the initial state.
std::vector<ClassicalState> newtonian_reference(const ClassicalState& init, const FreeHamiltonian& h,
                                                double t_final, double dt);

struct VelocityDecomposition {
  double v_term = 0.0;       // v^2 / 4 sigma^2
  double w_term = 0.0;       // m^2 w^2 sigma^2 / hbar^2
  double spread_term = 0.0;  // hbar^2 / 32 sigma^4 m^2
  double analytic_total = 0.0;
  double numeric_total = 0.0;
  bool precondition_ok = true;
};

/// Squared Fubini-Study speed of a Gaussian packet under h, measured from
/// short split-step evolutions (Richardson-extrapolated) and compared with
/// its translation, acceleration and spreading contributions.
VelocityDecomposition velocity_decomposition(const PacketParams& params, const FreeHamiltonian& h);

struct CommutatorEstimate {
  double measured = 0.0;
  double analytic_bound = 0.0;
};

/// |(U_free U_kick - U_kick U_free) state| for U_free = exp(-i h tau / hbar)
/// and one kick with Hamiltonian `kick_hamiltonian`. The analytic bound is
/// v tau / sigma + tau / T_spr with sigma = resolution.
CommutatorEstimate commutator_epsilon(const GridState& state, const FreeHamiltonian& h, const KickConfig& kick,
                                      const Eigen::MatrixXcd& kick_hamiltonian, double tau, double resolution);
/// As above with a fresh GUE draw and resolution = delta_z(state).
CommutatorEstimate commutator_epsilon(const GridState& state, const FreeHamiltonian& h, const KickConfig& kick,
                                      double tau, RandomStream& rng);

/// Alternation pattern: `free_steps_per_kick` free steps of length dt_free
/// (each split into `n_free_substeps` split-steps), then one kick. Kicks take
/// no time unless dt_free is zero, in which case each window lasts kick.dt.
struct EvolutionConfig {
  double dt_free = 0.01;
  std::size_t n_free_substeps = 1;
  KickConfig kick{};
  std::size_t free_steps_per_kick = 10;

  void validate() const;
  [[nodiscard]] double window_duration() const;
};

struct TimePoint {
  double t;
  double tau;
  double s;
  double norm;
  double energy;
};

struct Evolution {
  GridState final_state;
  std::vector<TimePoint> series;
};

/// Records the initial point and one point after every kick window.
Evolution alternating_evolve(const GridState& state, const FreeHamiltonian& h, const EvolutionConfig& cfg,
                             double t_final, RandomStream& rng);

/// `t,tau,s,norm,energy` rows.
void write_series_csv(std::ostream& out, const std::vector<TimePoint>& series);

}  // namespace rmq

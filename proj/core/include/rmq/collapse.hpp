#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmq/ensembles.hpp"
#include "rmq/estimates.hpp"
#include "rmq/geometry.hpp"
#include "rmq/random.hpp"
#include "rmq/statespace.hpp"

namespace rmq {

struct CollapseRun {
  std::uint64_t seed = 0;
  std::size_t n_steps_max = 0;
  std::vector<ClassSpec> detectors;
  std::optional<std::size_t> outcome;
  /// Kicks executed; the hitting step when an outcome was detected.
  std::size_t hitting_step = 0;
  std::vector<FoliationPoint> foliation_trace;

  [[nodiscard]] bool timed_out() const noexcept { return !outcome.has_value(); }
};

struct CollapseOptions {
  bool record_trace = true;
  std::optional<double> mu_tol;
};

/// Throws DetectorOverlap unless detector centres are >= 6 sigma apart.
void require_separated(std::span<const ClassSpec> detectors);

/// Kicks `initial` until it first enters one of the detector classes or
/// n_steps_max kicks have been applied.
CollapseRun run_collapse(const GridState& initial, std::span<const ClassSpec> detectors, const KickConfig& kick,
                         std::size_t n_steps_max, RandomStream& rng, const CollapseOptions& options = {});

struct RunRecord {
  std::uint64_t seed;
  std::optional<std::size_t> outcome;
  std::size_t hitting_step;
  bool timeout;
};

struct BornSetup {
  std::vector<std::complex<double>> amplitudes;
  std::vector<double> centers;
  double sigma = 1.0;
  Grid grid = Grid::centered(512, 16.0);
  KickConfig kick{};
  std::size_t n_steps_max = 10000;
  std::size_t n_runs = 1000;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  /// Runs are processed in fixed batches; the timeout budget is checked
  /// after each batch.
  std::size_t batch_size = 256;
  std::optional<double> mu_tol;
};

struct BornReport {
  std::vector<double> weights;
  std::vector<std::size_t> counts;
  std::size_t n_runs = 0;
  std::size_t timeouts = 0;
  double chi2 = 0.0;
  double chi2_p = 1.0;
  /// Completed runs in index order (a prefix of all runs if aborted).
  std::vector<RunRecord> runs;
  /// Set when the timeout budget was exceeded; counts cover `runs` only.
  bool aborted = false;
  std::string abort_reason;
};

/// Normalized sum_i c_i g_{center_i, sigma}.
GridState superposition(const Grid& grid, std::span<const std::complex<double>> amplitudes,
                        std::span<const double> centers, double sigma);

/// Throws TimeoutFractionExceeded once more than 5% of n_runs have timed out.
BornReport born_statistics(const BornSetup& setup);
/// As born_statistics, but stops at the failing batch and returns the partial
/// report with `aborted` set instead of throwing.
BornReport born_statistics_partial(const BornSetup& setup);

inline constexpr double kMaxTimeoutFraction = 0.05;

/// C(2n, n) / 4^n.
double sparre_andersen_exact(std::uint64_t n);

enum class StepLaw { gaussian, plus_minus_one };

struct SurvivalReport {
  std::vector<std::size_t> n_values;
  std::vector<double> empirical_survival;
  std::vector<double> exact_survival;
  double max_abs_deviation = 0.0;
};

/// Fraction of walks whose position stays strictly above the start for the
/// first n steps. Integer steps break ties at the start level with an
/// independent continuous symmetric walk (lexicographic order).
SurvivalReport survival_simulation(StepLaw law, std::size_t n_walks, std::size_t n_max, RandomStream& rng);

struct StepStd {
  double tau = 0.0;
  double s = 0.0;
};

struct Detection {
  std::size_t step;
  double tau;
};

struct ReducedWalk {
  std::vector<FoliationPoint> trace;
  std::vector<Detection> detections;
  /// Fraction of steps with s at or below the starting s.
  double fraction_s_below_start = 0.0;
};

/// Gaussian walk in the (tau, s) plane with drift. Whenever s <= detect_s a
/// detection is recorded and s restarts from start.s (tau is kept).
ReducedWalk reduced_plane_walk(const FoliationPoint& start, double drift_tau, const StepStd& step_std,
                               double detect_s, std::size_t n_max, RandomStream& rng, double drift_s = 0.0,
                               bool record_trace = true);

/// (tau_m - tau_{m-1} - drift * dn) / (std_tau * sqrt(dn)) between successive
/// detections, the first one measured from start_tau at step 0.
std::vector<double> detection_residuals(const ReducedWalk& walk, double start_tau, double drift_tau,
                                        double std_tau);

struct RenewalConfig {
  estimates::PositionDiffusion d_a{0.0};
  estimates::Time step{1e-12};
  /// Return times beyond this Sparre Andersen quantile are clamped to it.
  double truncation_quantile = 0.999968;
};

struct RenewalStats {
  std::vector<std::uint64_t> return_steps;
  std::vector<double> displacements;
  std::vector<double> cumulative_deviation;
  std::uint64_t truncation_steps = 0;
  std::size_t truncated = 0;
  /// sqrt(D_a T) at the truncation quantile.
  double typical_displacement = 0.0;
};

/// Smallest n with P(tau > n) < u; samples the return step for u ~ U(0, 1).
std::uint64_t sparre_andersen_inverse(double u);

RenewalStats renewal_cycle(const RenewalConfig& cfg, std::size_t n_cycles, RandomStream& rng);
RenewalStats renewal_cycle(const estimates::EnvironmentParams& env, std::size_t n_cycles, RandomStream& rng);

void write_trace_csv(std::ostream& out, std::span<const FoliationPoint> trace);
void write_survival_csv(std::ostream& out, const SurvivalReport& report);

}  // namespace rmq

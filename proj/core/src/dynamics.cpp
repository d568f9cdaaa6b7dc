#include "rmq/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "rmq/error.hpp"
#include "rmq/fft.hpp"

namespace rmq {

double Potential::value(double z) const noexcept {
  switch (kind_) {
    case Kind::linear:
      return strength_ * z;
    case Kind::harmonic:
      return 0.5 * strength_ * (z - center_) * (z - center_);
    case Kind::free:
      break;
  }
  return 0.0;
}

double Potential::gradient(double z) const noexcept {
  switch (kind_) {
    case Kind::linear:
      return strength_;
    case Kind::harmonic:
      return strength_ * (z - center_);
    case Kind::free:
      break;
  }
  return 0.0;
}

double Potential::curvature(double) const noexcept { return kind_ == Kind::harmonic ? strength_ : 0.0; }

Eigen::VectorXd FreeHamiltonian::potential_values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.n_points()));
  for (std::size_t k = 0; k < grid.n_points(); ++k) {
    v(static_cast<Eigen::Index>(k)) = potential.value(grid.point(k));
  }
  return v;
}

SplitStepPropagator::SplitStepPropagator(const FreeHamiltonian& h, double dt)
    : dt_(dt), has_potential_(h.potential.kind() != Potential::Kind::free), fft_(FourierTransform::of_size(h.grid.n_points())) {
  h.consts.validate();
  if (!std::isfinite(dt)) raise(ErrorKind::InvalidArgument, "time step must be finite");
  const double hbar = h.consts.hbar;
  if (has_potential_) {
    const Eigen::VectorXd v = h.potential_values();
    half_potential_.resize(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      half_potential_(k) = std::polar(1.0, -0.5 * v(k) * dt / hbar);
    }
  }
  const Eigen::VectorXd k = angular_wavenumbers(h.grid.n_points(), h.grid.spacing());
  kinetic_.resize(k.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    kinetic_(j) = std::polar(1.0, -hbar * k(j) * k(j) * dt / (2.0 * h.consts.mass));
  }
}

void SplitStepPropagator::step(Amplitudes& psi) const {
  if (has_potential_) psi.array() *= half_potential_.array();
  Eigen::VectorXcd spectrum;
  fft_->forward(psi, spectrum);
  spectrum.array() *= kinetic_.array();
  fft_->inverse(spectrum, psi);
  if (has_potential_) psi.array() *= half_potential_.array();
}

GridState free_step(const GridState& state, const FreeHamiltonian& h, double dt) {
  return free_evolve(state, h, dt, 1);
}

GridState free_evolve(const GridState& state, const FreeHamiltonian& h, double t, std::size_t n_steps) {
  require_normalized(state);
  if (!(state.grid() == h.grid)) raise(ErrorKind::GridMismatch, "state and Hamiltonian grids differ");
  if (n_steps == 0) raise(ErrorKind::InvalidArgument, "free evolution needs at least one step");
  require_leakage_free(state, "free_step input");
  const SplitStepPropagator prop(h, t / static_cast<double>(n_steps));
  Amplitudes psi = state.amplitudes();
  for (std::size_t i = 0; i < n_steps; ++i) prop.step(psi);
  GridState out(state.grid(), std::move(psi));
  require_leakage_free(out, "free_step output");
  return out;
}

double energy(const GridState& state, const FreeHamiltonian& h) {
  require_normalized(state);
  const auto& grid = state.grid();
  const auto fft = FourierTransform::of_size(grid.n_points());
  Eigen::VectorXcd spectrum;
  fft->forward(state.amplitudes(), spectrum);
  const Eigen::VectorXd k = angular_wavenumbers(grid.n_points(), grid.spacing());
  const double hbar = h.consts.hbar;
  double kin = 0.0;
  double weight = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    const double w = std::norm(spectrum(j));
    kin += hbar * hbar * k(j) * k(j) / (2.0 * h.consts.mass) * w;
    weight += w;
  }
  double pot = 0.0;
  if (h.potential.kind() != Potential::Kind::free) {
    const Eigen::VectorXd v = h.potential_values();
    pot = (v.array() * state.amplitudes().array().abs2()).sum() * grid.spacing();
  }
  return kin / weight + pot;
}

namespace {

Amplitudes spectral_derivative(const Grid& grid, const Amplitudes& f) {
  const auto fft = FourierTransform::of_size(grid.n_points());
  const Eigen::VectorXd k = angular_wavenumbers(grid.n_points(), grid.spacing());
  Eigen::VectorXcd spectrum;
  fft->forward(f, spectrum);
  const auto n = static_cast<Eigen::Index>(grid.n_points());
  for (Eigen::Index j = 0; j < n; ++j) {
    spectrum(j) *= (n % 2 == 0 && j == n / 2) ? std::complex<double>(0.0) : std::complex<double>(0.0, k(j));
  }
  Amplitudes out;
  fft->inverse(spectrum, out);
  return out;
}

}  // namespace

std::complex<double> position_momentum_commutator(const GridState& state, const PhysicalConstants& consts) {
  consts.validate();
  require_normalized(state);
  const Grid& grid = state.grid();
  const Eigen::VectorXd z = grid.points();
  const Amplitudes& phi = state.amplitudes();
  const std::complex<double> minus_i_hbar(0.0, -consts.hbar);
  const Amplitudes p_phi = minus_i_hbar * spectral_derivative(grid, phi);
  const Amplitudes z_phi = z.cast<std::complex<double>>().cwiseProduct(phi);
  const Amplitudes p_z_phi = minus_i_hbar * spectral_derivative(grid, z_phi);
  const Amplitudes z_p_phi = z.cast<std::complex<double>>().cwiseProduct(p_phi);
  return phi.dot(z_p_phi - p_z_phi) * grid.spacing();
}

std::vector<ClassicalState> newtonian_reference(const ClassicalState& init, const FreeHamiltonian& h,
                                                double t_final, double dt) {
  h.consts.validate();
  if (!(dt > 0.0) || !(t_final >= 0.0)) raise(ErrorKind::InvalidArgument, "need dt > 0 and t_final >= 0");
  const auto n = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-12));
  const double step = n == 0 ? 0.0 : t_final / static_cast<double>(n);
  const double m = h.consts.mass;
  std::vector<ClassicalState> traj;
  traj.reserve(n + 1);
  traj.push_back(init);
  ClassicalState s = init;
  for (std::size_t i = 0; i < n; ++i) {
    const double p_half = s.momentum - 0.5 * step * h.potential.gradient(s.position);
    s.position += step * p_half / m;
    s.momentum = p_half - 0.5 * step * h.potential.gradient(s.position);
    traj.push_back(s);
  }
  return traj;
}

VelocityDecomposition velocity_decomposition(const PacketParams& params, const FreeHamiltonian& h) {
  const auto& c = h.consts;
  c.validate();
  const double sigma = params.width;
  const double v = params.momentum / c.mass;
  const double w = -h.potential.gradient(params.center) / c.mass;

  VelocityDecomposition out;
  out.v_term = v * v / (4.0 * sigma * sigma);
  out.w_term = c.mass * c.mass * w * w * sigma * sigma / (c.hbar * c.hbar);
  out.spread_term = c.hbar * c.hbar / (32.0 * std::pow(sigma, 4) * c.mass * c.mass);
  out.analytic_total = out.v_term + out.w_term + out.spread_term;

  const double curv = std::abs(h.potential.curvature(params.center));
  const double slope = std::abs(h.potential.gradient(params.center));
  out.precondition_ok = curv * sigma * sigma <= 0.1 * (slope * sigma + c.hbar * c.hbar / (c.mass * sigma * sigma));

  const GridState phi = make_packet(params, h.grid, c);
  auto speed_sq = [&](double dt) {
    const GridState later = free_step(phi, h, dt);
    const double rho = fs_distance(phi, later);
    return rho * rho / (dt * dt);
  };
  // rho^2 is even in dt, so the difference quotient has an O(dt^2) error.
  const double dt = 0.02 / std::sqrt(out.analytic_total);
  out.numeric_total = (4.0 * speed_sq(0.5 * dt) - speed_sq(dt)) / 3.0;
  return out;
}

CommutatorEstimate commutator_epsilon(const GridState& state, const FreeHamiltonian& h, const KickConfig& kick,
                                      const Eigen::MatrixXcd& kick_hamiltonian, double tau, double resolution) {
  require_normalized(state);
  if (!(resolution > 0.0)) raise(ErrorKind::InvalidArgument, "resolution must be positive");
  if (!(tau >= 0.0)) raise(ErrorKind::InvalidArgument, "tau must be non-negative");
  const auto moments = position_moments(state);
  if (moments.stddev > resolution) {
    std::ostringstream msg;
    msg << "state spread " << moments.stddev << " exceeds the resolution " << resolution;
    raise(ErrorKind::NotLocalized, msg.str());
  }
  const auto& c = h.consts;
  const double v = std::abs(momentum_mean(state, c)) / c.mass;
  const double spreading_time = c.mass * resolution * resolution / c.hbar;
  CommutatorEstimate out;
  out.analytic_bound = v * tau / resolution + tau / spreading_time;
  if (tau == 0.0) return out;

  KickOperator op(state.grid(), kick);
  const SplitStepPropagator prop(h, tau);
  Amplitudes kick_first = state.amplitudes();
  op.apply(kick_first, kick_hamiltonian);
  prop.step(kick_first);
  Amplitudes free_first = state.amplitudes();
  prop.step(free_first);
  op.apply(free_first, kick_hamiltonian);
  out.measured = std::sqrt((kick_first - free_first).squaredNorm() * state.grid().spacing());
  return out;
}

CommutatorEstimate commutator_epsilon(const GridState& state, const FreeHamiltonian& h, const KickConfig& kick,
                                      double tau, RandomStream& rng) {
  const std::size_t n = kick.kick_dimension(state.grid());
  const GueSample sample = sample_gue(n, kick.scale, rng);
  return commutator_epsilon(state, h, kick, sample.entries, tau, delta_z(state));
}

void EvolutionConfig::validate() const {
  kick.validate();
  if (!(dt_free >= 0.0) || !std::isfinite(dt_free)) raise(ErrorKind::InvalidArgument, "dt_free must be >= 0");
  if (n_free_substeps == 0) raise(ErrorKind::InvalidArgument, "n_free_substeps must be positive");
  if (free_steps_per_kick == 0) raise(ErrorKind::InvalidArgument, "free_steps_per_kick must be positive");
}

double EvolutionConfig::window_duration() const {
  return dt_free > 0.0 ? dt_free * static_cast<double>(free_steps_per_kick) : kick.dt;
}

Evolution alternating_evolve(const GridState& state, const FreeHamiltonian& h, const EvolutionConfig& cfg,
                             double t_final, RandomStream& rng) {
  cfg.validate();
  require_normalized(state);
  if (!(state.grid() == h.grid)) raise(ErrorKind::GridMismatch, "state and Hamiltonian grids differ");
  if (!(t_final >= 0.0)) raise(ErrorKind::InvalidArgument, "t_final must be non-negative");

  const double window = cfg.window_duration();
  const auto n_windows = static_cast<std::size_t>(std::llround(t_final / window));
  const Grid& grid = state.grid();
  KickOperator kicker(grid, cfg.kick);
  const bool has_free = cfg.dt_free > 0.0;
  const SplitStepPropagator prop(h, has_free ? cfg.dt_free / static_cast<double>(cfg.n_free_substeps) : 0.0);

  Amplitudes psi = state.amplitudes();
  auto record = [&](double t) {
    const GridState snapshot(grid, psi);
    const auto fp = foliation_coords(snapshot);
    return TimePoint{t, fp.tau, fp.s, snapshot.norm(), energy(snapshot, h)};
  };

  Evolution out{state, {}};
  out.series.reserve(n_windows + 1);
  out.series.push_back(record(0.0));
  for (std::size_t w = 0; w < n_windows; ++w) {
    if (has_free) {
      for (std::size_t i = 0; i < cfg.free_steps_per_kick; ++i) {
        for (std::size_t j = 0; j < cfg.n_free_substeps; ++j) prop.step(psi);
        require_leakage_free(GridState(grid, psi), "alternating_evolve free segment");
      }
    }
    kicker.apply(psi, rng);
    out.series.push_back(record(static_cast<double>(w + 1) * window));
  }
  out.final_state = GridState(grid, std::move(psi));
  return out;
}

void write_series_csv(std::ostream& out, const std::vector<TimePoint>& series) {
  const auto old = out.precision(17);
  out << "t,tau,s,norm,energy\n";
  for (const auto& p : series) {
    out << p.t << ',' << p.tau << ',' << p.s << ',' << p.norm << ',' << p.energy << '\n';
  }
  out.precision(old);
}

}  // namespace rmq

#include "rmq/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "rmq/error.hpp"

namespace rmq {

void sample_gue_into(Eigen::MatrixXcd& out, std::size_t n, double scale, RandomStream& rng) {
  if (n < 2) {
    raise(ErrorKind::InvalidArgument, "GUE dimension must be at least 2");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  out.resize(dim, dim);
  const double off = scale / std::numbers::sqrt2;
  for (Eigen::Index j = 0; j < dim; ++j) {
    out(j, j) = scale * rng.normal();
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      const double re = off * rng.normal();
      const double im = off * rng.normal();
      out(j, k) = {re, im};
      out(k, j) = {re, -im};
    }
  }
}

GueSample sample_gue(std::size_t n, double scale, RandomStream& rng) {
  GueSample s;
  s.scale = scale;
  sample_gue_into(s.entries, n, scale, rng);
  return s;
}

double semicircle_cdf(double x, double radius) {
  if (x <= -radius) return 0.0;
  if (x >= radius) return 1.0;
  const double r2 = radius * radius;
  return 0.5 + x * std::sqrt(r2 - x * x) / (std::numbers::pi * r2) + std::asin(x / radius) / std::numbers::pi;
}

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& eigenvalues) {
  const auto old = out.precision(17);
  out << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    out << i << ',' << eigenvalues(i) << '\n';
  }
  out.precision(old);
}

void KickConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) raise(ErrorKind::InvalidArgument, "kick dt must be positive");
  if (!(scale >= 0.0) || !std::isfinite(scale)) raise(ErrorKind::InvalidArgument, "kick scale must be >= 0");
  if (!(hbar > 0.0)) raise(ErrorKind::InvalidArgument, "hbar must be positive");
  if (window) {
    if (window->count < 2) raise(ErrorKind::InvalidArgument, "kick window needs at least 2 functions");
    if (!(window->width > 0.0) || !(window->spacing > 0.0)) {
      raise(ErrorKind::InvalidArgument, "kick window width and spacing must be positive");
    }
  }
}

std::size_t KickConfig::kick_dimension(const Grid& grid) const {
  const std::size_t natural = window ? window->count : grid.n_points();
  if (dimension != 0 && dimension != natural) {
    std::ostringstream msg;
    msg << "kick dimension " << dimension << " does not match " << (window ? "window size " : "grid size ")
        << natural;
    raise(ErrorKind::DimensionMismatch, msg.str());
  }
  return natural;
}

Eigen::MatrixXcd kick_unitary(const Eigen::MatrixXcd& h, double dt, double hbar) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -dt / hbar)).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

void expm_action_taylor(const Eigen::MatrixXcd& h, double t, Eigen::VectorXcd& v) {
  if (t == 0.0) return;
  const double bound = h.cwiseAbs().rowwise().sum().maxCoeff() * std::abs(t);
  const int substeps = std::max(1, static_cast<int>(std::ceil(bound / 0.5)));
  const double tau = t / substeps;
  Eigen::VectorXcd term(v.size());
  Eigen::VectorXcd next(v.size());
  for (int s = 0; s < substeps; ++s) {
    term = v;
    const double vnorm2 = v.squaredNorm();
    for (int k = 1; k <= 60; ++k) {
      next.noalias() = h * term;
      term = next * std::complex<double>(0.0, -tau / k);
      v += term;
      if (term.squaredNorm() <= 1e-34 * vnorm2) break;
    }
  }
}

namespace {

// Symmetric orthonormalization of unit Gaussians using their exact overlaps
// exp(-d^2 / 8 w^2); grid sums of these profiles agree to rounding for w >= 2 dx.
Eigen::MatrixXcd window_profile(const GaussianWindow& w, double dx, std::ptrdiff_t& half_rows) {
  const auto count = static_cast<Eigen::Index>(w.count);
  const double span = 0.5 * static_cast<double>(w.count - 1) * w.spacing + 10.0 * w.width;
  half_rows = static_cast<std::ptrdiff_t>(std::ceil(span / dx));
  const auto rows = static_cast<Eigen::Index>(2 * half_rows + 1);

  auto center = [&](Eigen::Index j) { return (static_cast<double>(j) - 0.5 * static_cast<double>(count - 1)) * w.spacing; };
  Eigen::MatrixXd gram(count, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    for (Eigen::Index k = 0; k < count; ++k) {
      const double d = center(j) - center(k);
      gram(j, k) = std::exp(-d * d / (8.0 * w.width * w.width));
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.eigenvalues().minCoeff() < 1e-10) {
    raise(ErrorKind::InvalidArgument, "kick window functions are numerically linearly dependent");
  }
  const Eigen::MatrixXd inv_sqrt =
      eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  const double norm = std::pow(2.0 * std::numbers::pi * w.width * w.width, -0.25);
  Eigen::MatrixXd g(rows, count);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double x = static_cast<double>(r - half_rows) * dx;
    for (Eigen::Index j = 0; j < count; ++j) {
      const double u = x - center(j);
      g(r, j) = norm * std::exp(-u * u / (4.0 * w.width * w.width));
    }
  }
  return (g * inv_sqrt).cast<std::complex<double>>();
}

}  // namespace

KickOperator::KickOperator(const Grid& grid, const KickConfig& cfg)
    : grid_(grid), cfg_(cfg), dimension_(cfg.kick_dimension(grid)) {
  cfg_.validate();
  if (cfg_.window) {
    if (cfg_.window->width < 2.0 * grid.spacing()) {
      raise(ErrorKind::InvalidArgument, "kick window width must be at least two grid spacings");
    }
    profile_ = window_profile(*cfg_.window, grid.spacing(), half_rows_);
    if (!cfg_.window->co_moving) {
      const auto k = static_cast<std::ptrdiff_t>(std::lround((cfg_.window->center - grid.origin()) / grid.spacing()));
      first_row_ = k - half_rows_;
      if (first_row_ < 0 || first_row_ + profile_.rows() > static_cast<std::ptrdiff_t>(grid.n_points())) {
        raise(ErrorKind::InvalidArgument, "kick window does not fit on the grid");
      }
    }
  }
}

void KickOperator::place_window(const Amplitudes& psi) {
  if (!cfg_.window || !cfg_.window->co_moving) return;
  const double dx = grid_.spacing();
  double mean = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    mean += grid_.point(static_cast<std::size_t>(k)) * std::norm(psi(k));
  }
  mean *= dx;
  const auto k = static_cast<std::ptrdiff_t>(std::lround((mean - grid_.origin()) / dx));
  first_row_ = k - half_rows_;
  if (first_row_ < 0 || first_row_ + profile_.rows() > static_cast<std::ptrdiff_t>(grid_.n_points())) {
    std::ostringstream msg;
    msg << "co-moving kick window around z=" << mean << " leaves the grid";
    raise(ErrorKind::LeakageDetected, msg.str());
  }
  wavenumber_ = momentum_mean(grid_, psi, 1.0);
  phase_.resize(profile_.rows());
  for (Eigen::Index r = 0; r < profile_.rows(); ++r) {
    phase_(r) = std::polar(1.0, wavenumber_ * grid_.point(static_cast<std::size_t>(first_row_ + r)));
  }
}

Eigen::VectorXcd KickOperator::coefficients(const Amplitudes& psi) const {
  if (!cfg_.window) {
    return psi * std::sqrt(grid_.spacing());
  }
  const auto block = psi.segment(first_row_, profile_.rows());
  if (cfg_.window->co_moving) {
    return profile_.adjoint() * (phase_.conjugate().cwiseProduct(block)) * grid_.spacing();
  }
  return profile_.adjoint() * block * grid_.spacing();
}

void KickOperator::apply(Amplitudes& psi, RandomStream& rng) {
  if (cfg_.scale * cfg_.dt == 0.0) return;
  sample_gue_into(h_, dimension_, cfg_.scale, rng);
  apply(psi, h_);
}

void KickOperator::apply(Amplitudes& psi, const Eigen::MatrixXcd& h) {
  if (static_cast<std::size_t>(psi.size()) != grid_.n_points()) {
    raise(ErrorKind::DimensionMismatch, "state size does not match the kick grid");
  }
  if (static_cast<std::size_t>(h.rows()) != dimension_) {
    raise(ErrorKind::DimensionMismatch, "Hamiltonian dimension does not match the kick dimension");
  }
  const double t = cfg_.dt / cfg_.hbar;
  auto propagate = [&](Eigen::VectorXcd& v) {
    if (cfg_.propagator == KickPropagator::taylor) {
      expm_action_taylor(h, t, v);
    } else {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
      Eigen::VectorXcd w = eig.eigenvectors().adjoint() * v;
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        w(j) *= std::polar(1.0, -eig.eigenvalues()(j) * t);
      }
      v.noalias() = eig.eigenvectors() * w;
    }
  };
  if (!cfg_.window) {
    propagate(psi);
    return;
  }
  place_window(psi);
  coeffs_ = coefficients(psi);
  kicked_ = coeffs_;
  propagate(kicked_);
  kicked_ -= coeffs_;
  auto block = psi.segment(first_row_, profile_.rows());
  if (cfg_.window->co_moving) {
    block += phase_.cwiseProduct(profile_ * kicked_);
  } else {
    block.noalias() += profile_ * kicked_;
  }
}

GridState rm_kick(const GridState& state, const KickConfig& cfg, RandomStream& rng) {
  require_normalized(state);
  KickOperator op(state.grid(), cfg);
  Amplitudes psi = state.amplitudes();
  op.apply(psi, rng);
  return GridState(state.grid(), std::move(psi));
}

namespace {

struct CalibrationSample {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd weights;  // |<v_j, c>|^2
};

double mean_step(const std::vector<CalibrationSample>& samples, double outside, double x) {
  double total = 0.0;
  for (const auto& s : samples) {
    std::complex<double> overlap = outside;
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
      overlap += s.weights(j) * std::polar(1.0, -s.eigenvalues(j) * x);
    }
    total += std::acos(std::min(1.0, std::abs(overlap)));
  }
  return total / static_cast<double>(samples.size());
}

// Bisects on x = scale * dt / hbar.
double calibrate_x(const Eigen::VectorXcd& c, double target_eps, RandomStream& rng, std::size_t n_trials) {
  if (!(target_eps > 0.0) || !(target_eps < 0.5)) {
    raise(ErrorKind::InvalidArgument, "target_eps must lie in (0, 0.5)");
  }
  if (n_trials == 0) raise(ErrorKind::InvalidArgument, "calibration needs at least one trial");
  const auto n = static_cast<std::size_t>(c.size());
  const double outside = 1.0 - c.squaredNorm();
  std::vector<CalibrationSample> samples;
  samples.reserve(n_trials);
  Eigen::MatrixXcd h;
  for (std::size_t i = 0; i < n_trials; ++i) {
    sample_gue_into(h, n, 1.0, rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    samples.push_back({eig.eigenvalues(), (eig.eigenvectors().adjoint() * c).cwiseAbs2()});
  }
  double lo = 0.0;
  double hi = 1e-3 / std::sqrt(static_cast<double>(n));
  int expansions = 0;
  while (mean_step(samples, outside, hi) < target_eps) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) {
      raise(ErrorKind::CalibrationDiverged, "could not bracket the target kick length");
    }
  }
  for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_step(samples, outside, mid) < target_eps ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double calibrate_step(std::size_t n, double target_eps, double dt, RandomStream& rng, std::size_t n_trials,
                      double hbar) {
  if (!(dt > 0.0) || !(hbar > 0.0)) raise(ErrorKind::InvalidArgument, "dt and hbar must be positive");
  if (n < 2) raise(ErrorKind::InvalidArgument, "calibration dimension must be at least 2");
  // GUE kick lengths do not depend on the state; any unit vector will do.
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  c(0) = 1.0;
  return calibrate_x(c, target_eps, rng, n_trials) * hbar / dt;
}

double calibrate_step(const GridState& state, const KickConfig& cfg, double target_eps, RandomStream& rng,
                      std::size_t n_trials) {
  require_normalized(state);
  KickConfig unit = cfg;
  unit.scale = 1.0;
  KickOperator op(state.grid(), unit);
  Amplitudes psi = state.amplitudes();
  const Eigen::VectorXcd c = op.coefficients_at(psi);
  return calibrate_x(c, target_eps, rng, n_trials) * cfg.hbar / cfg.dt;
}

}  // namespace rmq

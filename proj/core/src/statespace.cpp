#include "rmq/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rmq/error.hpp"
#include "rmq/fft.hpp"

namespace rmq {

void PhysicalConstants::validate() const {
  if (!(hbar > 0.0) || !(mass > 0.0) || !std::isfinite(hbar) || !std::isfinite(mass)) {
    raise(ErrorKind::InvalidArgument, "hbar and mass must be finite and positive");
  }
}

Grid::Grid(std::size_t n_points, double length, double origin)
    : n_points_(n_points), length_(length), origin_(origin) {
  if (n_points < 64) {
    raise(ErrorKind::InvalidArgument, "grid needs at least 64 points, got " + std::to_string(n_points));
  }
  if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(origin)) {
    raise(ErrorKind::InvalidArgument, "grid length must be finite and positive");
  }
}

Grid Grid::centered(std::size_t n_points, double half_width) {
  return Grid(n_points, 2.0 * half_width, -half_width);
}

Eigen::VectorXd Grid::points() const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(n_points_));
  for (std::size_t k = 0; k < n_points_; ++k) {
    z(static_cast<Eigen::Index>(k)) = point(k);
  }
  return z;
}

std::size_t Grid::edge_band_points() const noexcept {
  return static_cast<std::size_t>(std::ceil(kEdgeBandFraction * static_cast<double>(n_points_)));
}

GridState::GridState(Grid grid, Amplitudes amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != grid_.n_points()) {
    raise(ErrorKind::DimensionMismatch, "amplitude count " + std::to_string(amplitudes_.size()) +
                                            " does not match grid size " +
                                            std::to_string(grid_.n_points()));
  }
  if (!amplitudes_.allFinite()) {
    raise(ErrorKind::InvalidArgument, "state amplitudes must be finite");
  }
}

GridState GridState::normalized(Grid grid, Amplitudes amplitudes) {
  const double n = std::sqrt(amplitudes.squaredNorm() * grid.spacing());
  if (!(n > 0.0)) {
    raise(ErrorKind::InvalidArgument, "cannot normalize the zero state");
  }
  amplitudes /= n;
  return GridState(grid, std::move(amplitudes));
}

double GridState::norm() const { return std::sqrt(amplitudes_.squaredNorm() * grid_.spacing()); }

GridState make_packet(const PacketParams& params, const Grid& grid, const PhysicalConstants& consts) {
  consts.validate();
  const double dx = grid.spacing();
  const double sigma = params.width;
  if (!(sigma >= kMinWidthInSpacings * dx)) {
    std::ostringstream msg;
    msg << "packet width " << sigma << " is below " << kMinWidthInSpacings << " grid spacings (dx=" << dx
        << ")";
    raise(ErrorKind::WidthUnresolvable, msg.str());
  }
  const double clearance = kMinEdgeClearance * sigma;
  if (params.center - grid.origin() < clearance || grid.end() - params.center < clearance) {
    std::ostringstream msg;
    msg << "packet center " << params.center << " lies within " << kMinEdgeClearance
        << " widths of the grid edge [" << grid.origin() << ", " << grid.end() << "]";
    raise(ErrorKind::PacketTouchesBoundary, msg.str());
  }

  const double prefactor = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  const double k0 = params.momentum / consts.hbar;
  Amplitudes amps(static_cast<Eigen::Index>(grid.n_points()));
  for (std::size_t k = 0; k < grid.n_points(); ++k) {
    const double z = grid.point(k);
    const double u = z - params.center;
    const double envelope = prefactor * std::exp(-u * u / (4.0 * sigma * sigma));
    amps(static_cast<Eigen::Index>(k)) = std::polar(envelope, k0 * z);
  }
  return GridState::normalized(grid, std::move(amps));
}

void require_same_grid(const GridState& a, const GridState& b) {
  if (!(a.grid() == b.grid())) {
    raise(ErrorKind::GridMismatch, "states live on different grids");
  }
}

void require_normalized(const GridState& state) {
  const double n = state.norm();
  if (std::abs(n - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "state norm " << std::setprecision(12) << n << " deviates from 1 by more than "
        << kNormTolerance;
    raise(ErrorKind::NotNormalized, msg.str());
  }
}

std::complex<double> inner(const GridState& phi, const GridState& psi) {
  require_same_grid(phi, psi);
  return phi.amplitudes().dot(psi.amplitudes()) * phi.grid().spacing();
}

GridState normalize(const GridState& state) {
  return GridState::normalized(state.grid(), state.amplitudes());
}

PositionMoments position_moments(const GridState& state) {
  require_normalized(state);
  const Grid& grid = state.grid();
  const double dx = grid.spacing();
  const auto& a = state.amplitudes();
  double mean = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    mean += grid.point(static_cast<std::size_t>(k)) * std::norm(a(k));
  }
  mean *= dx;
  double var = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = grid.point(static_cast<std::size_t>(k)) - mean;
    var += d * d * std::norm(a(k));
  }
  var *= dx;
  return {mean, std::sqrt(var)};
}

double mu_z(const GridState& state) { return position_moments(state).mean; }

double delta_z(const GridState& state) { return position_moments(state).stddev; }

double momentum_mean(const Grid& grid, const Amplitudes& amplitudes, double hbar) {
  const auto fft = FourierTransform::of_size(grid.n_points());
  Eigen::VectorXcd spectrum;
  fft->forward(amplitudes, spectrum);
  const Eigen::VectorXd k = angular_wavenumbers(grid.n_points(), grid.spacing());
  // Parseval: sum |a_k|^2 dx = sum |A_j|^2 dx / n.
  double num = 0.0;
  double den = 0.0;
  const auto n = static_cast<Eigen::Index>(grid.n_points());
  for (Eigen::Index j = 0; j < n; ++j) {
    const double w = std::norm(spectrum(j));
    den += w;
    // The Nyquist mode is its own mirror image and carries no net momentum.
    if (n % 2 == 0 && j == n / 2) continue;
    num += k(j) * w;
  }
  return den > 0.0 ? hbar * num / den : 0.0;
}

double momentum_mean(const GridState& state, const PhysicalConstants& consts) {
  consts.validate();
  require_normalized(state);
  return momentum_mean(state.grid(), state.amplitudes(), consts.hbar);
}

double fs_distance(const GridState& phi, const GridState& psi) {
  require_same_grid(phi, psi);
  require_normalized(phi);
  require_normalized(psi);
  const double dx = phi.grid().spacing();
  const std::complex<double> overlap = phi.amplitudes().dot(psi.amplitudes()) * dx;
  // sin(rho) is the norm of the component of psi orthogonal to phi; the
  // atan2 form stays accurate for nearly parallel states, unlike arccos.
  const double sine = std::sqrt((psi.amplitudes() - overlap * phi.amplitudes()).squaredNorm() * dx);
  const double rho = std::atan2(sine, std::abs(overlap));
  return std::clamp(rho, 0.0, std::numbers::pi / 2.0);
}

double edge_leakage(const GridState& state) {
  const auto& a = state.amplitudes();
  const auto band = static_cast<Eigen::Index>(state.grid().edge_band_points());
  return (a.head(band).squaredNorm() + a.tail(band).squaredNorm()) * state.grid().spacing();
}

void require_leakage_free(const GridState& state, std::string_view context) {
  const double leak = edge_leakage(state);
  if (leak > kLeakageTolerance) {
    std::ostringstream msg;
    msg << context << ": edge-band probability " << leak << " exceeds " << kLeakageTolerance;
    raise(ErrorKind::LeakageDetected, msg.str());
  }
}

void write_state_csv(std::ostream& out, const GridState& state) {
  const Grid& g = state.grid();
  out << std::setprecision(17);
  out << "# grid n_points=" << g.n_points() << " length=" << g.length() << " origin=" << g.origin() << '\n';
  out << "index,z,re,im\n";
  const auto& a = state.amplitudes();
  for (std::size_t k = 0; k < g.n_points(); ++k) {
    const auto v = a(static_cast<Eigen::Index>(k));
    out << k << ',' << g.point(k) << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

GridState read_state_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# grid", 0) != 0) {
    raise(ErrorKind::InvalidArgument, "state CSV must start with a '# grid' metadata line");
  }
  std::size_t n = 0;
  double length = 0.0;
  double origin = 0.0;
  bool have_n = false, have_len = false, have_origin = false;
  std::istringstream meta(line.substr(6));
  std::string token;
  while (meta >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "n_points") {
      n = std::stoull(value);
      have_n = true;
    } else if (key == "length") {
      length = std::stod(value);
      have_len = true;
    } else if (key == "origin") {
      origin = std::stod(value);
      have_origin = true;
    }
  }
  if (!(have_n && have_len && have_origin)) {
    raise(ErrorKind::InvalidArgument, "grid metadata needs n_points, length and origin");
  }
  Grid grid(n, length, origin);
  if (!std::getline(in, line) || line != "index,z,re,im") {
    raise(ErrorKind::InvalidArgument, "expected column header 'index,z,re,im'");
  }
  Amplitudes amps = Amplitudes::Zero(static_cast<Eigen::Index>(n));
  std::vector<bool> seen(n, false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(row, c, ',')) {
        raise(ErrorKind::InvalidArgument, "malformed state row: " + line);
      }
    }
    const auto k = std::stoull(cell[0]);
    if (k >= n) {
      raise(ErrorKind::InvalidArgument, "row index out of range: " + cell[0]);
    }
    amps(static_cast<Eigen::Index>(k)) = {std::stod(cell[2]), std::stod(cell[3])};
    seen[k] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!seen[k]) {
      raise(ErrorKind::InvalidArgument, "missing row for index " + std::to_string(k));
    }
  }
  return GridState(grid, std::move(amps));
}

}  // namespace rmq

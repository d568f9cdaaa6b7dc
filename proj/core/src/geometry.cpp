#include "rmq/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "rmq/error.hpp"
#include "rmq/fft.hpp"

namespace rmq {
namespace {

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// Evaluates the trigonometric interpolant of the grid samples at arbitrary
// positions. Exact for band-limited states, so finite differences of the
// resampled orbit are free of interpolation noise.
class BandLimitedInterpolant {
 public:
  explicit BandLimitedInterpolant(const GridState& state)
      : grid_(state.grid()), n_(state.size()) {
    FourierTransform::of_size(n_)->forward(state.amplitudes(), coeffs_);
    coeffs_ /= static_cast<double>(n_);
  }

  std::complex<double> operator()(double x) const {
    const double dk = 2.0 * std::numbers::pi / grid_.length();
    const double u = x - grid_.origin();
    const std::complex<double> step = std::polar(1.0, dk * u);
    const auto n = static_cast<std::ptrdiff_t>(n_);
    const std::ptrdiff_t top = (n - 1) / 2;
    std::complex<double> sum = coeffs_(0);
    std::complex<double> up = 1.0;
    std::complex<double> down = 1.0;
    for (std::ptrdiff_t m = 1; m <= top; ++m) {
      up *= step;
      down *= std::conj(step);
      sum += coeffs_(m) * up + coeffs_(n - m) * down;
    }
    if (n % 2 == 0) {
      sum += coeffs_(n / 2) * std::cos(dk * static_cast<double>(n / 2) * u);
    }
    return sum;
  }

 private:
  Grid grid_;
  std::size_t n_;
  Eigen::VectorXcd coeffs_;
};

Amplitudes orbit_point(const BandLimitedInterpolant& f, const Grid& grid, double mu, double tau, double lambda) {
  Amplitudes out(static_cast<Eigen::Index>(grid.n_points()));
  const double root = std::sqrt(lambda);
  for (std::size_t k = 0; k < grid.n_points(); ++k) {
    const double x = lambda * (grid.point(k) - mu - tau) + mu;
    out(static_cast<Eigen::Index>(k)) = root * f(x);
  }
  return out;
}

}  // namespace

bool class_membership(const GridState& state, const ClassSpec& spec, std::optional<double> mu_tol) {
  const auto m = position_moments(state);
  return spec.admits(m.mean, m.stddev, mu_tol);
}

double class_distance(const ClassSpec& a, const ClassSpec& b) {
  if (!same_value(a.resolution, b.resolution)) {
    std::ostringstream msg;
    msg << "class resolutions differ: " << a.resolution << " vs " << b.resolution;
    raise(ErrorKind::MixedResolutions, msg.str());
  }
  const double d = a.center - b.center;
  const double sigma = a.resolution;
  return std::acos(std::exp(-d * d / (8.0 * sigma * sigma)));
}

double surrogate_class_distance(const GridState& state, const ClassSpec& spec, std::optional<double> mu_tol) {
  const double tol = mu_tol.value_or(spec.default_mu_tol());
  return std::max(0.0, std::abs(mu_z(state) - spec.center) - tol) / spec.resolution;
}

double phase_space_overlap(const PacketParams& p1, const PacketParams& p2, const PhysicalConstants& consts) {
  consts.validate();
  if (!same_value(p1.width, p2.width)) {
    std::ostringstream msg;
    msg << "packet widths differ: " << p1.width << " vs " << p2.width;
    raise(ErrorKind::MixedWidths, msg.str());
  }
  const double sigma = p1.width;
  const double da = p1.center - p2.center;
  const double dp = p1.momentum - p2.momentum;
  return std::exp(-da * da / (4.0 * sigma * sigma) - dp * dp * sigma * sigma / (consts.hbar * consts.hbar));
}

GridState scale_translate(const GridState& state, double tau, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(tau)) {
    raise(ErrorKind::InvalidArgument, "lambda must be positive and tau finite");
  }
  const Grid& grid = state.grid();
  const auto moments = position_moments(state);
  const double new_spread = moments.stddev / lambda;
  if (new_spread < kMinWidthInSpacings * grid.spacing()) {
    std::ostringstream msg;
    msg << "scaled spread " << new_spread << " is below " << kMinWidthInSpacings << " grid spacings";
    raise(ErrorKind::ScaledBelowResolution, msg.str());
  }

  const std::size_t n = grid.n_points();
  std::vector<double> re(n), im(n);
  for (std::size_t k = 0; k < n; ++k) {
    re[k] = state.amplitudes()(static_cast<Eigen::Index>(k)).real();
    im[k] = state.amplitudes()(static_cast<Eigen::Index>(k)).imag();
  }
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  const Spline spline_re(re.data(), n, grid.origin(), grid.spacing());
  const Spline spline_im(im.data(), n, grid.origin(), grid.spacing());
  const double first = grid.point(0);
  const double last = grid.point(n - 1);

  Amplitudes out(static_cast<Eigen::Index>(n));
  const double root = std::sqrt(lambda);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = lambda * (grid.point(k) - moments.mean - tau) + moments.mean;
    if (x < first || x > last) {
      out(static_cast<Eigen::Index>(k)) = 0.0;
    } else {
      out(static_cast<Eigen::Index>(k)) = root * std::complex<double>(spline_re(x), spline_im(x));
    }
  }
  GridState result = GridState::normalized(grid, std::move(out));
  if (edge_leakage(result) > kLeakageTolerance) {
    std::ostringstream msg;
    msg << "translated state (tau=" << tau << ", lambda=" << lambda << ") leaks into the grid edge band";
    raise(ErrorKind::TranslatedOffGrid, msg.str());
  }
  return result;
}

FoliationPoint foliation_coords(const GridState& state) {
  const auto m = position_moments(state);
  if (m.stddev < 2.0 * state.grid().spacing()) {
    std::ostringstream msg;
    msg << "spread " << m.stddev << " is below two grid spacings";
    raise(ErrorKind::DegenerateSpread, msg.str());
  }
  return {m.mean, std::log(m.stddev)};
}

double tangent_orthogonality(const GridState& state, double h) {
  const auto m = position_moments(state);
  const Grid& grid = state.grid();
  if (m.stddev < 2.0 * grid.spacing()) {
    raise(ErrorKind::DegenerateSpread, "state is too narrow to define scaling tangents");
  }
  const BandLimitedInterpolant f(state);
  const Amplitudes t_tau =
      (orbit_point(f, grid, m.mean, h, 1.0) - orbit_point(f, grid, m.mean, -h, 1.0)) / (2.0 * h);
  const Amplitudes t_s =
      (orbit_point(f, grid, m.mean, 0.0, std::exp(h)) - orbit_point(f, grid, m.mean, 0.0, std::exp(-h))) /
      (2.0 * h);

  // Horizontal lift: drop the components along phi and i*phi.
  const double dx = grid.spacing();
  const auto& phi = state.amplitudes();
  auto horizontal = [&](const Amplitudes& t) -> Amplitudes { return t - phi.dot(t) * dx * phi; };
  const Amplitudes a = horizontal(t_tau);
  const Amplitudes b = horizontal(t_s);
  const double denom = std::sqrt(a.squaredNorm() * b.squaredNorm()) * dx;
  if (!(denom > 0.0)) {
    raise(ErrorKind::DegenerateSpread, "tangent vectors vanish");
  }
  return std::abs(a.dot(b) * dx) / denom;
}

IsometryReport isometry_check(const Grid& grid, double sigma, std::size_t n_samples, double max_sep) {
  if (n_samples == 0 || !(max_sep > 0.0)) {
    raise(ErrorKind::InvalidArgument, "isometry_check needs n_samples > 0 and max_sep > 0");
  }
  const double mid = grid.origin() + 0.5 * grid.length();
  IsometryReport report;
  report.samples = n_samples;
  report.rows.reserve(n_samples);
  for (std::size_t i = 1; i <= n_samples; ++i) {
    const double sep = max_sep * static_cast<double>(i) / static_cast<double>(n_samples);
    const auto a = make_packet({mid - 0.5 * sep, sigma, 0.0}, grid);
    const auto b = make_packet({mid + 0.5 * sep, sigma, 0.0}, grid);
    const double c = std::cos(fs_distance(a, b));
    const double numeric = c * c;
    const double closed = std::exp(-sep * sep / (4.0 * sigma * sigma));
    const double err = std::abs(numeric - closed);
    report.rows.push_back({sep, numeric, closed, err});
    report.max_abs_error = std::max(report.max_abs_error, err);
  }
  const double da = sigma / 100.0;
  const auto a = make_packet({mid - 0.5 * da, sigma, 0.0}, grid);
  const auto b = make_packet({mid + 0.5 * da, sigma, 0.0}, grid);
  report.local_scale_ratio = fs_distance(a, b) / (da / (2.0 * sigma));
  return report;
}

}  // namespace rmq

#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into rmq numerics beyond plain data types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline cd simpson_complex(const std::function<cd(double)>& f, double a, double b, int panels = 20000) {
  const double re = simpson([&](double x) { return f(x).real(); }, a, b, panels);
  const double im = simpson([&](double x) { return f(x).imag(); }, a, b, panels);
  return {re, im};
}

/// Continuous normalized Gaussian packet.
inline cd packet(double z, double center, double sigma, double momentum = 0.0, double hbar = 1.0) {
  const double u = z - center;
  const double amp = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) * std::exp(-u * u / (4.0 * sigma * sigma));
  return std::polar(amp, momentum * z / hbar);
}

/// O(n^2) discrete Fourier transform, X_j = sum_k x_k exp(-2 pi i j k / n).
inline Eigen::VectorXcd naive_dft(const Eigen::VectorXcd& x, int sign = -1) {
  const auto n = x.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    cd s = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      s += x(k) * std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(j * k % n) / static_cast<double>(n));
    }
    out(j) = s;
  }
  return out;
}

/// <psi| -i hbar d/dz |psi> by naive-DFT differentiation on a periodic grid.
inline double spectral_momentum(const Eigen::VectorXcd& psi, double dx, double hbar = 1.0) {
  const auto n = psi.size();
  Eigen::VectorXcd f = naive_dft(psi);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index m = j <= n / 2 ? j : j - n;
    const double k = 2.0 * std::numbers::pi * static_cast<double>(m) / (static_cast<double>(n) * dx);
    f(j) *= (n % 2 == 0 && j == n / 2) ? cd(0.0) : cd(0.0, k);
  }
  Eigen::VectorXcd d = naive_dft(f, +1) / static_cast<double>(n);
  cd num = psi.dot(d) * dx;
  return (cd(0.0, -hbar) * num).real() / (psi.squaredNorm() * dx);
}

/// Survival counts of all 2^n sign paths: fraction with every partial sum > 0.
inline double enumerate_positive_paths(int n) {
  std::uint64_t positive = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    int s = 0;
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      s += (mask >> k) & 1ULL ? 1 : -1;
      ok = s > 0;
    }
    positive += ok;
  }
  return static_cast<double>(positive) / static_cast<double>(total);
}

/// Real symmetric Gaussian matrix (orthogonal ensemble), test use only.
inline Eigen::MatrixXcd sample_goe(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd h(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = std::sqrt(2.0) * scale * g(rng);
    for (int k = j + 1; k < n; ++k) {
      const double x = scale * g(rng);
      h(j, k) = x;
      h(k, j) = x;
    }
  }
  return h;
}

/// Semicircle CDF by direct integration of the density.
inline double semicircle_cdf_quadrature(double x, double radius) {
  if (x <= -radius) return 0.0;
  if (x >= radius) return 1.0;
  const double c = 2.0 / (std::numbers::pi * radius * radius);
  // substitute y = -R cos t to remove the square-root endpoint singularity
  const double t_max = std::acos(-x / radius);
  return simpson([&](double t) { return c * radius * radius * std::sin(t) * std::sin(t); }, 0.0, t_max, 2000);
}

/// exp(-i H t) v by a fixed 40-term Taylor series over 64 substeps.
inline Eigen::VectorXcd expm_action_reference(const Eigen::MatrixXcd& h, double t, const Eigen::VectorXcd& v) {
  const int substeps = 64;
  const double tau = t / substeps;
  Eigen::VectorXcd out = v;
  for (int s = 0; s < substeps; ++s) {
    Eigen::VectorXcd term = out;
    Eigen::VectorXcd acc = out;
    for (int k = 1; k < 40; ++k) {
      term = (h * term) * cd(0.0, -tau / k);
      acc += term;
    }
    out = acc;
  }
  return out;
}

}  // namespace oracle

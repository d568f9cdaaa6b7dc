#include "rmq/fft.hpp"

#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "rmq/error.hpp"

namespace rmq {
namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FourierTransform::FourierTransform(std::size_t n) : n_(n) {
  if (n == 0) {
    raise(ErrorKind::InvalidArgument, "FFT length must be positive");
  }
  Eigen::VectorXcd a(n);
  Eigen::VectorXcd b(n);
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(b.data()),
                                   FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(a.data()), as_fftw(b.data()),
                                   FFTW_BACKWARD, flags);
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FourierTransform::forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  out.resize(static_cast<Eigen::Index>(n_));
  Eigen::VectorXcd scratch = in;  // FFTW may not read from const storage
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(scratch.data()), as_fftw(out.data()));
}

void FourierTransform::inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  out.resize(static_cast<Eigen::Index>(n_));
  Eigen::VectorXcd scratch = in;
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(scratch.data()), as_fftw(out.data()));
  out /= static_cast<double>(n_);
}

std::shared_ptr<const FourierTransform> FourierTransform::of_size(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::shared_ptr<const FourierTransform>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_shared<const FourierTransform>(n);
  }
  return slot;
}

Eigen::VectorXd angular_wavenumbers(std::size_t n, double dx) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(n));
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dx);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    auto m = static_cast<std::ptrdiff_t>(j);
    if (m >= (static_cast<std::ptrdiff_t>(n) + 1) / 2) {
      m -= static_cast<std::ptrdiff_t>(n);
    }
    // The Nyquist bin of an even-length transform is treated as +n/2.
    if (n % 2 == 0 && m == -half) {
      m = half;
    }
    k(static_cast<Eigen::Index>(j)) = dk * static_cast<double>(m);
  }
  return k;
}

}  // namespace rmq

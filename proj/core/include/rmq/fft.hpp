#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include <Eigen/Dense>

namespace rmq {

/// Unnormalized 1D complex DFT of a fixed length backed by FFTW.
/// Plans are created once per instance; `forward`/`inverse` are safe to call
/// concurrently on distinct buffers.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n);
  ~FourierTransform();

  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  void forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  /// Inverse transform including the 1/n factor.
  void inverse(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

  /// Shared instance per length (plans are cached process-wide).
  static std::shared_ptr<const FourierTransform> of_size(std::size_t n);

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Angular wavenumbers in FFT order for n samples with spacing dx.
Eigen::VectorXd angular_wavenumbers(std::size_t n, double dx);

}  // namespace rmq

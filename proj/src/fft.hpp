#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>

namespace cloudindex::detail {

/// Unnormalized 2D complex DFT over a row-major ny x nx buffer (FFTW backed).
/// forward: X_k = Σ x_n e^{-2πi k·n/N}; inverse carries no 1/N factor either.
class Fft2D {
 public:
  Fft2D(std::size_t nx, std::size_t ny);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  std::span<std::complex<double>> data() noexcept { return {buf_, nx_ * ny_}; }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }

  void forward();
  void inverse();

 private:
  std::size_t nx_, ny_;
  std::complex<double>* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

/// Signed frequency index of DFT bin k for length n (k ≤ n/2 positive, rest negative;
/// for even n the Nyquist bin is -n/2).
inline long signed_index(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace cloudindex::detail

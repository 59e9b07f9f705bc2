#include "fft.hpp"

#include <mutex>
#include <new>

namespace cloudindex::detail {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2D::Fft2D(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
  std::lock_guard lock(planner_mutex());
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * nx * ny));
  if (!buf_) throw std::bad_alloc();
  auto* p = reinterpret_cast<fftw_complex*>(buf_);
  fwd_ = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
  std::lock_guard lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (inv_) fftw_destroy_plan(inv_);
  fftw_free(buf_);
}

void Fft2D::forward() { fftw_execute(fwd_); }
void Fft2D::inverse() { fftw_execute(inv_); }

}  // namespace cloudindex::detail

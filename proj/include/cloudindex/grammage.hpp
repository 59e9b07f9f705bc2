#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cloudindex/grid.hpp"

namespace cloudindex {

/// Gray-tone transmission image with its physical pixel size.
struct GrayImage {
  Grid2D<double> pixels;
  double pixel_size_um = 0.0;
  /// Largest representable value of the source encoding (255, 65535), or 0
  /// when the image did not come from an integer encoding.
  double max_value = 0.0;

  std::size_t width() const noexcept { return pixels.width(); }
  std::size_t height() const noexcept { return pixels.height(); }
};

/// Pixels at the encoding's maximum value; a nonzero count hints at overexposure.
std::size_t count_saturated(const GrayImage& img);

/// Normalized local grammage: zero mean, unit (population) standard deviation.
class GrammageField {
 public:
  static constexpr double kMeanTolerance = 1e-9;
  static constexpr double kStdTolerance = 1e-9;

  /// Shift and scale `values` in place to mean 0 / std 1; false on zero variance.
  static bool standardize(std::span<double> values);

  /// Wraps values that must already satisfy the invariants (InvalidField otherwise).
  static GrammageField from_normalized(Grid2D<double> values, double pixel_size_um);

  /// Standardizes raw values first (ZeroVariance when constant).
  static GrammageField from_raw(Grid2D<double> values, double pixel_size_um);

  std::size_t width() const noexcept { return values_.width(); }
  std::size_t height() const noexcept { return values_.height(); }
  double pixel_size_um() const noexcept { return pixel_size_um_; }
  const Grid2D<double>& grid() const noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_.values(); }
  double operator()(std::size_t x, std::size_t y) const { return values_(x, y); }

 private:
  GrammageField(Grid2D<double> values, double pixel_size_um)
      : values_(std::move(values)), pixel_size_um_(pixel_size_um) {}

  Grid2D<double> values_;
  double pixel_size_um_;
};

/// f(x) = (μ − ln g(x)) / σ with μ, σ the mean and population standard
/// deviation of ln g over the image.
GrammageField normalize_grammage(const GrayImage& img);

/// Per-pixel mean of several fields of one shape, re-standardized.
GrammageField pixelwise_mean(std::span<const GrammageField> fields);

/// Population mean and standard deviation.
struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};
Moments moments(std::span<const double> values);

}  // namespace cloudindex

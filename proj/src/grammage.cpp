#include "cloudindex/grammage.hpp"

#include <cmath>
#include <string>

#include "cloudindex/error.hpp"

namespace cloudindex {

namespace {

void check_shape(std::size_t w, std::size_t h, double pixel_size_um) {
  if (w < 2 || h < 2) {
    throw Error(ErrorKind::InvalidField,
                "grid must be at least 2x2, got " + std::to_string(w) + "x" + std::to_string(h));
  }
  if (!(pixel_size_um > 0.0) || !std::isfinite(pixel_size_um)) {
    throw Error(ErrorKind::InvalidField, "pixel size must be positive");
  }
}

}  // namespace

Moments moments(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  double corr = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
    corr += d;
  }
  // corrected two-pass variance
  const double var = (ss - corr * corr / n) / n;
  return {mean + corr / n, std::sqrt(std::max(var, 0.0))};
}

std::size_t count_saturated(const GrayImage& img) {
  if (img.max_value <= 0.0) return 0;
  std::size_t n = 0;
  for (double v : img.pixels.values()) n += (v >= img.max_value);
  return n;
}

bool GrammageField::standardize(std::span<double> values) {
  const Moments m = moments(values);
  if (!(m.stddev > 0.0) || !std::isfinite(m.stddev)) return false;
  for (double& v : values) v = (v - m.mean) / m.stddev;
  // one refinement pass removes the residual round-off of the first shift
  const Moments r = moments(values);
  for (double& v : values) v = (v - r.mean) / r.stddev;
  return true;
}

GrammageField GrammageField::from_normalized(Grid2D<double> values, double pixel_size_um) {
  check_shape(values.width(), values.height(), pixel_size_um);
  for (double v : values.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidField, "non-finite value");
  }
  const Moments m = moments(values.values());
  if (std::abs(m.mean) > kMeanTolerance || std::abs(m.stddev - 1.0) > kStdTolerance) {
    throw Error(ErrorKind::InvalidField, "field is not normalized (mean " + std::to_string(m.mean) +
                                             ", std " + std::to_string(m.stddev) + ")");
  }
  return GrammageField(std::move(values), pixel_size_um);
}

GrammageField GrammageField::from_raw(Grid2D<double> values, double pixel_size_um) {
  check_shape(values.width(), values.height(), pixel_size_um);
  for (double v : values.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidField, "non-finite value");
  }
  if (!standardize(values.values())) throw Error(ErrorKind::ZeroVariance, "field has zero variance");
  return GrammageField(std::move(values), pixel_size_um);
}

GrammageField normalize_grammage(const GrayImage& img) {
  check_shape(img.width(), img.height(), img.pixel_size_um);
  Grid2D<double> logs(img.width(), img.height());
  auto src = img.pixels.values();
  auto dst = logs.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!(src[i] > 0.0) || !std::isfinite(src[i])) {
      const std::size_t x = i % img.width();
      const std::size_t y = i / img.width();
      throw Error(ErrorKind::NonPositivePixel,
                  "pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") has value " +
                      std::to_string(src[i]) + "; transmission images need g(x) > 0");
    }
    // brighter means less material, so the sign flips
    dst[i] = -std::log(src[i]);
  }
  if (!GrammageField::standardize(dst)) throw Error(ErrorKind::ZeroVariance, "image is constant");
  return GrammageField::from_normalized(std::move(logs), img.pixel_size_um);
}

GrammageField pixelwise_mean(std::span<const GrammageField> fields) {
  if (fields.empty()) throw Error(ErrorKind::EmptyInput, "no fields to average");
  const GrammageField& first = fields.front();
  for (const auto& f : fields) {
    if (f.width() != first.width() || f.height() != first.height() ||
        f.pixel_size_um() != first.pixel_size_um()) {
      throw Error(ErrorKind::DimensionMismatch,
                  std::to_string(first.width()) + "x" + std::to_string(first.height()) + " @ " +
                      std::to_string(first.pixel_size_um()) + " um vs " + std::to_string(f.width()) +
                      "x" + std::to_string(f.height()) + " @ " + std::to_string(f.pixel_size_um()) + " um");
    }
  }
  if (fields.size() == 1) return first;

  Grid2D<double> sum(first.width(), first.height());
  auto acc = sum.values();
  for (const auto& f : fields) {
    auto v = f.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(fields.size());
  for (double& v : acc) v *= inv;
  if (!GrammageField::standardize(acc)) {
    throw Error(ErrorKind::ZeroVariance, "pixelwise mean has zero variance");
  }
  return GrammageField::from_normalized(std::move(sum), first.pixel_size_um());
}

}  // namespace cloudindex

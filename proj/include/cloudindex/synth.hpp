#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cloudindex/grammage.hpp"
#include "cloudindex/grid.hpp"
#include "cloudindex/units.hpp"

namespace cloudindex {

/// Straight fiber core from `start` in direction (cos angle, sin angle). µm.
struct Segment {
  double x = 0.0;
  double y = 0.0;
  double angle = 0.0;  ///< [0, π)
  double length = 0.0;
};

struct SynthConfig {
  double width_um = 0.0;
  double height_um = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double n_a_per_mm2 = 0.0;  ///< segments per mm²
  InverseLength lambda;      ///< inverse mean segment length
  double radius_um = 0.0;
  std::uint64_t seed = 0;

  double pixel_size_um() const noexcept { return width_um / static_cast<double>(nx); }
  /// Throws InvalidConfig unless all fields are positive, pixels are square
  /// and the pixel size does not exceed R.
  void validate() const;
};

/// Square field of n×n pixels.
SynthConfig square_config(std::size_t n, double pixel_size_um, double n_a_per_mm2, InverseLength lambda,
                          double radius_um, std::uint64_t seed);

/// Name of the random stream construction, for reports.
inline constexpr std::string_view kSynthGenerator = "mt19937_64 per 250um cell, seeded by splitmix64(seed, cell)";

/// Sampling rectangle in µm: the window grown by the 99.9th length percentile
/// plus R on every side, then rounded out to whole sampling cells.
struct Rect {
  double x0, y0, x1, y1;
  double area_mm2() const noexcept { return (x1 - x0) * (y1 - y0) * 1e-6; }
};
Rect sampling_window(const SynthConfig& cfg);

/// Poisson segment process on the sampling window. Each cell draws from its own
/// stream, so configurations that differ only in λ share positions, angles and
/// the unit-mean exponential variates behind the lengths.
std::vector<Segment> sample_fiber_system(const SynthConfig& cfg);

/// Mass per unit area: Bresenham lines of unit mass per unit length convolved
/// with the unit-sum discrete disk of radius R. KernelTooSmall when the disk
/// covers fewer than 5 pixels.
Grid2D<double> rasterize_fiber_field(const std::vector<Segment>& segments, const SynthConfig& cfg);

/// Sampled, rasterized and standardized field. DegenerateField when constant.
GrammageField synth_nonwoven(const SynthConfig& cfg);

}  // namespace cloudindex

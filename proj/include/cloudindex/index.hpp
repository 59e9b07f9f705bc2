#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cloudindex/spectral.hpp"
#include "cloudindex/units.hpp"

namespace cloudindex {

/// Closed frequency band [rho0, rho1], 0 < rho0 ≤ rho1.
struct FrequencyBand {
  InverseLength rho0;
  InverseLength rho1;

  /// Throws InvalidParams unless 0 < rho0 ≤ rho1 (rho1 may be +inf).
  void validate() const;
};

/// Band used when none is configured.
inline constexpr FrequencyBand kDefaultBand{InverseLength::per_um(0.02), InverseLength::per_um(0.10)};

/// Band power ∫ ρ·k̂₁(ρ) dρ over the band as a fraction, by the trapezoid rule
/// on the bin centers with linearly interpolated end points.
///
/// Requires the band inside [first center, last center] (BandOutOfRange) and at
/// least two bins whose extent meets the band (InsufficientBins). Results
/// within 1e-3 outside [0, 1] are clamped; anything further is NumericalBounds.
double band_power(const RadialSpectrum& rs, const FrequencyBand& band);

/// band_power in percent.
double cloudiness_index(const RadialSpectrum& rs, const FrequencyBand& band);

struct SectorCloudiness {
  Sector sector;
  /// Share of the total band power carried by the sector; shares of a partition add up to the CLI.
  double cli_percent = 0.0;
  /// CLI of the sector's own rotation mean (not weighted by its angular share).
  double cli_mean_percent = 0.0;
};

/// Directional cloudiness for non-overlapping sectors (InvalidSectors otherwise).
std::vector<SectorCloudiness> directional_cloudiness(const PowerSpectrum2D& ps, const std::vector<Sector>& sectors,
                                                     const FrequencyBand& band);

struct BesselModelParams;

/// RI = 2π·k̂₁(0) = 4πν/λ², in mm².
double range_of_interaction(const BesselModelParams& p);

struct MspValue {
  int j = 0;
  double value_permille = 0.0;
};

struct InputProvenance {
  std::vector<std::string> files;
  double pixel_size_um = 0.0;
  std::size_t image_count = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t saturated_pixels = 0;
};

}  // namespace cloudindex

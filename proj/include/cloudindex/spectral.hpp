#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cloudindex/grammage.hpp"
#include "cloudindex/grid.hpp"

namespace cloudindex {

/// Estimated power spectrum k̂(ξ) on the circular-frequency lattice, in µm².
///
/// Layout is centered: grid element (i, j) holds the lattice point
/// ξ = ((i - width/2)·Δξ₁, (j - height/2)·Δξ₂), so zero frequency sits at
/// (width/2, height/2) (integer division). For even sizes the first row and
/// column carry the Nyquist frequency.
struct PowerSpectrum2D {
  Grid2D<double> values;
  double freq_step_x = 0.0;  ///< Δξ₁ in µm⁻¹
  double freq_step_y = 0.0;  ///< Δξ₂ in µm⁻¹
  bool dc_zeroed = true;

  std::size_t width() const noexcept { return values.width(); }
  std::size_t height() const noexcept { return values.height(); }
  long index_x(std::size_t i) const noexcept { return static_cast<long>(i) - static_cast<long>(width() / 2); }
  long index_y(std::size_t j) const noexcept { return static_cast<long>(j) - static_cast<long>(height() / 2); }
  double xi_x(std::size_t i) const noexcept { return static_cast<double>(index_x(i)) * freq_step_x; }
  double xi_y(std::size_t j) const noexcept { return static_cast<double>(index_y(j)) * freq_step_y; }

  /// Bin width used by the radial reductions: the smaller lattice step.
  double radial_step() const noexcept { return std::min(freq_step_x, freq_step_y); }
};

/// Angular sector [phi_lo, phi_hi) in radians, −π ≤ lo < hi ≤ π; hi = π is closed.
struct Sector {
  double phi_lo = 0.0;
  double phi_hi = 0.0;
};

/// Rotation (or sector) average k̂₁(ρ) sampled at bin centers.
struct RadialSpectrum {
  std::vector<double> bin_centers;  ///< ρ in µm⁻¹, strictly increasing
  std::vector<double> values;       ///< k̂₁ in µm²
  std::vector<std::size_t> counts;  ///< lattice points per bin
  double bin_width = 0.0;           ///< µm⁻¹; 0 when unknown (e.g. read from CSV)
  std::optional<Sector> sector;

  std::size_t size() const noexcept { return bin_centers.size(); }
};

/// k̂(ξ_k) = Δ²/(2π·Nx·Ny)·|DFT(f)|²; no taper, no window correction beyond c_W ≈ A.
PowerSpectrum2D power_spectrum_2d(const GrammageField& f);

/// Same estimator on arbitrary values (no invariant check). `zero_dc` controls
/// whether the zero-frequency bin is cleared.
PowerSpectrum2D power_spectrum_2d_raw(const Grid2D<double>& values, double pixel_size_um, bool zero_dc = true);

/// (1/2π)·Σ k̂(ξ_k)·Δξ₁Δξ₂, which equals the field variance (1 for a normalized field).
double total_power(const PowerSpectrum2D& ps);

/// Rotation average over annuli [iΔρ, (i+1)Δρ) reported at (i+½)Δρ; DC excluded, empty bins omitted.
RadialSpectrum radial_average(const PowerSpectrum2D& ps);

/// Rotation average restricted to directions in the sector. Because
/// k̂(ξ) = k̂(−ξ), each lattice point counts half for its own angle and half
/// for the opposite direction, so a sector covers both half-planes.
RadialSpectrum sector_average(const PowerSpectrum2D& ps, Sector sector);

/// Like radial_average, but each bin holds the sector's share of the annulus
/// sum divided by the full annulus count. Spectra of an angular partition add
/// up to radial_average bin by bin.
RadialSpectrum sector_weighted_spectrum(const PowerSpectrum2D& ps, Sector sector);

/// Half-open membership test used by the sector reductions.
bool in_sector(double phi, Sector sector) noexcept;

void write_radial_csv(std::ostream& out, const RadialSpectrum& rs);
void write_radial_csv(const std::filesystem::path& path, const RadialSpectrum& rs);
RadialSpectrum read_radial_csv(const std::filesystem::path& path);

/// float32 raster of the centered spectrum plus a sidecar with dimensions and freq steps.
void write_spectrum_raster(const std::filesystem::path& path, const PowerSpectrum2D& ps);

}  // namespace cloudindex

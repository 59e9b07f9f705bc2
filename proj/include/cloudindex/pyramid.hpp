#pragma once

#include <span>
#include <vector>

#include "cloudindex/grammage.hpp"
#include "cloudindex/index.hpp"
#include "cloudindex/spectral.hpp"
#include "cloudindex/units.hpp"

namespace cloudindex {

/// Level j of the difference-of-Gaussians pyramid, σ_j = 2^{(j−1)/2} µm.
struct DogLevel {
  int j = 0;
  double sigma_prev_um = 0.0;  ///< σ_{j−1} = σ_j/√2
  double sigma_um = 0.0;       ///< σ_j

  static DogLevel level(int j);
};

/// ĥ_j(ρ) = (1/2π)(exp(−σ_{j−1}²ρ²) − exp(−σ_j²ρ²)).
double dog_transfer(InverseLength rho, const DogLevel& level);

/// Peak of the transfer function, √(2 ln 2)/σ_j.
InverseLength rho_max(const DogLevel& level);

/// ‖ĥ_j‖ = 1/√(24π σ_j²), in µm⁻¹.
double dog_norm_per_um(const DogLevel& level);

/// Normalized inner product 2π∫ρ ĥ_a ĥ_b dρ / (‖ĥ_a‖‖ĥ_b‖).
double dog_overlap(const DogLevel& a, const DogLevel& b);

/// Mean square of the DoG-filtered field (a fraction; ×1000 for ‰). The filter
/// is applied in the frequency domain by sampling ĥ_j on the DFT lattice.
/// SigmaUnresolvable when σ_j is below 2 pixels.
double msp_spatial(const GrammageField& f, const DogLevel& level);

/// msp_spatial for several levels sharing one forward transform.
std::vector<double> msp_spatial_levels(const GrammageField& f, std::span<const DogLevel> levels);

/// 2π∫ρ k̂₁(ρ) ĥ_j²(ρ) dρ by the trapezoid rule over the bins, anchored at ρ = 0.
/// SupportNotCovered when ĥ_j² at the last bin still exceeds 1e-6 of its peak.
double msp_spectral(const RadialSpectrum& rs, const DogLevel& level);

/// Mean square of the field after removing every frequency outside the annulus
/// ρ₀ ≤ |ξ| ≤ ρ₁: the band power seen through an ideal ring filter.
/// BandOutOfRange when ρ₀ lies below the first lattice frequency or beyond the corner.
double bessel_bandpass_power(const GrammageField& f, const FrequencyBand& band);

/// Weight w with w·Σ_j MSP_j → total power when the levels cover all scales.
double msp_power_weight();

}  // namespace cloudindex

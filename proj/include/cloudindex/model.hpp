#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cloudindex/index.hpp"
#include "cloudindex/spectral.hpp"
#include "cloudindex/units.hpp"

namespace cloudindex {

/// Parameters (λ, ν) of the modified Bessel correlation / spectrum pair.
struct BesselModelParams {
  InverseLength lambda;
  double nu = 0.0;
  /// RMS of the log residuals over the fitted bins.
  std::optional<double> fit_residual;
  std::optional<InverseLength> stderr_lambda;
  std::optional<double> stderr_nu;
  bool converged = true;
  int iterations = 0;

  /// Throws InvalidParams unless λ > 0 and ν > 0.
  void validate() const;
};

/// k₁(r) = (λr)^ν K_ν(λr) / (2^{ν−1} Γ(ν)); k₁(0) = 1. r in µm.
double bessel_correlation(double r_um, const BesselModelParams& p);

/// k̂₁(ρ) = 2ν λ^{2ν} / (λ² + ρ²)^{ν+1}, in µm².
double bessel_spectrum(InverseLength rho, const BesselModelParams& p);

/// λ^{2ν}[(λ²+ρ₀²)^{−ν} − (λ²+ρ₁²)^{−ν}]: fraction of total power in [ρ₀, ρ₁]. ρ₁ may be +inf; ρ₀ may be 0.
double model_band_integral(const BesselModelParams& p, InverseLength rho0, InverseLength rho1);
double model_band_integral(const BesselModelParams& p, const FrequencyBand& band);

/// Order-0 Hankel (Bessel) transform F(ρ) = ∫ f(r) r J₀(rρ) dr by the trapezoid
/// rule on the sample grid. The transform is its own inverse, so the same
/// call maps spectra back to correlations.
///
/// The grid must be strictly increasing, start at r ≥ 0, and resolve the
/// fastest kernel oscillation with at least 8 samples per period 2π/max(ρ);
/// otherwise GridTooCoarse.
std::vector<double> hankel_transform(std::span<const double> r, std::span<const double> f,
                                     std::span<const double> rho);

/// Levenberg–Marquardt fit of the Bessel spectrum to the bins inside the band,
/// on log residuals with parameters (ln λ, ln ν). A run that hits the
/// iteration limit returns its best iterate with converged = false.
BesselModelParams fit_bessel_model(const RadialSpectrum& rs, const FrequencyBand& band);

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
  std::size_t min_bins = 8;
};
BesselModelParams fit_bessel_model(const RadialSpectrum& rs, const FrequencyBand& band, const FitOptions& opts);

/// Straight-fiber model: exponential segment lengths (mean 1/λ), radius R,
/// N_A segments per unit area.
struct FiberModelParams {
  InverseLength lambda;    ///< λ = 0 is the filament limit
  double radius_um = 0.0;  ///< R
  double n_a_per_mm2 = 0.0;

  void validate() const;
};

/// Normalization ψ(λ, R) making ∫₀^∞ ρ k̂₁,ₘ(ρ) dρ = 1.
double compute_psi(InverseLength lambda, double radius_um);

/// Fiber-model spectrum k̂₁,ₘ(ρ) = ψ/(λ√(λ²+ρ²)) · J₁²(Rρ)/(Rρ)², in µm².
///
/// Precomputes ψ once; use this when evaluating many frequencies. λ = 0 uses
/// the filament limit of ψ/λ.
class FiberSpectrum {
 public:
  explicit FiberSpectrum(const FiberModelParams& p);

  double operator()(InverseLength rho) const;
  /// ψ/λ in µm (finite also for λ = 0).
  double psi_over_lambda_um() const noexcept { return psi_over_lambda_; }

 private:
  double lambda_;  // µm⁻¹
  double radius_;  // µm
  double psi_over_lambda_;
};

double fiber_model_spectrum(InverseLength rho, const FiberModelParams& p);

/// pcf(r) = 1 + λ/(π N_A r) · e^{−λr} of the Poisson segment system; r in mm.
double pair_correlation_lines(double r_mm, InverseLength lambda, double n_a_per_mm2);

}  // namespace cloudindex

#include "cloudindex/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cloudindex/error.hpp"
#include "fft.hpp"

namespace cloudindex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double transfer(double rho, const DogLevel& l) {
  const double r2 = rho * rho;
  return (std::exp(-l.sigma_prev_um * l.sigma_prev_um * r2) - std::exp(-l.sigma_um * l.sigma_um * r2)) / kTwoPi;
}

void check_resolvable(const GrammageField& f, const DogLevel& l) {
  if (l.sigma_um < 2.0 * f.pixel_size_um()) {
    throw Error(ErrorKind::SigmaUnresolvable, "level " + std::to_string(l.j) + " has sigma " +
                                                  std::to_string(l.sigma_um) + " um, below 2 pixels of " +
                                                  std::to_string(f.pixel_size_um()) + " um");
  }
}

// |ξ| of DFT bin (kx, ky).
struct Lattice {
  std::size_t nx, ny;
  double step_x, step_y;
  explicit Lattice(const GrammageField& f)
      : nx(f.width()),
        ny(f.height()),
        step_x(kTwoPi / (static_cast<double>(f.width()) * f.pixel_size_um())),
        step_y(kTwoPi / (static_cast<double>(f.height()) * f.pixel_size_um())) {}
  double radius(std::size_t kx, std::size_t ky) const {
    return std::hypot(static_cast<double>(detail::signed_index(kx, nx)) * step_x,
                      static_cast<double>(detail::signed_index(ky, ny)) * step_y);
  }
};

void load(detail::Fft2D& fft, const GrammageField& f) {
  auto buf = fft.data();
  auto src = f.values();
  for (std::size_t k = 0; k < src.size(); ++k) buf[k] = src[k];
}

// Inverse transform of spectrum·mask, then the mean of squared values.
template <typename Mask>
double filtered_mean_square(std::span<const std::complex<double>> spectrum, const Lattice& lat, detail::Fft2D& work,
                            Mask&& mask) {
  auto buf = work.data();
  for (std::size_t ky = 0; ky < lat.ny; ++ky) {
    for (std::size_t kx = 0; kx < lat.nx; ++kx) {
      const std::size_t k = ky * lat.nx + kx;
      buf[k] = spectrum[k] * mask(lat.radius(kx, ky));
    }
  }
  work.inverse();
  const double n = static_cast<double>(lat.nx * lat.ny);
  double s = 0.0;
  for (const auto& v : buf) {
    const double x = v.real() / n;
    s += x * x;
  }
  return s / n;
}

}  // namespace

DogLevel DogLevel::level(int j) {
  DogLevel l;
  l.j = j;
  l.sigma_um = std::exp2(0.5 * (j - 1));
  l.sigma_prev_um = std::exp2(0.5 * (j - 2));
  return l;
}

double dog_transfer(InverseLength rho, const DogLevel& level) { return transfer(rho.in_per_um(), level); }

InverseLength rho_max(const DogLevel& level) {
  return InverseLength::per_um(std::sqrt(2.0 * std::numbers::ln2) / level.sigma_um);
}

double dog_norm_per_um(const DogLevel& level) {
  return 1.0 / std::sqrt(24.0 * std::numbers::pi * level.sigma_um * level.sigma_um);
}

double dog_overlap(const DogLevel& a, const DogLevel& b) {
  // ∫ρ e^{−cρ²}dρ = 1/(2c) applied to the four cross terms
  auto inner = [](double c) { return 1.0 / (2.0 * c); };
  const double pa = a.sigma_prev_um * a.sigma_prev_um, qa = a.sigma_um * a.sigma_um;
  const double pb = b.sigma_prev_um * b.sigma_prev_um, qb = b.sigma_um * b.sigma_um;
  const double cross = inner(pa + pb) - inner(pa + qb) - inner(qa + pb) + inner(qa + qb);
  const double dot = kTwoPi * cross / (kTwoPi * kTwoPi);
  return dot / (dog_norm_per_um(a) * dog_norm_per_um(b));
}

double msp_spatial(const GrammageField& f, const DogLevel& level) {
  const DogLevel one[] = {level};
  return msp_spatial_levels(f, one).front();
}

std::vector<double> msp_spatial_levels(const GrammageField& f, std::span<const DogLevel> levels) {
  for (const auto& l : levels) check_resolvable(f, l);
  const Lattice lat(f);
  detail::Fft2D fwd(lat.nx, lat.ny);
  load(fwd, f);
  fwd.forward();
  const std::vector<std::complex<double>> spectrum(fwd.data().begin(), fwd.data().end());

  std::vector<double> out;
  out.reserve(levels.size());
  for (const auto& l : levels) {
    // the lattice filter realizes ĥ itself; 2π restores the continuous convolution scale
    out.push_back(kTwoPi * filtered_mean_square(spectrum, lat, fwd, [&](double rho) { return transfer(rho, l); }));
  }
  return out;
}

double msp_spectral(const RadialSpectrum& rs, const DogLevel& level) {
  if (rs.size() == 0) throw Error(ErrorKind::SupportNotCovered, "empty spectrum");
  const double peak = transfer(rho_max(level).in_per_um(), level);
  const double tail = transfer(rs.bin_centers.back(), level);
  if (tail * tail > 1e-6 * peak * peak) {
    throw Error(ErrorKind::SupportNotCovered,
                "level " + std::to_string(level.j) + " still carries " + std::to_string(tail * tail / (peak * peak)) +
                    " of its peak weight at the last bin, rho = " + std::to_string(rs.bin_centers.back()));
  }
  double s = 0.0;
  double prev_x = 0.0, prev_y = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double x = rs.bin_centers[i];
    const double h = transfer(x, level);
    const double y = x * rs.values[i] * h * h;
    s += 0.5 * (x - prev_x) * (y + prev_y);
    prev_x = x;
    prev_y = y;
  }
  return kTwoPi * s;
}

double bessel_bandpass_power(const GrammageField& f, const FrequencyBand& band) {
  band.validate();
  const Lattice lat(f);
  const double first = std::min(lat.step_x, lat.step_y);
  const double corner = std::hypot(static_cast<double>(lat.nx / 2) * lat.step_x,
                                   static_cast<double>(lat.ny / 2) * lat.step_y);
  const double r0 = band.rho0.in_per_um();
  const double r1 = band.rho1.in_per_um();
  if (r0 < first * (1.0 - 1e-9) || r0 > corner) {
    throw Error(ErrorKind::BandOutOfRange, "rho0 = " + std::to_string(r0) + " outside the lattice range [" +
                                               std::to_string(first) + ", " + std::to_string(corner) + "]");
  }
  detail::Fft2D fft(lat.nx, lat.ny);
  load(fft, f);
  fft.forward();
  const std::vector<std::complex<double>> spectrum(fft.data().begin(), fft.data().end());
  const double lo = r0 * (1.0 - 1e-12);
  const double hi = r1 * (1.0 + 1e-12);
  return filtered_mean_square(spectrum, lat, fft, [&](double rho) { return rho >= lo && rho <= hi ? 1.0 : 0.0; });
}

double msp_power_weight() { return kTwoPi * std::numbers::ln2 / std::log(9.0 / 8.0); }

}  // namespace cloudindex

#include "cloudindex/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cloudindex/error.hpp"
#include "cloudindex/model.hpp"

namespace cloudindex {

namespace {

constexpr double kClampSlack = 1e-3;  // 0.1 percentage points

std::string band_text(const FrequencyBand& b) {
  return "[" + std::to_string(b.rho0.in_per_um()) + ", " + std::to_string(b.rho1.in_per_um()) + "] um^-1";
}

// Number of nodes whose Voronoi cell on the ρ axis meets [lo, hi].
std::size_t bins_meeting(const std::vector<double>& c, double lo, double hi) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double left = i == 0 ? -std::numeric_limits<double>::infinity() : 0.5 * (c[i - 1] + c[i]);
    const double right = i + 1 == c.size() ? std::numeric_limits<double>::infinity() : 0.5 * (c[i] + c[i + 1]);
    if (right >= lo && left <= hi) ++n;
  }
  return n;
}

}  // namespace

void FrequencyBand::validate() const {
  const double a = rho0.in_per_um();
  const double b = rho1.in_per_um();
  if (!(a > 0.0) || !(a <= b) || std::isnan(b)) {
    throw Error(ErrorKind::InvalidParams, "band must satisfy 0 < rho0 <= rho1, got " + band_text(*this));
  }
}

double band_power(const RadialSpectrum& rs, const FrequencyBand& band) {
  band.validate();
  const auto& c = rs.bin_centers;
  if (rs.size() < 2) throw Error(ErrorKind::InsufficientBins, "radial spectrum has fewer than 2 bins");
  const double lo = band.rho0.in_per_um();
  const double hi = band.rho1.in_per_um();
  const double tol = 1e-12 * c.back();
  if (lo < c.front() - tol || hi > c.back() + tol) {
    throw Error(ErrorKind::BandOutOfRange, "band " + band_text(band) + " outside sampled range [" +
                                               std::to_string(c.front()) + ", " + std::to_string(c.back()) + "]");
  }
  if (lo == hi) return 0.0;
  if (bins_meeting(c, lo, hi) < 2) {
    throw Error(ErrorKind::InsufficientBins, "fewer than 2 bins intersect band " + band_text(band));
  }

  auto g = [&](std::size_t i) { return c[i] * rs.values[i]; };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double a = std::max(c[i], lo);
    const double b = std::min(c[i + 1], hi);
    if (!(b > a)) continue;
    const double h = c[i + 1] - c[i];
    const double ga = g(i) + (g(i + 1) - g(i)) * (a - c[i]) / h;
    const double gb = g(i) + (g(i + 1) - g(i)) * (b - c[i]) / h;
    sum += 0.5 * (b - a) * (ga + gb);
  }
  if (sum < 0.0 && sum >= -kClampSlack) sum = 0.0;
  if (sum > 1.0 && sum <= 1.0 + kClampSlack) sum = 1.0;
  if (!(sum >= 0.0 && sum <= 1.0)) {
    throw Error(ErrorKind::NumericalBounds,
                "band power " + std::to_string(sum) + " outside [0, 1]; spectrum not normalized?");
  }
  return sum;
}

double cloudiness_index(const RadialSpectrum& rs, const FrequencyBand& band) { return 100.0 * band_power(rs, band); }

std::vector<SectorCloudiness> directional_cloudiness(const PowerSpectrum2D& ps, const std::vector<Sector>& sectors,
                                                     const FrequencyBand& band) {
  std::vector<Sector> sorted = sectors;
  std::sort(sorted.begin(), sorted.end(), [](Sector a, Sector b) { return a.phi_lo < b.phi_lo; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].phi_hi > sorted[i + 1].phi_lo) {
      throw Error(ErrorKind::InvalidSectors, "sectors overlap");
    }
  }
  std::vector<SectorCloudiness> out;
  out.reserve(sectors.size());
  for (const Sector& s : sectors) {
    SectorCloudiness sc{s, cloudiness_index(sector_weighted_spectrum(ps, s), band),
                        std::numeric_limits<double>::quiet_NaN()};
    try {
      sc.cli_mean_percent = cloudiness_index(sector_average(ps, s), band);
    } catch (const Error&) {
      // narrow sectors may leave annuli empty; the share above is still defined
    }
    out.push_back(sc);
  }
  return out;
}

double range_of_interaction(const BesselModelParams& p) {
  p.validate();
  const double lambda = p.lambda.in_per_mm();
  return 4.0 * std::numbers::pi * p.nu / (lambda * lambda);
}

}  // namespace cloudindex

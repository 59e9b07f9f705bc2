#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "cloudindex/error.hpp"
#include "cloudindex/model.hpp"
#include "cloudindex/pyramid.hpp"
#include "cloudindex/synth.hpp"
#include "helpers.hpp"

using namespace cloudindex;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidParams;
}

double h(double rho, const DogLevel& l) { return dog_transfer(InverseLength::per_um(rho), l); }

RadialSpectrum constant_radial(double c, double step, std::size_t n) {
  RadialSpectrum rs;
  for (std::size_t i = 0; i < n; ++i) {
    rs.bin_centers.push_back((static_cast<double>(i) + 0.5) * step);
    rs.values.push_back(c);
    rs.counts.push_back(1);
  }
  return rs;
}

}  // namespace

TEST_CASE("DoG levels") {
  const DogLevel l = DogLevel::level(9);
  CHECK(l.sigma_um == 16.0);
  CHECK(l.sigma_prev_um == testutil::approx(16.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(h(0.0, l) == 0.0);
  CHECK(h(0.03, l) > 0.0);
}

TEST_CASE("transfer peak and norm") {
  const double ref_rho[] = {0.074, 0.052, 0.037, 0.026};
  const double ref_norm[] = {7.200, 5.090, 3.600, 2.545};
  for (int j = 9; j <= 12; ++j) {
    const DogLevel l = DogLevel::level(j);
    // the reference values carry three decimals
    CHECK(std::round(1000.0 * rho_max(l).in_per_um()) == testutil::approx(1000.0 * ref_rho[j - 9]));
    CHECK(1000.0 * dog_norm_per_um(l) == testutil::approx(ref_norm[j - 9]).epsilon(0.005));

    // locate the peak numerically: the derivative changes sign at ρ_max
    double a = 0.1 * rho_max(l).in_per_um(), b = 3.0 * rho_max(l).in_per_um();
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      const double d = h(m * (1 + 1e-7), l) - h(m * (1 - 1e-7), l);
      (d > 0 ? a : b) = m;
    }
    CHECK(std::abs(0.5 * (a + b) - rho_max(l).in_per_um()) < 1e-6 * rho_max(l).in_per_um());

    // ‖ĥ‖² = 2π∫ρ ĥ² dρ
    const double q = gauss_kronrod<double, 61>::integrate([&](double r) { return r * h(r, l) * h(r, l); }, 0.0,
                                                          std::numeric_limits<double>::infinity(), 15, 1e-14);
    CHECK(2.0 * kPi * q == testutil::approx(std::pow(dog_norm_per_um(l), 2)).epsilon(1e-10));
  }
}

TEST_CASE("consecutive levels overlap strongly") {
  for (int j = 5; j <= 12; ++j) {
    const DogLevel a = DogLevel::level(j), b = DogLevel::level(j + 1);
    const double q = gauss_kronrod<double, 61>::integrate([&](double r) { return r * h(r, a) * h(r, b); }, 0.0,
                                                          std::numeric_limits<double>::infinity(), 15, 1e-14);
    const double expect = 2.0 * kPi * q / (dog_norm_per_um(a) * dog_norm_per_um(b));
    CHECK(dog_overlap(a, b) == testutil::approx(expect).epsilon(1e-10));
    CHECK(dog_overlap(a, b) > 0.5);
  }
  CHECK(dog_overlap(DogLevel::level(9), DogLevel::level(9)) == testutil::approx(1.0).epsilon(1e-12));
}

TEST_CASE("msp_spectral") {
  const DogLevel l = DogLevel::level(9);
  SUBCASE("flat spectrum") {
    const RadialSpectrum rs = constant_radial(2.5, 1e-4, 4000);
    CHECK(msp_spectral(rs, l) == testutil::approx(2.5 * std::pow(dog_norm_per_um(l), 2)).epsilon(1e-5));
  }
  SUBCASE("narrow spectrum picks out the transfer at its location") {
    RadialSpectrum rs = constant_radial(0.0, 1e-3, 400);
    const std::size_t i = 73;  // ρ = 0.0735, next to ρ_max
    rs.values[i] = 1.0;
    const double x = rs.bin_centers[i];
    CHECK(msp_spectral(rs, l) == testutil::approx(2.0 * kPi * x * h(x, l) * h(x, l) * 1e-3).epsilon(1e-12));
  }
  SUBCASE("support must be covered") {
    CHECK(kind_of([&] { msp_spectral(constant_radial(1.0, 1e-3, 60), l); }) == ErrorKind::SupportNotCovered);
  }
}

TEST_CASE("telescoping levels recover the total power") {
  BesselModelParams p;
  p.lambda = InverseLength::per_um(0.05);
  p.nu = 1.0;
  // levels 1..20 span ρ_max from 1.2 down to 0.0016 µm⁻¹; the model puts < 0.5% of its power outside
  RadialSpectrum rs;
  const double step = 1e-5;
  for (std::size_t i = 0; i < 800000; ++i) {
    const double rho = (static_cast<double>(i) + 0.5) * step;
    rs.bin_centers.push_back(rho);
    rs.values.push_back(bessel_spectrum(InverseLength::per_um(rho), p));
    rs.counts.push_back(1);
  }
  double sum = 0.0;
  for (int j = 1; j <= 20; ++j) sum += msp_spectral(rs, DogLevel::level(j));
  CHECK(msp_power_weight() * sum == testutil::approx(1.0).epsilon(0.01));
}

TEST_CASE("msp_spatial") {
  SUBCASE("matches the spectral route on white noise") {
    const GrammageField f = testutil::noise_field(512, 512, 1.0, 2);
    const RadialSpectrum rs = radial_average(power_spectrum_2d(f));
    for (int j : {5, 7, 9}) {
      const DogLevel l = DogLevel::level(j);
      const double spatial = msp_spatial(f, l);
      CHECK(spatial == testutil::approx(msp_spectral(rs, l)).epsilon(0.02));
      // flat spectrum of height 1/2π at Δ = 1
      CHECK(spatial == testutil::approx(std::pow(dog_norm_per_um(l), 2) / (2.0 * kPi)).epsilon(0.1));
    }
    const DogLevel levels[] = {DogLevel::level(5), DogLevel::level(7)};
    const auto both = msp_spatial_levels(f, levels);
    CHECK(both[0] == testutil::approx(msp_spatial(f, levels[0])).epsilon(1e-12));
    CHECK(both[1] == testutil::approx(msp_spatial(f, levels[1])).epsilon(1e-12));
  }
  SUBCASE("sigma below two pixels") {
    const GrammageField f = testutil::noise_field(64, 64, 3.0, 3);
    CHECK(kind_of([&] { msp_spatial(f, DogLevel::level(5)); }) == ErrorKind::SigmaUnresolvable);
  }
}

TEST_CASE("bessel_bandpass_power") {
  const GrammageField f = testutil::noise_field(256, 256, 2.0, 12);
  const double first = 2.0 * kPi / (256.0 * 2.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(bessel_bandpass_power(f, {InverseLength::per_um(first), InverseLength::per_um(inf)}) ==
        testutil::approx(1.0).epsilon(1e-9));
  CHECK(bessel_bandpass_power(f, {InverseLength::per_um(first), InverseLength::per_um(10.0)}) ==
        testutil::approx(1.0).epsilon(1e-9));

  const FrequencyBand b{InverseLength::per_um(0.1), InverseLength::per_um(0.6)};
  const double cli = cloudiness_index(radial_average(power_spectrum_2d(f)), b) / 100.0;
  CHECK(bessel_bandpass_power(f, b) == testutil::approx(cli).epsilon(0.03));

  CHECK(kind_of([&] { bessel_bandpass_power(f, {InverseLength::per_um(0.5 * first), InverseLength::per_um(1.0)}); }) ==
        ErrorKind::BandOutOfRange);
  CHECK(kind_of([&] { bessel_bandpass_power(f, {InverseLength::per_um(5.0), InverseLength::per_um(6.0)}); }) ==
        ErrorKind::BandOutOfRange);
}

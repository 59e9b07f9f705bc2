#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cloudindex/error.hpp"
#include "cloudindex/grammage.hpp"
#include "helpers.hpp"

using namespace cloudindex;

namespace {

GrayImage image(std::size_t w, std::size_t h, std::vector<double> v) {
  return GrayImage{Grid2D<double>(w, h, std::move(v)), 5.0, 0.0};
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidParams;
}

}  // namespace

TEST_CASE("normalize_grammage evaluates the formula by hand") {
  const double e = std::exp(1.0);
  // ln g = {1, 3}: mean 2, population std 1
  const GrammageField f = normalize_grammage(image(2, 2, {e, e * e * e, e, e * e * e}));
  CHECK(f(0, 0) == testutil::approx(1.0).epsilon(1e-12));
  CHECK(f(1, 0) == testutil::approx(-1.0).epsilon(1e-12));
  CHECK(f.pixel_size_um() == 5.0);
}

TEST_CASE("brighter pixels map to smaller f") {
  const GrammageField f = normalize_grammage(image(2, 2, {10, 20, 30, 40}));
  CHECK(f(0, 0) > f(1, 0));
  CHECK(f(1, 0) > f(0, 1));
  CHECK(f(0, 1) > f(1, 1));
}

TEST_CASE("normalize_grammage rejects bad images") {
  CHECK(kind_of([] { normalize_grammage(image(2, 2, {128, 128, 128, 128})); }) == ErrorKind::ZeroVariance);
  CHECK(kind_of([] { normalize_grammage(image(2, 2, {1, 0, 3, 4})); }) == ErrorKind::NonPositivePixel);
  try {
    normalize_grammage(image(3, 2, {1, 2, 3, 4, -1, 5}));
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("(1, 1)") != std::string::npos);
  }
}

TEST_CASE("normalized fields meet the invariants") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1.0, 4000.0);
  std::vector<double> v(97 * 61);
  for (double& x : v) x = u(rng);
  const GrammageField f = normalize_grammage(image(97, 61, v));
  const Moments m = moments(f.values());
  CHECK(std::abs(m.mean) < 1e-9);
  CHECK(std::abs(m.stddev - 1.0) < 1e-9);

  // rescaling the gray values only shifts ln g
  std::vector<double> scaled = v;
  for (double& x : scaled) x *= 37.5;
  const GrammageField g = normalize_grammage(image(97, 61, scaled));
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(f.values()[i] - g.values()[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("from_normalized and from_raw check their inputs") {
  CHECK(kind_of([] { GrammageField::from_normalized(Grid2D<double>(2, 2, {1, 2, 3, 4}), 1.0); }) ==
        ErrorKind::InvalidField);
  CHECK(kind_of([] { GrammageField::from_raw(Grid2D<double>(2, 2, 3.0), 1.0); }) == ErrorKind::ZeroVariance);
  CHECK(kind_of([] { GrammageField::from_raw(Grid2D<double>(1, 4, {1, 2, 3, 4}), 1.0); }) == ErrorKind::InvalidField);
  CHECK(kind_of([] { GrammageField::from_raw(Grid2D<double>(2, 2, {1, 2, 3, 4}), 0.0); }) == ErrorKind::InvalidField);
  CHECK(kind_of([] {
          GrammageField::from_raw(Grid2D<double>(2, 2, {1, 2, 3, std::nan("")}), 1.0);
        }) == ErrorKind::InvalidField);
}

TEST_CASE("pixelwise_mean") {
  const GrammageField a = testutil::noise_field(32, 16, 2.0, 1);
  const GrammageField b = testutil::noise_field(32, 16, 2.0, 2);
  const GrammageField c = testutil::noise_field(16, 16, 2.0, 3);
  const GrammageField d = testutil::noise_field(32, 16, 3.0, 4);

  SUBCASE("single field is returned unchanged") {
    const GrammageField one[] = {a};
    const GrammageField m = pixelwise_mean(one);
    CHECK(std::equal(m.values().begin(), m.values().end(), a.values().begin()));
  }
  SUBCASE("shape and pixel size must agree") {
    CHECK(kind_of([&] { pixelwise_mean(std::vector<GrammageField>{a, c}); }) == ErrorKind::DimensionMismatch);
    CHECK(kind_of([&] { pixelwise_mean(std::vector<GrammageField>{a, d}); }) == ErrorKind::DimensionMismatch);
    try {
      pixelwise_mean(std::vector<GrammageField>{a, c});
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("32x16") != std::string::npos);
      CHECK(msg.find("16x16") != std::string::npos);
    }
    CHECK(kind_of([] { pixelwise_mean(std::span<const GrammageField>{}); }) == ErrorKind::EmptyInput);
  }
  SUBCASE("permutation invariant and normalized") {
    const GrammageField ab = pixelwise_mean(std::vector<GrammageField>{a, b});
    const GrammageField ba = pixelwise_mean(std::vector<GrammageField>{b, a});
    for (std::size_t i = 0; i < ab.values().size(); ++i) CHECK(ab.values()[i] == testutil::approx(ba.values()[i]).epsilon(1e-14));
    const Moments m = moments(ab.values());
    CHECK(std::abs(m.mean) < 1e-9);
    CHECK(std::abs(m.stddev - 1.0) < 1e-9);
  }
}

TEST_CASE("mean of ten white-noise fields has variance near 1/10") {
  std::vector<double> acc(256 * 256, 0.0);
  for (int s = 0; s < 10; ++s) {
    const GrammageField f = testutil::noise_field(256, 256, 1.0, 100 + s);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += f.values()[i] / 10.0;
  }
  const Moments m = moments(acc);
  CHECK(m.stddev * m.stddev == testutil::approx(0.1).epsilon(0.2));
}

TEST_CASE("count_saturated") {
  GrayImage img{Grid2D<double>(2, 2, {255, 3, 255, 7}), 1.0, 255.0};
  CHECK(count_saturated(img) == 2);
  img.max_value = 0.0;
  CHECK(count_saturated(img) == 0);
}

#pragma once

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cloudindex/grammage.hpp"
#include "cloudindex/grid.hpp"

namespace testutil {

// relative tolerance only; doctest's default scale of 1 would make small values pass trivially
inline doctest::Approx approx(double v) { return doctest::Approx(v).scale(0.0); }

inline cloudindex::Grid2D<double> white_noise(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  cloudindex::Grid2D<double> g(w, h);
  for (double& v : g.values()) v = n(rng);
  return g;
}

inline cloudindex::GrammageField noise_field(std::size_t w, std::size_t h, double px, std::uint64_t seed) {
  return cloudindex::GrammageField::from_raw(white_noise(w, h, seed), px);
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace testutil

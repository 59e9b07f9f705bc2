#pragma once

#include <compare>

namespace cloudindex {

/// Circular frequency (inverse length). Stored in µm⁻¹; the wavelength is 2π/ρ.
class InverseLength {
 public:
  constexpr InverseLength() = default;

  static constexpr InverseLength per_um(double v) { return InverseLength(v); }
  static constexpr InverseLength per_mm(double v) { return InverseLength(v * 1e-3); }

  constexpr double in_per_um() const { return v_; }
  constexpr double in_per_mm() const { return v_ * 1e3; }

  constexpr auto operator<=>(const InverseLength&) const = default;

  friend constexpr InverseLength operator*(double c, InverseLength x) { return InverseLength(c * x.v_); }

 private:
  constexpr explicit InverseLength(double v) : v_(v) {}
  double v_ = 0.0;
};

}  // namespace cloudindex

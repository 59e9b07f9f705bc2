#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cloudindex {

enum class ErrorKind {
  // data errors
  NonPositivePixel,
  ZeroVariance,
  EmptyInput,
  DimensionMismatch,
  InvalidField,
  UnsupportedImage,
  IoError,
  ParseError,
  InvalidConfig,
  EmptySector,
  InvalidSectors,
  BandOutOfRange,
  InsufficientBins,
  NonPositiveSpectrum,
  InvalidParams,
  GridTooCoarse,
  KernelTooSmall,
  DegenerateField,
  SigmaUnresolvable,
  SupportNotCovered,
  // numerical failures
  NoConvergence,
  QuadratureFailure,
  NumericalBounds,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures of a numerical procedure (as opposed to bad input).
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace cloudindex

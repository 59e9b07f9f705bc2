#include "cloudindex/error.hpp"

namespace cloudindex {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositivePixel: return "NonPositivePixel";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidField: return "InvalidField";
    case ErrorKind::UnsupportedImage: return "UnsupportedImage";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::EmptySector: return "EmptySector";
    case ErrorKind::InvalidSectors: return "InvalidSectors";
    case ErrorKind::BandOutOfRange: return "BandOutOfRange";
    case ErrorKind::InsufficientBins: return "InsufficientBins";
    case ErrorKind::NonPositiveSpectrum: return "NonPositiveSpectrum";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::KernelTooSmall: return "KernelTooSmall";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::SigmaUnresolvable: return "SigmaUnresolvable";
    case ErrorKind::SupportNotCovered: return "SupportNotCovered";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NumericalBounds: return "NumericalBounds";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
  return kind == ErrorKind::NoConvergence || kind == ErrorKind::QuadratureFailure ||
         kind == ErrorKind::NumericalBounds;
}

}  // namespace cloudindex

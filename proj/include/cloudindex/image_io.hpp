#pragma once

#include <filesystem>
#include <string>

#include "cloudindex/grammage.hpp"
#include "cloudindex/grid.hpp"

namespace cloudindex::io {

/// Reads an 8- or 16-bit grayscale PGM (P2/P5) or PNG. Pixel size is not
/// taken from the file. Color or alpha PNGs are rejected (UnsupportedImage).
GrayImage read_gray_image(const std::filesystem::path& path, double pixel_size_um);

/// Affine map used when a real-valued field is written as 16-bit gray:
/// value = offset + scale * gray.
struct GrayScaling {
  double offset = 0.0;
  double scale = 1.0;
};

/// Writes a binary 16-bit PGM spanning the full gray range; returns the map back to values.
GrayScaling write_pgm16(const std::filesystem::path& path, const Grid2D<double>& values);

void write_pgm(const std::filesystem::path& path, const Grid2D<double>& values, int max_value);

/// Raw little-endian float32 raster plus `<path>.txt` sidecar (key = value lines).
void write_f32_raster(const std::filesystem::path& path, const Grid2D<double>& values,
                      const std::string& sidecar_text);

/// Reads a float32 raster written by write_f32_raster; dimensions come from the sidecar.
struct F32Raster {
  Grid2D<double> values;
  double pixel_size_um = 0.0;  // 0 when the sidecar has none
};
F32Raster read_f32_raster(const std::filesystem::path& path);

/// Loads a grammage field: `.f32` rasters are taken as already normalized
/// (re-standardized after the float round trip), images go through normalize_grammage.
GrammageField load_field(const std::filesystem::path& path, double pixel_size_um);

}  // namespace cloudindex::io

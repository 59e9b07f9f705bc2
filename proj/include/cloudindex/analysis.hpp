#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "cloudindex/index.hpp"
#include "cloudindex/report.hpp"
#include "cloudindex/spectral.hpp"

namespace cloudindex {

struct AnalysisConfig {
  std::vector<std::filesystem::path> image_paths;
  double pixel_size_um = 0.0;
  FrequencyBand band = kDefaultBand;
  std::optional<std::vector<Sector>> sectors;
  bool fit = false;
  std::optional<std::vector<int>> pyramid_levels;
  /// Report destination; empty means nothing is written.
  std::filesystem::path output_path;

  /// InvalidConfig unless the pixel size is positive and there is at least one path.
  void validate() const;
};

/// `report.json` → `report.radial.csv`.
std::filesystem::path radial_csv_path(const std::filesystem::path& report_path);

struct AnalysisResult {
  CloudinessReport report;
  RadialSpectrum radial;
};

/// Load and normalize every image (concurrently), average them pixelwise and
/// evaluate CLI, sector CLIs, the optional Bessel fit with RI, and MSP levels.
/// Writes the report and the radial spectrum CSV when an output path is set.
/// Errors from one image carry its path in the message.
AnalysisResult run_analysis(const AnalysisConfig& cfg);

}  // namespace cloudindex

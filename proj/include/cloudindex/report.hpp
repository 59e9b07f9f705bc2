#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cloudindex/index.hpp"
#include "cloudindex/model.hpp"

namespace cloudindex {

/// Result of one analysis run. Serialized as JSON with units in the key names
/// and frequencies in both µm⁻¹ and mm⁻¹ where the model is concerned.
struct CloudinessReport {
  double cli_percent = 0.0;
  /// Standard deviation of the mean of the per-image CLIs (multi-image runs only).
  std::optional<double> cli_stderr_percent;
  FrequencyBand band = kDefaultBand;
  std::vector<SectorCloudiness> sectors;
  std::optional<BesselModelParams> model;
  std::optional<double> ri_mm2;
  std::vector<MspValue> msp;
  InputProvenance inputs;
};

/// Pretty-printed JSON; identical reports give identical text.
std::string report_json(const CloudinessReport& r);

void write_report(const std::filesystem::path& path, const CloudinessReport& r);

}  // namespace cloudindex

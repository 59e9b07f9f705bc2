#include "cloudindex/report.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "cloudindex/error.hpp"

namespace cloudindex {

namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

template <typename T>
ordered_json optional_value(const std::optional<T>& v) {
  return v ? number_or_null(static_cast<double>(*v)) : ordered_json(nullptr);
}

ordered_json model_json(const BesselModelParams& m) {
  ordered_json j;
  j["lambda_per_mm"] = m.lambda.in_per_mm();
  j["lambda_per_um"] = m.lambda.in_per_um();
  j["nu"] = m.nu;
  j["fit_residual_log_rms"] = optional_value(m.fit_residual);
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["lambda_stderr_per_mm"] = m.stderr_lambda ? ordered_json(m.stderr_lambda->in_per_mm()) : ordered_json(nullptr);
  j["nu_stderr"] = optional_value(m.stderr_nu);
  return j;
}

}  // namespace

std::string report_json(const CloudinessReport& r) {
  const double two_pi = 2.0 * std::numbers::pi;
  ordered_json j;
  j["cli_percent"] = number_or_null(r.cli_percent);
  j["cli_stderr_percent"] = optional_value(r.cli_stderr_percent);
  ordered_json band;
  band["rho0_per_um"] = r.band.rho0.in_per_um();
  band["rho1_per_um"] = number_or_null(r.band.rho1.in_per_um());
  band["wavelength0_um"] = two_pi / r.band.rho0.in_per_um();
  band["wavelength1_um"] = two_pi / r.band.rho1.in_per_um();
  j["band"] = band;

  ordered_json sectors = ordered_json::array();
  for (const auto& s : r.sectors) {
    sectors.push_back({{"phi_lo_rad", s.sector.phi_lo},
                       {"phi_hi_rad", s.sector.phi_hi},
                       {"cli_percent", number_or_null(s.cli_percent)},
                       {"cli_mean_percent", number_or_null(s.cli_mean_percent)}});
  }
  j["sectors"] = sectors;
  j["model"] = r.model ? model_json(*r.model) : ordered_json(nullptr);
  j["ri_mm2"] = optional_value(r.ri_mm2);

  ordered_json msp = ordered_json::array();
  for (const auto& m : r.msp) msp.push_back({{"j", m.j}, {"msp_permille", number_or_null(m.value_permille)}});
  j["msp"] = msp;

  ordered_json in;
  in["files"] = r.inputs.files;
  in["image_count"] = r.inputs.image_count;
  in["pixel_size_um"] = r.inputs.pixel_size_um;
  in["width_px"] = r.inputs.width;
  in["height_px"] = r.inputs.height;
  in["saturated_pixels"] = r.inputs.saturated_pixels;
  j["inputs"] = in;
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const CloudinessReport& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << report_json(r);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace cloudindex

#include "cloudindex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "cloudindex/error.hpp"
#include "cloudindex/image_io.hpp"
#include "cloudindex/model.hpp"
#include "cloudindex/pyramid.hpp"

namespace cloudindex {

namespace {

struct Loaded {
  GrammageField field;
  std::size_t saturated = 0;
};

Loaded load_one(const std::filesystem::path& path, double pixel_size_um) {
  try {
    if (path.extension() == ".f32") return Loaded{io::load_field(path, pixel_size_um), 0};
    const GrayImage img = io::read_gray_image(path, pixel_size_um);
    return Loaded{normalize_grammage(img), count_saturated(img)};
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

// Mean and standard deviation of the mean.
std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

RadialSpectrum radial_of(const GrammageField& f) { return radial_average(power_spectrum_2d(f)); }

}  // namespace

void AnalysisConfig::validate() const {
  if (image_paths.empty()) throw Error(ErrorKind::InvalidConfig, "no input images");
  if (!(pixel_size_um > 0.0 && std::isfinite(pixel_size_um))) {
    throw Error(ErrorKind::InvalidConfig, "pixel size must be positive");
  }
  band.validate();
}

std::filesystem::path radial_csv_path(const std::filesystem::path& report_path) {
  std::filesystem::path p = report_path;
  p.replace_extension(".radial.csv");
  return p;
}

AnalysisResult run_analysis(const AnalysisConfig& cfg) {
  cfg.validate();
  std::vector<std::future<Loaded>> jobs;
  jobs.reserve(cfg.image_paths.size());
  for (const auto& p : cfg.image_paths) {
    jobs.push_back(std::async(std::launch::async, load_one, p, cfg.pixel_size_um));
  }
  std::vector<GrammageField> fields;
  std::size_t saturated = 0;
  for (auto& j : jobs) {
    Loaded l = j.get();
    saturated += l.saturated;
    fields.push_back(std::move(l.field));
  }

  const GrammageField pooled = pixelwise_mean(fields);
  const PowerSpectrum2D ps = power_spectrum_2d(pooled);

  AnalysisResult res;
  res.radial = radial_average(ps);
  CloudinessReport& r = res.report;
  r.band = cfg.band;
  r.cli_percent = cloudiness_index(res.radial, cfg.band);
  if (cfg.sectors) r.sectors = directional_cloudiness(ps, *cfg.sectors, cfg.band);

  std::vector<RadialSpectrum> singles;
  if (fields.size() > 1) {
    std::vector<double> clis;
    for (const auto& f : fields) {
      singles.push_back(radial_of(f));
      clis.push_back(cloudiness_index(singles.back(), cfg.band));
    }
    r.cli_stderr_percent = mean_and_stderr(clis).second;
  }

  if (cfg.fit) {
    BesselModelParams m = fit_bessel_model(res.radial, cfg.band);
    if (!singles.empty()) {
      std::vector<double> lambdas, nus;
      for (const auto& s : singles) {
        const BesselModelParams one = fit_bessel_model(s, cfg.band);
        lambdas.push_back(one.lambda.in_per_um());
        nus.push_back(one.nu);
      }
      m.stderr_lambda = InverseLength::per_um(mean_and_stderr(lambdas).second);
      m.stderr_nu = mean_and_stderr(nus).second;
    }
    r.ri_mm2 = range_of_interaction(m);
    r.model = m;
  }

  if (cfg.pyramid_levels) {
    std::vector<DogLevel> levels;
    for (int j : *cfg.pyramid_levels) levels.push_back(DogLevel::level(j));
    const std::vector<double> v = msp_spatial_levels(pooled, levels);
    for (std::size_t i = 0; i < levels.size(); ++i) r.msp.push_back(MspValue{levels[i].j, 1000.0 * v[i]});
  }

  for (const auto& p : cfg.image_paths) r.inputs.files.push_back(p.string());
  r.inputs.image_count = fields.size();
  r.inputs.pixel_size_um = cfg.pixel_size_um;
  r.inputs.width = pooled.width();
  r.inputs.height = pooled.height();
  r.inputs.saturated_pixels = saturated;

  if (!cfg.output_path.empty()) {
    write_report(cfg.output_path, r);
    write_radial_csv(radial_csv_path(cfg.output_path), res.radial);
  }
  return res;
}

}  // namespace cloudindex

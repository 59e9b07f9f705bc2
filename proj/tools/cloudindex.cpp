// cloudindex: cloudiness index, spectra, model fits, synthetic nonwovens and DoG levels.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "cloudindex/analysis.hpp"
#include "cloudindex/error.hpp"
#include "cloudindex/image_io.hpp"
#include "cloudindex/model.hpp"
#include "cloudindex/pyramid.hpp"
#include "cloudindex/synth.hpp"

namespace fs = std::filesystem;
using namespace cloudindex;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError(what, "expected lo:hi, got '" + text + "'");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {lo, hi};
  } catch (const std::exception&) {
    throw CLI::ValidationError(what, "expected two numbers lo:hi, got '" + text + "'");
  }
}

FrequencyBand parse_band(const std::string& text) {
  const auto [lo, hi] = parse_pair(text, "--band");
  return FrequencyBand{InverseLength::per_um(lo), InverseLength::per_um(hi)};
}

std::vector<Sector> parse_sectors(const std::vector<std::string>& items) {
  std::vector<Sector> out;
  for (const auto& s : items) {
    const auto [lo, hi] = parse_pair(s, "--sectors");
    out.push_back(Sector{lo, hi});
  }
  return out;
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int a = std::stoi(text.substr(0, dots)), b = std::stoi(text.substr(dots + 2));
      for (int j = a; j <= b; ++j) out.push_back(j);
      if (out.empty()) throw std::invalid_argument(text);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--levels", "expected a..b or a,b,c, got '" + text + "'");
  }
  return out;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + p.string() + " for writing");
  out.imbue(std::locale::classic());
  return out;
}

GrammageField pooled_field(const std::vector<std::string>& paths, double pixel_size_um) {
  std::vector<GrammageField> fields;
  for (const auto& p : paths) {
    try {
      fields.push_back(io::load_field(p, pixel_size_um));
    } catch (const Error& e) {
      throw Error(e.kind(), p + ": " + e.detail());
    }
  }
  return pixelwise_mean(fields);
}

struct Options {
  std::vector<std::string> inputs;
  double pixel_size_um = 0.0;
  std::string band = "0.02:0.10";
  std::vector<std::string> sectors;
  std::string levels;
  bool fit = false;
  std::string output;
  std::string raster;
  std::string sector;
  // synth
  double na = 0.0, lambda_per_mm = 0.0, radius_um = 0.0;
  std::size_t size = 1024;
  std::uint64_t seed = 0;
};

void cmd_analyze(const Options& o) {
  AnalysisConfig cfg;
  for (const auto& p : o.inputs) cfg.image_paths.emplace_back(p);
  cfg.pixel_size_um = o.pixel_size_um;
  cfg.band = parse_band(o.band);
  if (!o.sectors.empty()) cfg.sectors = parse_sectors(o.sectors);
  if (!o.levels.empty()) cfg.pyramid_levels = parse_levels(o.levels);
  cfg.fit = o.fit;
  cfg.output_path = o.output;
  const AnalysisResult res = run_analysis(cfg);
  if (o.output.empty()) {
    std::cout << report_json(res.report);
  } else {
    std::cerr << "wrote " << o.output << " and " << radial_csv_path(o.output).string() << "\n";
  }
}

void cmd_spectrum(const Options& o) {
  const GrammageField f = pooled_field(o.inputs, o.pixel_size_um);
  const PowerSpectrum2D ps = power_spectrum_2d(f);
  RadialSpectrum rs;
  if (o.sector.empty()) {
    rs = radial_average(ps);
  } else {
    const auto [lo, hi] = parse_pair(o.sector, "--sector");
    rs = sector_average(ps, Sector{lo, hi});
  }
  if (!o.raster.empty()) write_spectrum_raster(o.raster, ps);
  if (o.output.empty()) {
    write_radial_csv(std::cout, rs);
  } else {
    write_radial_csv(fs::path(o.output), rs);
  }
}

void cmd_fit(const Options& o) {
  const FrequencyBand band = parse_band(o.band);
  RadialSpectrum rs;
  if (o.inputs.size() == 1 && fs::path(o.inputs.front()).extension() == ".csv") {
    rs = read_radial_csv(o.inputs.front());
  } else {
    if (!(o.pixel_size_um > 0.0)) throw CLI::ValidationError("--pixel-size-um", "required for image input");
    rs = radial_average(power_spectrum_2d(pooled_field(o.inputs, o.pixel_size_um)));
  }
  const BesselModelParams m = fit_bessel_model(rs, band);
  nlohmann::ordered_json j;
  j["lambda_per_mm"] = m.lambda.in_per_mm();
  j["nu"] = m.nu;
  j["fit_residual_log_rms"] = m.fit_residual.value_or(NAN);
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  j["ri_mm2"] = range_of_interaction(m);
  j["model_cli_percent"] = 100.0 * model_band_integral(m, band);
  j["cli_percent"] = cloudiness_index(rs, band);
  const std::string text = j.dump(2) + "\n";
  if (o.output.empty()) {
    std::cout << text;
  } else {
    open_out(o.output) << text;
  }
}

void cmd_synth(const Options& o) {
  const double px = o.pixel_size_um > 0.0 ? o.pixel_size_um : 0.5 * o.radius_um;
  const SynthConfig cfg =
      square_config(o.size, px, o.na, InverseLength::per_mm(o.lambda_per_mm), o.radius_um, o.seed);
  const GrammageField f = synth_nonwoven(cfg);

  const fs::path pgm = o.output.empty() ? fs::path("field.pgm") : fs::path(o.output);
  const io::GrayScaling s = io::write_pgm16(pgm, f.grid());
  std::ostringstream desc;
  desc.imbue(std::locale::classic());
  desc << std::setprecision(17) << "pixel_size_um = " << px << "\n"
       << "n_a_per_mm2 = " << o.na << "\n"
       << "lambda_per_mm = " << o.lambda_per_mm << "\n"
       << "radius_um = " << o.radius_um << "\n"
       << "seed = " << o.seed << "\n"
       << "generator = " << kSynthGenerator << "\n";
  {
    auto side = open_out(pgm.string() + ".txt");
    side << std::setprecision(17) << "# value = offset + scale * gray\n"
         << "offset = " << s.offset << "\n"
         << "scale = " << s.scale << "\n"
         << desc.str();
  }
  fs::path raw = pgm;
  raw.replace_extension(".f32");
  io::write_f32_raster(raw, f.grid(), desc.str());
  std::cerr << "wrote " << pgm.string() << " and " << raw.string() << "\n";
}

void cmd_pyramid(const Options& o) {
  const std::vector<int> js = parse_levels(o.levels.empty() ? "9..12" : o.levels);
  std::vector<DogLevel> levels;
  for (int j : js) levels.push_back(DogLevel::level(j));
  std::vector<double> msp(levels.size(), NAN);
  if (!o.inputs.empty()) msp = msp_spatial_levels(pooled_field(o.inputs, o.pixel_size_um), levels);

  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "j,sigma_um,rho_max_per_um,norm_per_mm,msp_permille\n" << std::setprecision(10);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const DogLevel& l = levels[i];
    out << l.j << "," << l.sigma_um << "," << rho_max(l).in_per_um() << "," << 1000.0 * dog_norm_per_um(l) << ",";
    if (std::isfinite(msp[i])) out << 1000.0 * msp[i];
    out << "\n";
  }
  if (o.output.empty()) {
    std::cout << out.str();
  } else {
    open_out(o.output) << out.str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cloudiness of nonwovens and paper from transmission images"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML-style file with one [subcommand] section per command; flags override it");
  Options o;

  auto add_common = [&](CLI::App* c, bool need_inputs) {
    auto* in = c->add_option("inputs", o.inputs, "Images (PGM/PNG) or .f32 fields");
    if (need_inputs) in->required();
    c->add_option("-o,--output", o.output, "Output path (stdout when omitted)");
  };
  auto add_pixel = [&](CLI::App* c, bool required) {
    auto* opt = c->add_option("--pixel-size-um", o.pixel_size_um, "Pixel size in micrometers")
                    ->check(CLI::PositiveNumber);
    if (required) opt->required();
  };

  auto* analyze = app.add_subcommand("analyze", "CLI, sector CLIs, model fit and MSP report (JSON)");
  add_common(analyze, true);
  add_pixel(analyze, true);
  analyze->add_option("--band", o.band, "Band rho0:rho1 in 1/um (circular frequency)")->capture_default_str();
  analyze->add_option("--sectors", o.sectors, "Angular sectors lo:hi in radians")->delimiter(',');
  analyze->add_flag("--fit", o.fit, "Fit the Bessel model and report RI");
  analyze->add_option("--levels", o.levels, "DoG levels for MSP, a..b or a,b,c");

  auto* spectrum = app.add_subcommand("spectrum", "Rotation-averaged power spectrum (CSV)");
  add_common(spectrum, true);
  add_pixel(spectrum, true);
  spectrum->add_option("--sector", o.sector, "Average over the sector lo:hi only");
  spectrum->add_option("--raster", o.raster, "Also write the 2D spectrum as a float32 raster");

  auto* fit = app.add_subcommand("fit", "Fit the Bessel model to a radial CSV or images (JSON)");
  add_common(fit, true);
  add_pixel(fit, false);
  fit->add_option("--band", o.band, "Fit band rho0:rho1 in 1/um")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Synthetic nonwoven from the Poisson segment model");
  synth->add_option("-o,--output", o.output, "Output PGM path (default field.pgm)");
  add_pixel(synth, false);
  synth->add_option("--na", o.na, "Segments per mm^2")->required()->check(CLI::PositiveNumber);
  synth->add_option("--lambda-per-mm", o.lambda_per_mm, "Inverse mean fiber length, 1/mm")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--radius-um", o.radius_um, "Fiber radius, um")->required()->check(CLI::PositiveNumber);
  synth->add_option("--size", o.size, "Field size in pixels")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  auto* pyramid = app.add_subcommand("pyramid", "DoG level table with optional MSP (CSV)");
  add_common(pyramid, false);
  add_pixel(pyramid, false);
  pyramid->add_option("--levels", o.levels, "Levels a..b or a,b,c (default 9..12)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (pyramid->parsed() && !o.inputs.empty() && !(o.pixel_size_um > 0.0)) {
      throw CLI::ValidationError("--pixel-size-um", "required when images are given");
    }
    if (analyze->parsed()) cmd_analyze(o);
    if (spectrum->parsed()) cmd_spectrum(o);
    if (fit->parsed()) cmd_fit(o);
    if (synth->parsed()) cmd_synth(o);
    if (pyramid->parsed()) cmd_pyramid(o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kExitNumerical : kExitData;
  }
  return 0;
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cloudindex/analysis.hpp"
#include "cloudindex/error.hpp"
#include "cloudindex/image_io.hpp"
#include "cloudindex/synth.hpp"
#include "helpers.hpp"

using namespace cloudindex;
namespace fs = std::filesystem;

namespace {

fs::path dir() {
  const fs::path d = fs::temp_directory_path() / "cloudindex_analysis_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes a transmission-like 8-bit image of a synthetic field.
fs::path image(const std::string& name, std::uint64_t seed, std::size_t n = 128) {
  const GrammageField f = synth_nonwoven(square_config(n, 2.0, 400.0, InverseLength::per_mm(5.0), 6.0, seed));
  Grid2D<double> g(f.width(), f.height());
  for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = std::round(128.0 * std::exp(-0.2 * f.values()[i]));
  const fs::path p = dir() / name;
  io::write_pgm(p, g, 255);
  return p;
}

int run(const std::string& args) {
  const int rc = std::system((std::string(CLOUDINDEX_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("run_analysis writes a deterministic report and the radial CSV") {
  AnalysisConfig cfg;
  cfg.image_paths = {image("a.pgm", 1), image("b.pgm", 2), image("c.pgm", 3)};
  cfg.pixel_size_um = 2.0;
  cfg.band = {InverseLength::per_um(0.05), InverseLength::per_um(0.5)};
  cfg.sectors = std::vector<Sector>{{-0.7854, 0.7854}, {0.7854, 3.14159}};
  cfg.fit = true;
  cfg.pyramid_levels = std::vector<int>{5, 6};
  cfg.output_path = dir() / "r1.json";
  const AnalysisResult a = run_analysis(cfg);
  cfg.output_path = dir() / "r2.json";
  run_analysis(cfg);
  CHECK(slurp(dir() / "r1.json") == slurp(dir() / "r2.json"));
  CHECK(fs::exists(dir() / "r1.radial.csv"));

  const auto j = nlohmann::json::parse(slurp(dir() / "r1.json"));
  CHECK(j["cli_percent"].get<double>() == testutil::approx(a.report.cli_percent));
  CHECK(j["band"]["wavelength0_um"].get<double>() == testutil::approx(2.0 * 3.141592653589793 / 0.05));
  CHECK(j["sectors"].size() == 2);
  CHECK(j["model"]["lambda_per_mm"].get<double>() > 0.0);
  CHECK(j["model"]["nu_stderr"].is_number());
  CHECK(j["ri_mm2"].get<double>() > 0.0);
  CHECK(j["msp"].size() == 2);
  CHECK(j["cli_stderr_percent"].is_number());
  CHECK(j["inputs"]["image_count"] == 3);
  CHECK(a.report.cli_percent > 0.0);
  CHECK(a.report.cli_percent < 100.0);
}

TEST_CASE("run_analysis reports the failing file") {
  AnalysisConfig cfg;
  cfg.pixel_size_um = 2.0;
  cfg.image_paths = {image("a.pgm", 1), dir() / "nope.pgm"};
  try {
    run_analysis(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
    CHECK(std::string(e.what()).find("nope.pgm") != std::string::npos);
  }
  cfg.image_paths = {image("a.pgm", 1), image("small.pgm", 4, 64)};
  try {
    run_analysis(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
    CHECK(std::string(e.what()).find("128x128") != std::string::npos);
    CHECK(std::string(e.what()).find("64x64") != std::string::npos);
  }
  cfg.image_paths.clear();
  CHECK_THROWS_AS(run_analysis(cfg), Error);
}

TEST_CASE("command line exit codes") {
  const std::string a = image("a.pgm", 1).string();
  const std::string out = (dir() / "cli.json").string();
  CHECK(run("analyze --pixel-size-um 2 " + a + " --band 0.05:0.5 -o " + out) == 0);
  CHECK(fs::exists(out));
  CHECK(run("analyze " + a) == 2);
  CHECK(run("analyze --pixel-size-um 2 --band nonsense " + a) == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("analyze --pixel-size-um 2 " + (dir() / "nope.pgm").string()) == 3);
  // a band beyond the Nyquist range is a data error
  CHECK(run("analyze --pixel-size-um 2 --band 0.5:50 " + a) == 3);

  const std::string field = (dir() / "syn.pgm").string();
  CHECK(run("synth --na 400 --lambda-per-mm 5 --radius-um 6 --size 128 --seed 3 -o " + field) == 0);
  CHECK(fs::exists(dir() / "syn.f32"));
  CHECK(fs::exists(dir() / "syn.pgm.txt"));
  CHECK(run("spectrum --pixel-size-um 3 " + (dir() / "syn.f32").string() + " -o " + (dir() / "s.csv").string()) == 0);
  CHECK(run("fit --band 0.03:0.9 " + (dir() / "s.csv").string()) == 0);
  CHECK(run("pyramid --levels 7..9 --pixel-size-um 3 " + (dir() / "syn.f32").string()) == 0);

  std::ofstream(dir() / "run.toml") << "[analyze]\npixel-size-um = 2\nband = \"0.05:0.5\"\n";
  CHECK(run("--config " + (dir() / "run.toml").string() + " analyze " + a) == 0);
}

TEST_CASE("synthetic field survives the float raster round trip bit for bit") {
  const GrammageField f = synth_nonwoven(square_config(64, 2.0, 400.0, InverseLength::per_mm(5.0), 6.0, 9));
  io::write_f32_raster(dir() / "rt.f32", f.grid(), "");
  const io::F32Raster r = io::read_f32_raster(dir() / "rt.f32");
  for (std::size_t i = 0; i < r.values.size(); ++i) CHECK(r.values.values()[i] == static_cast<float>(f.values()[i]));
}

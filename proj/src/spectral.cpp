#include "cloudindex/spectral.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "cloudindex/error.hpp"
#include "cloudindex/image_io.hpp"
#include "fft.hpp"

namespace cloudindex {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Radius of lattice point (sx, sy) in units of the radial step. For the larger
// image dimension the scale factor is exactly 1, so axis radii are exact integers.
struct LatticeGeometry {
  double scale_x, scale_y;
  explicit LatticeGeometry(const PowerSpectrum2D& ps) {
    const double step = ps.radial_step();
    scale_x = ps.freq_step_x == step ? 1.0 : ps.freq_step_x / step;
    scale_y = ps.freq_step_y == step ? 1.0 : ps.freq_step_y / step;
  }
  std::size_t bin(long sx, long sy) const {
    const double ux = static_cast<double>(sx) * scale_x;
    const double uy = static_cast<double>(sy) * scale_y;
    return static_cast<std::size_t>(std::floor(std::sqrt(ux * ux + uy * uy) + 1e-9));
  }
};

std::size_t bin_count(const PowerSpectrum2D& ps) {
  const LatticeGeometry geo(ps);
  const long hx = static_cast<long>(ps.width() / 2);
  const long hy = static_cast<long>(ps.height() / 2);
  return geo.bin(hx, hy) + 1;
}

// Accumulates per-annulus sums with a per-point weight; weight(i, j) in [0, 1].
template <typename Weight>
void accumulate(const PowerSpectrum2D& ps, Weight&& weight, std::vector<double>& wsum,
                std::vector<double>& vsum, std::vector<std::size_t>& full_count,
                std::vector<std::size_t>& hit_count) {
  const LatticeGeometry geo(ps);
  const std::size_t nb = bin_count(ps);
  wsum.assign(nb, 0.0);
  vsum.assign(nb, 0.0);
  full_count.assign(nb, 0);
  hit_count.assign(nb, 0);
  for (std::size_t j = 0; j < ps.height(); ++j) {
    const long sy = ps.index_y(j);
    for (std::size_t i = 0; i < ps.width(); ++i) {
      const long sx = ps.index_x(i);
      if (sx == 0 && sy == 0) continue;
      const std::size_t b = geo.bin(sx, sy);
      const double w = weight(i, j);
      ++full_count[b];
      if (w > 0.0) {
        ++hit_count[b];
        wsum[b] += w;
        vsum[b] += w * ps.values(i, j);
      }
    }
  }
}

double mirror_angle(double phi) { return phi > 0.0 ? phi - std::numbers::pi : phi + std::numbers::pi; }

void check_sector(Sector s) {
  const double pi = std::numbers::pi;
  if (!(s.phi_lo >= -pi && s.phi_lo < s.phi_hi && s.phi_hi <= pi)) {
    throw Error(ErrorKind::InvalidSectors, "sector must satisfy -pi <= lo < hi <= pi, got [" +
                                               std::to_string(s.phi_lo) + ", " + std::to_string(s.phi_hi) + "]");
  }
}

double sector_weight(const PowerSpectrum2D& ps, std::size_t i, std::size_t j, Sector s) {
  const double phi = std::atan2(ps.xi_y(j), ps.xi_x(i));
  return 0.5 * in_sector(phi, s) + 0.5 * in_sector(mirror_angle(phi), s);
}

}  // namespace

bool in_sector(double phi, Sector s) noexcept {
  if (phi < s.phi_lo) return false;
  return phi < s.phi_hi || (s.phi_hi >= std::numbers::pi && phi <= s.phi_hi);
}

PowerSpectrum2D power_spectrum_2d_raw(const Grid2D<double>& values, double pixel_size_um, bool zero_dc) {
  const std::size_t nx = values.width();
  const std::size_t ny = values.height();
  detail::Fft2D fft(nx, ny);
  auto buf = fft.data();
  auto src = values.values();
  for (std::size_t k = 0; k < src.size(); ++k) buf[k] = src[k];
  fft.forward();

  PowerSpectrum2D ps;
  ps.values = Grid2D<double>(nx, ny);
  ps.freq_step_x = kTwoPi / (static_cast<double>(nx) * pixel_size_um);
  ps.freq_step_y = kTwoPi / (static_cast<double>(ny) * pixel_size_um);
  ps.dc_zeroed = zero_dc;
  const double norm = pixel_size_um * pixel_size_um / (kTwoPi * static_cast<double>(nx) * static_cast<double>(ny));
  const long hx = static_cast<long>(nx / 2);
  const long hy = static_cast<long>(ny / 2);
  for (std::size_t ky = 0; ky < ny; ++ky) {
    const auto j = static_cast<std::size_t>(detail::signed_index(ky, ny) + hy);
    for (std::size_t kx = 0; kx < nx; ++kx) {
      const auto i = static_cast<std::size_t>(detail::signed_index(kx, nx) + hx);
      ps.values(i, j) = norm * std::norm(buf[ky * nx + kx]);
    }
  }
  if (zero_dc) ps.values(static_cast<std::size_t>(hx), static_cast<std::size_t>(hy)) = 0.0;
  return ps;
}

PowerSpectrum2D power_spectrum_2d(const GrammageField& f) {
  return power_spectrum_2d_raw(f.grid(), f.pixel_size_um(), true);
}

double total_power(const PowerSpectrum2D& ps) {
  double s = 0.0;
  for (double v : ps.values.values()) s += v;
  return s * ps.freq_step_x * ps.freq_step_y / kTwoPi;
}

RadialSpectrum radial_average(const PowerSpectrum2D& ps) {
  std::vector<double> wsum, vsum;
  std::vector<std::size_t> full, hit;
  accumulate(ps, [](std::size_t, std::size_t) { return 1.0; }, wsum, vsum, full, hit);
  RadialSpectrum rs;
  rs.bin_width = ps.radial_step();
  for (std::size_t b = 0; b < full.size(); ++b) {
    if (full[b] == 0) continue;
    rs.bin_centers.push_back((static_cast<double>(b) + 0.5) * rs.bin_width);
    rs.values.push_back(vsum[b] / static_cast<double>(full[b]));
    rs.counts.push_back(full[b]);
  }
  return rs;
}

RadialSpectrum sector_average(const PowerSpectrum2D& ps, Sector sector) {
  check_sector(sector);
  std::vector<double> wsum, vsum;
  std::vector<std::size_t> full, hit;
  accumulate(ps, [&](std::size_t i, std::size_t j) { return sector_weight(ps, i, j, sector); }, wsum, vsum,
             full, hit);
  RadialSpectrum rs;
  rs.bin_width = ps.radial_step();
  rs.sector = sector;
  for (std::size_t b = 0; b < full.size(); ++b) {
    if (hit[b] == 0) continue;
    rs.bin_centers.push_back((static_cast<double>(b) + 0.5) * rs.bin_width);
    rs.values.push_back(vsum[b] / wsum[b]);
    rs.counts.push_back(hit[b]);
  }
  if (rs.bin_centers.empty()) {
    throw Error(ErrorKind::EmptySector, "no lattice point in sector [" + std::to_string(sector.phi_lo) + ", " +
                                            std::to_string(sector.phi_hi) + ")");
  }
  return rs;
}

RadialSpectrum sector_weighted_spectrum(const PowerSpectrum2D& ps, Sector sector) {
  check_sector(sector);
  std::vector<double> wsum, vsum;
  std::vector<std::size_t> full, hit;
  accumulate(ps, [&](std::size_t i, std::size_t j) { return sector_weight(ps, i, j, sector); }, wsum, vsum,
             full, hit);
  RadialSpectrum rs;
  rs.bin_width = ps.radial_step();
  rs.sector = sector;
  for (std::size_t b = 0; b < full.size(); ++b) {
    if (full[b] == 0) continue;
    rs.bin_centers.push_back((static_cast<double>(b) + 0.5) * rs.bin_width);
    rs.values.push_back(vsum[b] / static_cast<double>(full[b]));
    rs.counts.push_back(full[b]);
  }
  return rs;
}

void write_radial_csv(std::ostream& out, const RadialSpectrum& rs) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "rho_per_um,k1_um2,count\n";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    os << rs.bin_centers[i] << ',' << rs.values[i] << ',' << rs.counts[i] << '\n';
  }
  out << os.str();
}

void write_radial_csv(const std::filesystem::path& path, const RadialSpectrum& rs) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_radial_csv(out, rs);
}

RadialSpectrum read_radial_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("rho_per_um,k1_um2", 0) != 0) {
    throw Error(ErrorKind::ParseError, path.string() + ": expected header rho_per_um,k1_um2,count");
  }
  RadialSpectrum rs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    double rho = 0, k = 0;
    std::size_t count = 1;
    char c1 = 0, c2 = 0;
    ls >> rho >> c1 >> k;
    if (!ls || c1 != ',') {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (ls >> c2 && c2 == ',') ls >> count;
    if (!rs.bin_centers.empty() && !(rho > rs.bin_centers.back())) {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(lineno) + ": rho not increasing");
    }
    rs.bin_centers.push_back(rho);
    rs.values.push_back(k);
    rs.counts.push_back(count);
  }
  if (rs.size() >= 2) {
    // uniform spacing is recovered; nonuniform files keep bin_width = 0
    const double step = rs.bin_centers[1] - rs.bin_centers[0];
    bool uniform = true;
    for (std::size_t i = 1; i < rs.size() && uniform; ++i) {
      const double d = rs.bin_centers[i] - rs.bin_centers[i - 1];
      uniform = std::abs(std::remainder(d, step)) < 1e-6 * step;
    }
    if (uniform) rs.bin_width = step;
  }
  return rs;
}

void write_spectrum_raster(const std::filesystem::path& path, const PowerSpectrum2D& ps) {
  std::ostringstream side;
  side.imbue(std::locale::classic());
  side.precision(17);
  side << "quantity = power_spectrum_um2\n"
       << "freq_step_x_per_um = " << ps.freq_step_x << "\n"
       << "freq_step_y_per_um = " << ps.freq_step_y << "\n"
       << "zero_frequency_index = " << ps.width() / 2 << " " << ps.height() / 2 << "\n"
       << "dc_zeroed = " << (ps.dc_zeroed ? "true" : "false") << "\n";
  io::write_f32_raster(path, ps.values, side.str());
}

}  // namespace cloudindex

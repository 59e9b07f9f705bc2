#include "cloudindex/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cloudindex/error.hpp"

namespace cloudindex {

namespace {

constexpr double kCellUm = 250.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, long cx, long cy) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(cx));
  return splitmix64(h ^ (static_cast<std::uint64_t>(cy) * 0xd6e8feb86659fd93ULL));
}

void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); }

struct Kernel {
  std::vector<int> half_width;  // per row dy = -r..r
  int r = 0;
  std::size_t count = 0;
};

Kernel disk_kernel(double radius_px) {
  Kernel k;
  k.r = static_cast<int>(std::floor(radius_px));
  for (int dy = -k.r; dy <= k.r; ++dy) {
    const double rem = radius_px * radius_px - static_cast<double>(dy) * dy;
    const int w = static_cast<int>(std::floor(std::sqrt(std::max(rem, 0.0)) + 1e-12));
    k.half_width.push_back(w);
    k.count += static_cast<std::size_t>(2 * w + 1);
  }
  return k;
}

}  // namespace

void SynthConfig::validate() const {
  if (!(width_um > 0.0 && height_um > 0.0 && nx > 0 && ny > 0)) invalid("window and grid must be positive");
  if (!(n_a_per_mm2 > 0.0 && std::isfinite(n_a_per_mm2))) invalid("N_A must be positive");
  if (!(lambda.in_per_um() > 0.0 && std::isfinite(lambda.in_per_um()))) invalid("lambda must be positive");
  if (!(radius_um > 0.0 && std::isfinite(radius_um))) invalid("radius must be positive");
  const double px = width_um / static_cast<double>(nx);
  const double py = height_um / static_cast<double>(ny);
  if (std::abs(px - py) > 1e-9 * px) {
    invalid("pixels must be square, got " + std::to_string(px) + " x " + std::to_string(py) + " um");
  }
  if (px > radius_um) {
    invalid("pixel size " + std::to_string(px) + " um does not resolve R = " + std::to_string(radius_um) + " um");
  }
}

SynthConfig square_config(std::size_t n, double pixel_size_um, double n_a_per_mm2, InverseLength lambda,
                          double radius_um, std::uint64_t seed) {
  SynthConfig c;
  c.nx = c.ny = n;
  c.width_um = c.height_um = static_cast<double>(n) * pixel_size_um;
  c.n_a_per_mm2 = n_a_per_mm2;
  c.lambda = lambda;
  c.radius_um = radius_um;
  c.seed = seed;
  return c;
}

Rect sampling_window(const SynthConfig& cfg) {
  cfg.validate();
  const double ext = std::log(1000.0) / cfg.lambda.in_per_um() + cfg.radius_um;
  return Rect{std::floor(-ext / kCellUm) * kCellUm, std::floor(-ext / kCellUm) * kCellUm,
              std::ceil((cfg.width_um + ext) / kCellUm) * kCellUm,
              std::ceil((cfg.height_um + ext) / kCellUm) * kCellUm};
}

std::vector<Segment> sample_fiber_system(const SynthConfig& cfg) {
  const Rect w = sampling_window(cfg);
  const long cx0 = std::lround(w.x0 / kCellUm), cx1 = std::lround(w.x1 / kCellUm);
  const long cy0 = std::lround(w.y0 / kCellUm), cy1 = std::lround(w.y1 / kCellUm);
  const double mean_per_cell = cfg.n_a_per_mm2 * kCellUm * kCellUm * 1e-6;
  const double mean_length = 1.0 / cfg.lambda.in_per_um();

  std::vector<Segment> out;
  std::mt19937_64 rng;
  std::poisson_distribution<long> count(mean_per_cell);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  for (long cy = cy0; cy < cy1; ++cy) {
    for (long cx = cx0; cx < cx1; ++cx) {
      rng.seed(cell_seed(cfg.seed, cx, cy));
      count.reset();
      const long n = count(rng);
      for (long i = 0; i < n; ++i) {
        Segment s;
        s.x = (static_cast<double>(cx) + unit(rng)) * kCellUm;
        s.y = (static_cast<double>(cy) + unit(rng)) * kCellUm;
        s.angle = std::numbers::pi * unit(rng);
        s.length = expo(rng) * mean_length;
        if (s.length > 0.0) out.push_back(s);
      }
    }
  }
  return out;
}

Grid2D<double> rasterize_fiber_field(const std::vector<Segment>& segments, const SynthConfig& cfg) {
  cfg.validate();
  const double px = cfg.pixel_size_um();
  const Kernel kernel = disk_kernel(cfg.radius_um / px);
  if (kernel.count < 5) {
    throw Error(ErrorKind::KernelTooSmall, "disk of radius " + std::to_string(cfg.radius_um) + " um covers " +
                                               std::to_string(kernel.count) + " pixels of " + std::to_string(px) +
                                               " um; need at least 5");
  }
  const int pad = kernel.r;
  const long nx = static_cast<long>(cfg.nx);
  const long ny = static_cast<long>(cfg.ny);
  const long lw = nx + 2 * pad;
  const long lh = ny + 2 * pad;
  // line mass on the grid grown by the kernel radius; index (x + pad, y + pad)
  std::vector<double> line(static_cast<std::size_t>(lw * lh), 0.0);
  auto deposit = [&](long ix, long iy, double m) {
    if (ix < -pad || iy < -pad || ix >= nx + pad || iy >= ny + pad) return;
    line[static_cast<std::size_t>((iy + pad) * lw + ix + pad)] += m;
  };

  for (const Segment& s : segments) {
    // pixel-center coordinates: pixel i covers u ∈ [i − ½, i + ½)
    const double u0x = s.x / px - 0.5, u0y = s.y / px - 0.5;
    const double dx = std::cos(s.angle) * s.length / px, dy = std::sin(s.angle) * s.length / px;
    const double u1x = u0x + dx, u1y = u0y + dy;
    if (std::max(u0x, u1x) < -pad - 1 || std::min(u0x, u1x) > nx + pad ||
        std::max(u0y, u1y) < -pad - 1 || std::min(u0y, u1y) > ny + pad) {
      continue;
    }
    const bool x_major = std::abs(dx) >= std::abs(dy);
    double a0 = x_major ? u0x : u0y, a1 = x_major ? u1x : u1y;
    double b0 = x_major ? u0y : u0x, b1 = x_major ? u1y : u1x;
    if (a1 < a0) {
      std::swap(a0, a1);
      std::swap(b0, b1);
    }
    const long first = static_cast<long>(std::ceil(a0));
    const long end = static_cast<long>(std::ceil(a1));
    if (end == first) {
      const double ma = 0.5 * (a0 + a1), mb = 0.5 * (b0 + b1);
      const long ia = std::lround(ma), ib = std::lround(mb);
      x_major ? deposit(ia, ib, s.length) : deposit(ib, ia, s.length);
      continue;
    }
    const double mass = s.length / static_cast<double>(end - first);
    const double slope = (b1 - b0) / (a1 - a0);
    const long major_limit = (x_major ? nx : ny) + pad;
    for (long a = std::max(first, static_cast<long>(-pad)); a < std::min(end, major_limit); ++a) {
      const long b = std::lround(b0 + slope * (static_cast<double>(a) - a0));
      x_major ? deposit(a, b, mass) : deposit(b, a, mass);
    }
  }

  // disk filter row by row from horizontal prefix sums
  std::vector<double> prefix(static_cast<std::size_t>((lw + 1) * lh), 0.0);
  for (long y = 0; y < lh; ++y) {
    double acc = 0.0;
    for (long x = 0; x < lw; ++x) {
      acc += line[static_cast<std::size_t>(y * lw + x)];
      prefix[static_cast<std::size_t>(y * (lw + 1) + x + 1)] = acc;
    }
  }
  const double scale = 1.0 / (static_cast<double>(kernel.count) * px * px);
  Grid2D<double> out(cfg.nx, cfg.ny, 0.0);
  for (long y = 0; y < ny; ++y) {
    for (long x = 0; x < nx; ++x) {
      double s = 0.0;
      for (int ky = -kernel.r; ky <= kernel.r; ++ky) {
        const long row = y + pad + ky;
        const int w = kernel.half_width[static_cast<std::size_t>(ky + kernel.r)];
        const std::size_t base = static_cast<std::size_t>(row * (lw + 1));
        s += prefix[base + static_cast<std::size_t>(x + pad + w + 1)] - prefix[base + static_cast<std::size_t>(x + pad - w)];
      }
      out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = s * scale;
    }
  }
  return out;
}

GrammageField synth_nonwoven(const SynthConfig& cfg) {
  Grid2D<double> w = rasterize_fiber_field(sample_fiber_system(cfg), cfg);
  if (!GrammageField::standardize(w.values())) {
    throw Error(ErrorKind::DegenerateField, "synthetic field is constant (no fiber reached the window)");
  }
  return GrammageField::from_normalized(std::move(w), cfg.pixel_size_um());
}

}  // namespace cloudindex

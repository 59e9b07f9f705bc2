#include "cloudindex/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "cloudindex/error.hpp"

namespace cloudindex::io {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

long parse_header_int(std::istream& in, const fs::path& path, const char* what) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const long v = std::stol(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, path.string() + ": bad PGM " + what + " '" + tok + "'");
  }
}

GrayImage read_pgm(const fs::path& path, double pixel_size_um) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic == "P3" || magic == "P6") {
    throw Error(ErrorKind::UnsupportedImage, path.string() + ": color PNM is not supported");
  }
  if (magic != "P2" && magic != "P5") {
    throw Error(ErrorKind::ParseError, path.string() + ": not a PGM file");
  }
  const auto w = static_cast<std::size_t>(parse_header_int(in, path, "width"));
  const auto h = static_cast<std::size_t>(parse_header_int(in, path, "height"));
  const long maxval = parse_header_int(in, path, "maxval");
  if (maxval > 65535) throw Error(ErrorKind::UnsupportedImage, path.string() + ": maxval > 65535");

  GrayImage img{Grid2D<double>(w, h), pixel_size_um, static_cast<double>(maxval)};
  auto px = img.pixels.values();
  if (magic == "P2") {
    for (auto& v : px) {
      long g;
      if (!(in >> g)) throw Error(ErrorKind::ParseError, path.string() + ": truncated pixel data");
      v = static_cast<double>(g);
    }
  } else {
    const std::size_t bpp = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(w * h * bpp);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw Error(ErrorKind::ParseError, path.string() + ": truncated pixel data");
    }
    for (std::size_t i = 0; i < px.size(); ++i) {
      // 16-bit PGM samples are big-endian
      px[i] = bpp == 1 ? raw[i] : static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
  }
  return img;
}

float swap_bytes(float f) {
  auto u = std::bit_cast<std::uint32_t>(f);
  u = (u >> 24) | ((u >> 8) & 0xFF00u) | ((u << 8) & 0xFF0000u) | (u << 24);
  return std::bit_cast<float>(u);
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

GrayImage read_png(const fs::path& path, double pixel_size_um) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(ErrorKind::IoError, "cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::IoError, "libpng initialisation failed");
  }
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  if (setjmp(png_jmpbuf(png))) {
    throw Error(ErrorKind::ParseError, path.string() + ": corrupt PNG");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const auto w = png_get_image_width(png, info);
  const auto h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    throw Error(ErrorKind::UnsupportedImage,
                path.string() + ": only single-channel grayscale PNG is accepted");
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> buf(rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (std::size_t y = 0; y < h; ++y) rows[y] = buf.data() + y * rowbytes;
  png_read_image(png, rows.data());

  const bool wide = depth == 16;
  GrayImage img{Grid2D<double>(w, h), pixel_size_um, wide ? 65535.0 : 255.0};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (wide) {
        std::uint16_t v;
        std::memcpy(&v, rows[y] + 2 * x, 2);
        img.pixels(x, y) = v;
      } else {
        img.pixels(x, y) = rows[y][x];
      }
    }
  }
  return img;
}

std::map<std::string, std::string> read_sidecar(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open sidecar " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

}  // namespace

GrayImage read_gray_image(const fs::path& path, double pixel_size_um) {
  if (!fs::exists(path)) throw Error(ErrorKind::IoError, "no such file: " + path.string());
  const std::string ext = lower_ext(path);
  GrayImage img = ext == ".png" ? read_png(path, pixel_size_um) : read_pgm(path, pixel_size_um);
  return img;
}

void write_pgm(const fs::path& path, const Grid2D<double>& values, int max_value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "P5\n" << values.width() << " " << values.height() << "\n" << max_value << "\n";
  const bool wide = max_value > 255;
  std::vector<unsigned char> raw;
  raw.reserve(values.size() * (wide ? 2 : 1));
  for (double v : values.values()) {
    const auto g = static_cast<unsigned>(std::clamp(std::lround(v), 0L, static_cast<long>(max_value)));
    if (wide) raw.push_back(static_cast<unsigned char>(g >> 8));
    raw.push_back(static_cast<unsigned char>(g & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

GrayScaling write_pgm16(const fs::path& path, const Grid2D<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.values().begin(), values.values().end());
  const double span = *hi - *lo;
  GrayScaling s{*lo, span > 0 ? span / 65535.0 : 1.0};
  Grid2D<double> gray(values.width(), values.height());
  auto src = values.values();
  auto dst = gray.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - s.offset) / s.scale;
  write_pgm(path, gray, 65535);
  return s;
}

void write_f32_raster(const fs::path& path, const Grid2D<double>& values, const std::string& sidecar_text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  std::vector<float> buf(values.size());
  std::transform(values.values().begin(), values.values().end(), buf.begin(),
                 [](double v) { return static_cast<float>(v); });
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& f : buf) f = swap_bytes(f);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());

  std::ofstream side(path.string() + ".txt");
  if (!side) throw Error(ErrorKind::IoError, "cannot write sidecar for " + path.string());
  side << "format = float32_le\n"
       << "width = " << values.width() << "\n"
       << "height = " << values.height() << "\n"
       << sidecar_text;
}

F32Raster read_f32_raster(const fs::path& path) {
  const auto kv = read_sidecar(path.string() + ".txt");
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const std::string* w = get("width");
  const std::string* h = get("height");
  if (!w || !h) throw Error(ErrorKind::ParseError, path.string() + ".txt: width/height missing");
  if (const auto* fmt = get("format"); fmt && *fmt != "float32_le") {
    throw Error(ErrorKind::UnsupportedImage, path.string() + ": unknown raster format " + *fmt);
  }
  std::size_t width = 0, height = 0;
  try {
    width = std::stoul(*w);
    height = std::stoul(*h);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, path.string() + ".txt: bad dimensions");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<float> buf(width * height);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != buf.size() * sizeof(float)) {
    throw Error(ErrorKind::ParseError, path.string() + ": truncated raster");
  }
  F32Raster r{Grid2D<double>(width, height), 0.0};
  auto dst = r.values.values();
  for (std::size_t i = 0; i < buf.size(); ++i) {
    float f = buf[i];
    if constexpr (std::endian::native == std::endian::big) {
      f = swap_bytes(f);
    }
    dst[i] = f;
  }
  if (const auto* ps = get("pixel_size_um")) {
    try {
      r.pixel_size_um = std::stod(*ps);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, path.string() + ".txt: bad pixel_size_um");
    }
  }
  return r;
}

GrammageField load_field(const fs::path& path, double pixel_size_um) {
  if (!fs::exists(path)) throw Error(ErrorKind::IoError, "no such file: " + path.string());
  if (lower_ext(path) == ".f32") {
    F32Raster r = read_f32_raster(path);
    return GrammageField::from_raw(std::move(r.values), pixel_size_um);
  }
  return normalize_grammage(read_gray_image(path, pixel_size_um));
}

}  // namespace cloudindex::io

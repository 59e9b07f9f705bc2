#include <doctest.h>

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "cloudindex/error.hpp"
#include "cloudindex/image_io.hpp"
#include "helpers.hpp"

using namespace cloudindex;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("cloudindex_io_" + name); }

void write_png(const fs::path& p, int w, int h, int color, int depth, const std::vector<unsigned char>& raw) {
  std::FILE* fp = std::fopen(p.c_str(), "wb");
  REQUIRE(fp);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, depth, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t row = raw.size() / static_cast<std::size_t>(h);
  for (int y = 0; y < h; ++y) png_write_row(png, const_cast<unsigned char*>(raw.data() + y * row));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidParams;
}

}  // namespace

TEST_CASE("PGM round trips") {
  Grid2D<double> g(3, 2, {1, 2, 3, 250, 255, 7});
  io::write_pgm(tmp("a.pgm"), g, 255);
  GrayImage img = io::read_gray_image(tmp("a.pgm"), 4.0);
  CHECK(img.width() == 3);
  CHECK(img.max_value == 255.0);
  CHECK(img.pixel_size_um == 4.0);
  for (std::size_t i = 0; i < 6; ++i) CHECK(img.pixels.values()[i] == g.values()[i]);

  Grid2D<double> w(2, 2, {1, 40000, 65535, 256});
  io::write_pgm(tmp("b.pgm"), w, 65535);
  img = io::read_gray_image(tmp("b.pgm"), 1.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(img.pixels.values()[i] == w.values()[i]);
  CHECK(count_saturated(img) == 1);

  std::ofstream(tmp("c.pgm")) << "P2\n# comment\n2 2\n15\n1 2\n3 15\n";
  img = io::read_gray_image(tmp("c.pgm"), 1.0);
  CHECK(img.pixels(1, 1) == 15.0);
  CHECK(img.max_value == 15.0);

  std::ofstream(tmp("d.pgm")) << "P6\n2 2\n255\n";
  CHECK_THROWS_AS(io::read_gray_image(tmp("d.pgm"), 1.0), Error);
  CHECK(kind_of([] { io::read_gray_image(tmp("missing.pgm"), 1.0); }) == ErrorKind::IoError);
}

TEST_CASE("PNG input") {
  write_png(tmp("g8.png"), 2, 2, PNG_COLOR_TYPE_GRAY, 8, {10, 20, 30, 255});
  GrayImage img = io::read_gray_image(tmp("g8.png"), 2.0);
  CHECK(img.pixels(0, 0) == 10.0);
  CHECK(img.pixels(1, 1) == 255.0);
  CHECK(img.max_value == 255.0);

  write_png(tmp("g16.png"), 2, 1, PNG_COLOR_TYPE_GRAY, 16, {0x12, 0x34, 0xff, 0xff});
  img = io::read_gray_image(tmp("g16.png"), 2.0);
  CHECK(img.pixels(0, 0) == 0x1234);
  CHECK(img.pixels(1, 0) == 65535.0);

  write_png(tmp("rgb.png"), 1, 1, PNG_COLOR_TYPE_RGB, 8, {1, 2, 3});
  CHECK(kind_of([] { io::read_gray_image(tmp("rgb.png"), 1.0); }) == ErrorKind::UnsupportedImage);
}

TEST_CASE("float raster round trip") {
  const GrammageField f = testutil::noise_field(17, 9, 2.5, 4);
  io::write_f32_raster(tmp("f.f32"), f.grid(), "pixel_size_um = 2.5\n");
  const io::F32Raster r = io::read_f32_raster(tmp("f.f32"));
  CHECK(r.values.width() == 17);
  CHECK(r.values.height() == 9);
  CHECK(r.pixel_size_um == 2.5);
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    CHECK(r.values.values()[i] == static_cast<double>(static_cast<float>(f.values()[i])));
  }
  const GrammageField back = io::load_field(tmp("f.f32"), 2.5);
  for (std::size_t i = 0; i < back.values().size(); ++i) CHECK(back.values()[i] == testutil::approx(f.values()[i]).epsilon(1e-6));

  std::ofstream(tmp("short.f32"), std::ios::binary) << "abcd";
  std::ofstream(tmp("short.f32.txt")) << "format = float32_le\nwidth = 4\nheight = 4\n";
  CHECK_THROWS_AS(io::read_f32_raster(tmp("short.f32")), Error);
}

TEST_CASE("16-bit export records its scaling") {
  const GrammageField f = testutil::noise_field(16, 16, 1.0, 6);
  const io::GrayScaling s = io::write_pgm16(tmp("s.pgm"), f.grid());
  const GrayImage img = io::read_gray_image(tmp("s.pgm"), 1.0);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    CHECK(s.offset + s.scale * img.pixels.values()[i] == testutil::approx(f.values()[i]).scale(1.0).epsilon(s.scale));
  }
}

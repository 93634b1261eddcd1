#include "recourse/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>

#include "recourse/core.hpp"

namespace recourse {

namespace {

void png_rows(const std::string& path, std::size_t w, std::size_t h, int color, std::size_t channels,
              const std::uint8_t* data) {
  if (w == 0 || h == 0) throw BadDims("empty image");
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < h; ++r)
    png_write_row(png, const_cast<png_bytep>(data + r * w * channels));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void check(std::size_t w, std::size_t h, std::size_t channels, std::size_t n) {
  if (w * h * channels != n) throw BadDims("image buffer size mismatch");
}

}  // namespace

void write_png(const std::string& path, const RgbImage& img) {
  check(img.width, img.height, 3, img.rgb.size());
  png_rows(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.rgb.data());
}

void write_png(const std::string& path, const GrayImage& img) {
  check(img.width, img.height, 1, img.data.size());
  png_rows(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 1, img.data.data());
}

void write_ppm(const std::string& path, const RgbImage& img) {
  check(img.width, img.height, 3, img.rgb.size());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << "P6\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (!os) throw IoError("short write to " + path);
}

void write_pgm(const std::string& path, const GrayImage& img) {
  check(img.width, img.height, 1, img.data.size());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << "P5\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (!os) throw IoError("short write to " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace recourse

#pragma once
// 8-bit image writers: PNG (libpng), binary PPM and PGM.

#include <cstdint>
#include <string>
#include <vector>

namespace recourse {

struct RgbImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

struct GrayImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> data;  // row-major
};

void write_png(const std::string& path, const RgbImage& img);
void write_png(const std::string& path, const GrayImage& img);
void write_ppm(const std::string& path, const RgbImage& img);
void write_pgm(const std::string& path, const GrayImage& img);
std::vector<std::uint8_t> read_file(const std::string& path);

}  // namespace recourse

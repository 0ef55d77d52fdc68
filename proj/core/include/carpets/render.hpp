#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carpets/spec.hpp"

namespace carpets {

// Row-major grayscale raster, top row first; 0 = covered, 255 = empty.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
};

// Rasterize the depth-(level+extra_depth) cover onto the n^level x n^level
// occupancy grid.  A pixel is black iff its closed grid cell meets the cover.
RasterImage render_occupancy(const CarpetSpec& spec, const TranslationVector& t,
                             int level, int extra_depth, std::uint64_t budget,
                             int threads = 0);

std::string pgm_bytes(const RasterImage& image);

std::uint64_t black_pixel_count(const RasterImage& image);

}  // namespace carpets

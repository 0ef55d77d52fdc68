#include "carpets/render.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "carpets/errors.hpp"
#include "enumerate.hpp"

namespace carpets {

RasterImage render_occupancy(const CarpetSpec& spec,
                             const TranslationVector& t, int level,
                             int extra_depth, std::uint64_t budget,
                             int threads) {
  validate_translations(spec, t);
  if (level < 1) throw SpecError("scale level must be positive");
  if (extra_depth < 0) throw SpecError("extra depth must be nonnegative");
  long double bits = level * std::log2(static_cast<long double>(spec.n()));
  if (bits > 13 + 1e-9) throw SpecError("image too large");
  std::uint64_t side = 1;
  for (int i = 0; i < level; ++i) side *= static_cast<std::uint64_t>(spec.n());
  if (side > 8192) throw SpecError("image too large");

  detail::ScaledOffsets offsets = detail::scale_offsets(spec, t);
  detail::GridJob job;
  job.m = spec.m();
  job.n = spec.n();
  job.grid_level = level;
  job.depth = level + extra_depth;
  job.rule = detail::CellRule::ClosedTouch;
  job.Q = offsets.Q;
  for (const auto& [i, j] : spec.rects()) {
    job.sym_tnum.push_back(offsets.numerators.at(i));
    job.sym_row.push_back(j - 1);
  }
  std::vector<std::uint16_t> all(job.sym_tnum.size());
  std::iota(all.begin(), all.end(), 0);
  job.allowed.assign(job.depth, all);
  job.node_budget = budget;
  job.threads = threads;

  detail::CellBitmap cells(side, side);
  detail::mark_cover(job, cells);

  RasterImage img;
  img.width = static_cast<int>(side);
  img.height = static_cast<int>(side);
  img.pixels.resize(side * side);
  // Grid cell (0,0) sits at the bottom-left; image rows run top-first.
  for (std::uint64_t py = 0; py < side; ++py) {
    std::uint64_t cy = side - 1 - py;
    for (std::uint64_t px = 0; px < side; ++px)
      img.pixels[py * side + px] = cells.test(px, cy) ? 0 : 255;
  }
  return img;
}

std::string pgm_bytes(const RasterImage& img) {
  std::ostringstream header;
  header << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::string out = header.str();
  out.append(reinterpret_cast<const char*>(img.pixels.data()),
             img.pixels.size());
  return out;
}

std::uint64_t black_pixel_count(const RasterImage& img) {
  std::uint64_t count = 0;
  for (unsigned char p : img.pixels)
    if (p == 0) ++count;
  return count;
}

}  // namespace carpets

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "carpets/rational.hpp"

namespace carpets {
class CarpetSpec;
struct TranslationVector;
}  // namespace carpets

namespace carpets::detail {

using u128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t& state);

// Column offsets as integer numerators over their least common denominator.
struct ScaledOffsets {
  BigInt Q;
  std::map<int, BigInt> numerators;
};
ScaledOffsets scale_offsets(const CarpetSpec& spec, const TranslationVector& t);

// Atomic occupancy bitmap over a 2-D cell grid.  Marking is idempotent, so
// the final marked set does not depend on the thread schedule.
class CellBitmap {
 public:
  CellBitmap(std::uint64_t width, std::uint64_t height);
  void set(std::uint64_t x, std::uint64_t y);
  bool test(std::uint64_t x, std::uint64_t y) const;
  void set_row_range(std::uint64_t x0, std::uint64_t x1, std::uint64_t y);
  bool row_range_all_set(std::uint64_t x0, std::uint64_t x1,
                         std::uint64_t y) const;
  std::uint64_t count() const;
  std::uint64_t width() const { return width_; }
  std::uint64_t height() const { return height_; }

 private:
  std::uint64_t width_ = 0, height_ = 0, words_per_row_ = 0;
  std::unique_ptr<std::atomic<std::uint64_t>[]> bits_;
};

// ClosedTouch counts a cell as occupied when the closed rectangle meets the
// half-open cell at all (grid-line touches included); Interior only when the
// intersection has positive area.
enum class CellRule { ClosedTouch, Interior };

// Expansion job over the rectangle alphabet: words of length `depth`, cells of
// side n^-grid_level.  allowed[d] lists the usable symbols at position d.
struct GridJob {
  int m = 0, n = 0;
  int grid_level = 0;
  int depth = 0;
  CellRule rule = CellRule::ClosedTouch;
  BigInt Q;                      // common denominator of the column offsets
  std::vector<BigInt> sym_tnum;  // per-symbol offset numerator over Q
  std::vector<int> sym_row;      // per-symbol 0-based row
  std::vector<std::vector<std::uint16_t>> allowed;
  std::uint64_t node_budget = 0;
  int threads = 0;
};

// Mark every cell touched (per the job's rule) by the union of the depth-level
// rectangles of all allowed words.  Exact; subtrees are pruned when they
// provably cannot mark a new cell.  Throws BudgetError past the node budget.
void mark_cover(const GridJob& job, CellBitmap& bitmap);

}  // namespace carpets::detail

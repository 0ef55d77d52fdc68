#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carpets/spec.hpp"

namespace carpets {

// One sampled offset vector and its analysis: overlap status up to max_depth,
// closed-form dimensions, and (when offsets coincide) the dimensions of the
// column-merged system.
struct ScanRow {
  std::uint64_t index = 0;
  TranslationVector t;
  bool overlap = false;
  int overlap_k = 0;   // smallest colliding depth; 0 when none
  double hausdorff = 0;
  double box = 0;
  std::optional<double> merged_hausdorff;
  std::optional<double> merged_box;
};

ScanRow analyze_scan_row(const CarpetSpec& spec, const TranslationVector& t,
                         std::uint64_t index, int max_depth,
                         std::uint64_t budget);

// Independent uniform draws t_i = j / 2^denominator_bits with
// j <= (1 - 1/m) 2^bits, by rejection from a 64-bit generator.
std::vector<TranslationVector> draw_translations(const CarpetSpec& spec,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed,
                                                 int denominator_bits);

std::vector<ScanRow> run_scan(const CarpetSpec& spec, std::uint64_t samples,
                              std::uint64_t seed, int denominator_bits,
                              int max_depth, std::uint64_t budget);

// CSV with one row per sample; merged columns are empty when not applicable.
std::string scan_csv(const CarpetSpec& spec, const std::vector<ScanRow>& rows);

}  // namespace carpets

#include "carpets/scan.hpp"

#include <cstdio>
#include <random>
#include <sstream>

#include "carpets/dimensions.hpp"
#include "carpets/errors.hpp"
#include "carpets/overlap.hpp"

namespace carpets {

ScanRow analyze_scan_row(const CarpetSpec& spec, const TranslationVector& t,
                         std::uint64_t index, int max_depth,
                         std::uint64_t budget) {
  ScanRow row;
  row.index = index;
  row.t = t;
  if (spec.column_count() >= 2) {
    auto witness = detect_exact_overlap(spec, t, max_depth, budget);
    if (witness) {
      row.overlap = true;
      row.overlap_k = witness->k;
    }
  }
  row.hausdorff = hausdorff_dim(spec);
  row.box = box_dim_formula(spec);
  if (t.has_duplicates()) {
    auto [merged, merged_t] = merge_equal_columns(spec, t);
    (void)merged_t;
    row.merged_hausdorff = hausdorff_dim(merged);
    row.merged_box = box_dim_formula(merged);
  }
  return row;
}

std::vector<TranslationVector> draw_translations(const CarpetSpec& spec,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed,
                                                 int denominator_bits) {
  if (denominator_bits < 1 || denominator_bits > 62)
    throw SpecError("denominator bits must lie in [1, 62]");
  std::mt19937_64 gen(seed);
  std::uint64_t den = 1ULL << denominator_bits;
  // Largest admissible numerator: floor((1 - 1/m) 2^bits).
  std::uint64_t jmax =
      (static_cast<std::uint64_t>(spec.m() - 1) * den) / spec.m();
  std::uint64_t range = jmax + 1;
  std::uint64_t reject_below = (-range) % range;

  std::vector<TranslationVector> out;
  out.reserve(samples);
  BigInt big_den = den;
  for (std::uint64_t s = 0; s < samples; ++s) {
    TranslationVector t;
    for (int col : spec.columns()) {
      std::uint64_t z;
      do {
        z = gen();
      } while (z < reject_below);
      t.entries[col] = Rational(BigInt(z % range), big_den);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<ScanRow> run_scan(const CarpetSpec& spec, std::uint64_t samples,
                              std::uint64_t seed, int denominator_bits,
                              int max_depth, std::uint64_t budget) {
  std::vector<ScanRow> rows;
  std::uint64_t index = 0;
  for (const TranslationVector& t :
       draw_translations(spec, samples, seed, denominator_bits))
    rows.push_back(analyze_scan_row(spec, t, index++, max_depth, budget));
  return rows;
}

std::string scan_csv(const CarpetSpec& spec, const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out << "sample";
  for (int col : spec.columns()) out << ",t_" << col;
  out << ",overlap,overlap_k,hausdorff,box,merged_hausdorff,merged_box\n";

  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (const ScanRow& row : rows) {
    out << row.index;
    for (int col : spec.columns()) out << "," << format_rational(row.t.at(col));
    out << "," << (row.overlap ? 1 : 0) << ",";
    if (row.overlap) out << row.overlap_k;
    out << "," << fmt(row.hausdorff) << "," << fmt(row.box) << ",";
    if (row.merged_hausdorff) out << fmt(*row.merged_hausdorff);
    out << ",";
    if (row.merged_box) out << fmt(*row.merged_box);
    out << "\n";
  }
  return out.str();
}

}  // namespace carpets

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carpets/spec.hpp"

namespace carpets {

// Count of r-grid cells (r = n^-level) meeting the attractor, bracketed by a
// finite-depth cover (iterate rectangles to cover_depth >= level) and a sample
// hit count from exact attractor points.
struct GridCount {
  int level = 0;
  Rational r;
  std::uint64_t cover_count = 0;
  std::uint64_t sample_count = 0;
  int cover_depth = 0;
};

GridCount grid_count(const CarpetSpec& spec, const TranslationVector& t,
                     int level, int cover_depth, std::uint64_t budget,
                     int threads = 0);

// Number of depth-level' projection cells (length m^-level') meeting the
// projected attractor; interior convention (cells are half-open).
std::uint64_t projected_count(const CarpetSpec& spec,
                              const TranslationVector& t, int level,
                              std::uint64_t budget);

// Same interior-convention count on a coarser rational grid: cells of width
// `scale` in (0, 1] tiling [0, 1), against the depth-`depth` projected cover
// (depth 0 means the whole unit interval).
BigInt projected_count_scaled(const CarpetSpec& spec,
                              const TranslationVector& t,
                              const Rational& scale, int depth,
                              std::uint64_t budget);

struct BoxDimEstimate {
  std::vector<GridCount> levels;
  double slope = 0;      // OLS slope of ln cover_count against level * ln n
  double stderr_ = 0;
  double formula_value = 0;
};

BoxDimEstimate estimate_box_dim(const CarpetSpec& spec,
                                const TranslationVector& t, int lmin, int lmax,
                                int extra_depth, std::uint64_t budget,
                                int threads = 0);

// Greedy leftmost-first selection of pairwise-disjoint closed intervals
// [left_i, left_i + len_i]; returns selected indices in increasing order.
std::vector<std::size_t> select_disjoint(
    const std::vector<std::pair<Rational, Rational>>& intervals);

// Disjoint-interval subsystem drawn from the depth-ell projection words of a
// carpet whose projection has at least two columns: the selected family has
// cardinality at least 3^-tbar * m^(ell (tbar - eps)), tbar the projected
// dimension log |D-bar| / log m.
struct DisjointSubsystem {
  int ell = 0;
  std::vector<ProjectedWord> selected;
  double cardinality_bound = 0;
};

DisjointSubsystem select_projected_subsystem(const CarpetSpec& spec,
                                             const TranslationVector& t,
                                             int ell, double eps,
                                             std::uint64_t budget);

// Certified lower bound for a uniform-fibre system: build the depth-theta
// equal-frequency projected class (theta = |D-bar| * k / |D-bar| rounded via
// floor(k/N)*N), concatenate ell of its words, select a disjoint subfamily,
// and count occupied half-open n^-(theta ell) cells over lifted continuations.
struct LowerBoundCertificate {
  int k = 0;
  int ell = 0;
  BigInt card_projected_class;   // |H-bar_k|
  std::uint64_t card_selected = 0;
  std::uint64_t cell_count = 0;
  double statistic = 0;          // ln cell_count / (theta ell ln n)
  double formula = 0;            // box-dimension closed form
};

LowerBoundCertificate certified_lower_bound(const CarpetSpec& spec,
                                            const TranslationVector& t, int k,
                                            int ell, std::uint64_t budget,
                                            int threads = 0);

std::string certificate_to_json(const LowerBoundCertificate& c);

}  // namespace carpets

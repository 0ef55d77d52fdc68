// Reference implementations used to cross-check the library: deliberately
// naive, exact, and structured differently from the production code paths.
#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "carpets/rational.hpp"
#include "carpets/spec.hpp"

namespace oracle {

using carpets::BigInt;
using carpets::CarpetSpec;
using carpets::Rational;
using carpets::TranslationVector;

// Every depth-k column word, odometer order.
inline std::vector<std::vector<int>> all_words(const std::vector<int>& alphabet,
                                               int k) {
  std::vector<std::vector<int>> out;
  std::vector<std::size_t> slot(k, 0);
  for (;;) {
    std::vector<int> w(k);
    for (int i = 0; i < k; ++i) w[i] = alphabet[slot[i]];
    out.push_back(std::move(w));
    int i = k - 1;
    while (i >= 0 && ++slot[i] == alphabet.size()) slot[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

inline Rational compose(const CarpetSpec& spec, const TranslationVector& t,
                        const std::vector<int>& word) {
  Rational value = 0, power = 1;
  for (int col : word) {
    value += t.at(col) * power;
    power /= spec.m();
  }
  return value;
}

// Brute-force all-pairs minimum gap over distinct depth-k codes.
inline Rational delta_k(const CarpetSpec& spec, const TranslationVector& t,
                        int k) {
  std::vector<Rational> values;
  for (const auto& w : all_words(spec.columns(), k))
    values.push_back(compose(spec, t, w));
  Rational best = 2;  // larger than any gap in [0, 1)
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      Rational gap = values[i] - values[j];
      if (gap < 0) gap = -gap;
      if (gap < best) best = gap;
    }
  return best;
}

inline std::uint64_t floor_times(const Rational& value, std::uint64_t scale) {
  BigInt v = numerator(value) * scale / denominator(value);
  return v.convert_to<std::uint64_t>();
}

// Cells of the n^-level grid met by the union of closed depth-`depth`
// rectangles (boundary touch counts, top row/right column clamped).
inline std::uint64_t cover_count(const CarpetSpec& spec,
                                 const TranslationVector& t, int level,
                                 int depth) {
  std::uint64_t side = 1;
  for (int i = 0; i < level; ++i) side *= spec.n();
  Rational w = 1, h = 1;
  for (int i = 0; i < depth; ++i) {
    w /= spec.m();
    h /= spec.n();
  }

  std::set<std::pair<std::uint64_t, std::uint64_t>> cells;
  std::vector<std::pair<int, int>> word(depth);
  auto rec = [&](auto&& self, int d, const Rational& x0,
                 const Rational& y0) -> void {
    if (d == depth) {
      std::uint64_t cx0 = floor_times(x0, side);
      std::uint64_t cx1 = std::min(floor_times(x0 + w, side), side - 1);
      std::uint64_t cy0 = floor_times(y0, side);
      std::uint64_t cy1 = std::min(floor_times(y0 + h, side), side - 1);
      for (std::uint64_t cx = cx0; cx <= cx1; ++cx)
        for (std::uint64_t cy = cy0; cy <= cy1; ++cy) cells.emplace(cx, cy);
      return;
    }
    Rational xs = 1, ys = 1;
    for (int i = 0; i <= d; ++i) {
      xs /= spec.m();
      ys /= spec.n();
    }
    for (const auto& [i, j] : spec.rects())
      self(self, d + 1, x0 + t.at(i) * (xs * spec.m()),
           y0 + Rational(j - 1) * ys);
    return;
  };
  rec(rec, 0, Rational(0), Rational(0));
  return cells.size();
}

// Projection cells (width m^-level) with positive-length intersection.
inline std::uint64_t projected_count(const CarpetSpec& spec,
                                     const TranslationVector& t, int level) {
  std::uint64_t cells = 1;
  for (int i = 0; i < level; ++i) cells *= spec.m();
  Rational w = Rational(1, BigInt(cells));
  std::set<std::uint64_t> marked;
  for (const auto& word : all_words(spec.columns(), level)) {
    Rational lo = compose(spec, t, word);
    Rational hi = lo + w;
    std::uint64_t c0 = floor_times(lo, cells);
    // last cell whose open interior meets [lo, hi): ceil(hi * cells) - 1
    BigInt c1 = (numerator(hi) * cells - 1) / denominator(hi);
    for (std::uint64_t c = c0;
         c <= c1.convert_to<std::uint64_t>() && c < cells; ++c)
      marked.insert(c);
  }
  return marked.size();
}

}  // namespace oracle

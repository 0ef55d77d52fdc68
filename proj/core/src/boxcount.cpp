#include "carpets/boxcount.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "carpets/dimensions.hpp"
#include "carpets/errors.hpp"
#include "carpets/overlap.hpp"
#include "enumerate.hpp"

namespace carpets {

namespace {

using detail::CellBitmap;
using detail::CellRule;
using detail::GridJob;
using detail::u128;

constexpr std::uint64_t kGridSideLimit = 16384;
constexpr std::uint64_t kSampleCap = 200000;
constexpr std::uint64_t kSampleSeed = 0x853C49E6748FEA9BULL;

std::uint64_t pow_u64(int base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::uint64_t>(base);
  return out;
}

BigInt pow_big(int base, int exp) {
  BigInt out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Symbol tables over the full rectangle alphabet, in rect order.
struct Alphabet {
  detail::ScaledOffsets offsets;
  std::vector<BigInt> tnum;
  std::vector<int> row;
  std::map<int, std::vector<std::uint16_t>> by_column;
};

Alphabet make_alphabet(const CarpetSpec& spec, const TranslationVector& t) {
  Alphabet a;
  a.offsets = detail::scale_offsets(spec, t);
  std::uint16_t idx = 0;
  for (const auto& [i, j] : spec.rects()) {
    a.tnum.push_back(a.offsets.numerators.at(i));
    a.row.push_back(j - 1);
    a.by_column[i].push_back(idx++);
  }
  return a;
}

std::uint64_t checked_grid_side(const CarpetSpec& spec, int level) {
  long double bits = level * std::log2(static_cast<long double>(spec.n()));
  if (bits > 62) throw BudgetError("grid resolution too large");
  std::uint64_t side = pow_u64(spec.n(), level);
  if (side > kGridSideLimit) throw BudgetError("grid resolution too large");
  return side;
}

unsigned value_bits(const BigInt& Q, int m, int n, int depth, int level) {
  unsigned qbits = msb(Q) + 1;
  unsigned mbits = msb(BigInt(m)) + 1;
  unsigned nbits = msb(BigInt(n)) + 1;
  return qbits + static_cast<unsigned>(depth + 2) * mbits +
         static_cast<unsigned>(level) * nbits + 4;
}

// --- deterministic attractor samples ------------------------------------
//
// Points S_lambda(p*) where p* is the fixed point of the map of the smallest
// rect; every such point lies on the attractor, so the cells they hit are a
// lower bracket for the true cell count.

template <typename IntT>
std::uint64_t sample_cells_impl(const CarpetSpec& spec, const Alphabet& alpha,
                                int level, int depth, std::uint64_t side) {
  int m = spec.m(), n = spec.n();
  int symbols = static_cast<int>(alpha.tnum.size());

  std::vector<IntT> tnum;
  for (const BigInt& v : alpha.tnum) tnum.emplace_back(v.convert_to<IntT>());
  IntT anchor_t = tnum[0];
  std::uint64_t anchor_row = static_cast<std::uint64_t>(alpha.row[0]);

  IntT den = alpha.offsets.Q.convert_to<IntT>();
  den *= (m - 1);
  for (int i = 1; i < depth; ++i) den *= m;
  IntT nell = 1;
  for (int i = 0; i < level; ++i) nell *= n;
  std::uint64_t yden = static_cast<std::uint64_t>(n - 1) * pow_u64(n, depth - level);

  CellBitmap hits(side, side);
  auto mark = [&](const IntT& value, std::uint64_t y_acc) {
    IntT x = value;
    x *= (m - 1);
    x += anchor_t;
    x *= nell;
    std::uint64_t cx = std::min(
        [&] {
          IntT q = x / den;
          if constexpr (std::is_same_v<IntT, BigInt>)
            return q.template convert_to<std::uint64_t>();
          else
            return static_cast<std::uint64_t>(q);
        }(),
        side - 1);
    std::uint64_t cy =
        std::min((static_cast<std::uint64_t>(n - 1) * y_acc + anchor_row) / yden,
                 side - 1);
    hits.set(cx, cy);
  };

  long double total_bits = depth * std::log2(static_cast<long double>(symbols));
  bool full = total_bits <= 40 && pow_u64(symbols, depth) <= kSampleCap;
  if (full) {
    // Exhaustive: every depth-`depth` word.
    auto rec = [&](auto&& self, int d, const IntT& value,
                   std::uint64_t y_acc) -> void {
      if (d == depth) {
        mark(value, y_acc);
        return;
      }
      for (int s = 0; s < symbols; ++s) {
        IntT next = value;
        next *= m;
        next += tnum[s];
        self(self, d + 1, next, y_acc * n + alpha.row[s]);
      }
    };
    rec(rec, 0, IntT(0), 0);
  } else {
    // Fixed-seed pseudorandom words, unbiased per-digit rejection draws.
    std::uint64_t state = kSampleSeed;
    std::uint64_t range = static_cast<std::uint64_t>(symbols);
    std::uint64_t reject_below = (-range) % range;
    for (std::uint64_t i = 0; i < kSampleCap; ++i) {
      IntT value = 0;
      std::uint64_t y_acc = 0;
      for (int d = 0; d < depth; ++d) {
        std::uint64_t z;
        do {
          z = detail::splitmix64(state);
        } while (z < reject_below);
        int s = static_cast<int>(z % range);
        value *= m;
        value += tnum[s];
        y_acc = y_acc * n + alpha.row[s];
      }
      mark(value, y_acc);
    }
  }
  return hits.count();
}

std::uint64_t count_sample_cells(const CarpetSpec& spec, const Alphabet& alpha,
                                 int level, int depth, std::uint64_t side) {
  long double ybits = (depth + 1) * std::log2(static_cast<long double>(spec.n()));
  if (ybits > 62) throw BudgetError("sample depth too large");
  unsigned need =
      value_bits(alpha.offsets.Q, spec.m(), spec.n(), depth, level);
  if (need <= 62)
    return sample_cells_impl<std::uint64_t>(spec, alpha, level, depth, side);
  if (need <= 126)
    return sample_cells_impl<u128>(spec, alpha, level, depth, side);
  return sample_cells_impl<BigInt>(spec, alpha, level, depth, side);
}

GridJob base_job(const CarpetSpec& spec, const Alphabet& alpha, int level,
                 int depth, CellRule rule, std::uint64_t budget, int threads) {
  GridJob job;
  job.m = spec.m();
  job.n = spec.n();
  job.grid_level = level;
  job.depth = depth;
  job.rule = rule;
  job.Q = alpha.offsets.Q;
  job.sym_tnum = alpha.tnum;
  job.sym_row = alpha.row;
  job.node_budget = budget;
  job.threads = threads;
  return job;
}

std::vector<std::uint16_t> all_symbols(const Alphabet& alpha) {
  std::vector<std::uint16_t> out(alpha.tnum.size());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace

GridCount grid_count(const CarpetSpec& spec, const TranslationVector& t,
                     int level, int cover_depth, std::uint64_t budget,
                     int threads) {
  validate_translations(spec, t);
  if (level < 1) throw SpecError("scale level must be positive");
  if (cover_depth < level)
    throw SpecError("cover depth must be at least the scale level");
  std::uint64_t side = checked_grid_side(spec, level);
  Alphabet alpha = make_alphabet(spec, t);

  GridJob job = base_job(spec, alpha, level, cover_depth, CellRule::ClosedTouch,
                         budget, threads);
  job.allowed.assign(cover_depth, all_symbols(alpha));
  CellBitmap cells(side, side);
  detail::mark_cover(job, cells);

  GridCount out;
  out.level = level;
  out.r = Rational(1, pow_big(spec.n(), level));
  out.cover_count = cells.count();
  out.cover_depth = cover_depth;
  out.sample_count =
      count_sample_cells(spec, alpha, level, cover_depth + 4, side);
  return out;
}

std::uint64_t projected_count(const CarpetSpec& spec,
                              const TranslationVector& t, int level,
                              std::uint64_t budget) {
  if (level < 1) throw SpecError("scale level must be positive");
  long double bits = level * std::log2(static_cast<long double>(spec.m()));
  if (bits > 22) throw BudgetError("projection grid too large");
  std::uint64_t cells = pow_u64(spec.m(), level);
  BigInt scale = pow_big(spec.m(), level);

  std::vector<bool> marked(cells, false);
  for (const Rational& v : level_points(spec, t, level, budget)) {
    // Interval [v, v + m^-level]; cells counted on positive overlap only.
    BigInt num = numerator(v), den = denominator(v);
    std::uint64_t c0 = BigInt(num * scale / den).convert_to<std::uint64_t>();
    std::uint64_t c1 =
        BigInt((num * scale + den - 1) / den).convert_to<std::uint64_t>();
    for (std::uint64_t c = c0; c <= c1 && c < cells; ++c) marked[c] = true;
  }
  return static_cast<std::uint64_t>(std::count(marked.begin(), marked.end(), true));
}

BigInt projected_count_scaled(const CarpetSpec& spec,
                              const TranslationVector& t,
                              const Rational& scale, int depth,
                              std::uint64_t budget) {
  if (scale <= 0 || scale > 1) throw SpecError("scale must lie in (0, 1]");
  if (depth < 0) throw SpecError("cover depth must be nonnegative");
  BigInt p = numerator(scale), q = denominator(scale);
  BigInt cells_big = (q + p - 1) / p;  // ceil(1/scale)
  if (cells_big > (1 << 22)) throw BudgetError("projection grid too large");
  std::uint64_t cells = cells_big.convert_to<std::uint64_t>();

  std::vector<bool> marked(cells, false);
  auto mark_interval = [&](const Rational& lo, const Rational& hi) {
    BigInt c0 = numerator(lo) * q / (denominator(lo) * p);
    BigInt c1 = (numerator(hi) * q - 1) / (denominator(hi) * p);
    std::uint64_t a = c0.convert_to<std::uint64_t>();
    std::uint64_t b = c1.convert_to<std::uint64_t>();
    for (std::uint64_t c = a; c <= b && c < cells; ++c) marked[c] = true;
  };
  if (depth == 0) {
    mark_interval(Rational(0), Rational(1));
  } else {
    Rational width(1, pow_big(spec.m(), depth));
    for (const Rational& v : level_points(spec, t, depth, budget))
      mark_interval(v, v + width);
  }
  return BigInt(std::count(marked.begin(), marked.end(), true));
}

BoxDimEstimate estimate_box_dim(const CarpetSpec& spec,
                                const TranslationVector& t, int lmin, int lmax,
                                int extra_depth, std::uint64_t budget,
                                int threads) {
  if (lmin < 2) throw SpecError("smallest level must be at least 2");
  if (lmax < lmin + 2) throw SpecError("need at least three levels");
  if (extra_depth < 0) throw SpecError("extra depth must be nonnegative");

  BoxDimEstimate est;
  for (int l = lmin; l <= lmax; ++l)
    est.levels.push_back(
        grid_count(spec, t, l, l + extra_depth, budget, threads));

  double log_n = std::log(spec.n());
  std::size_t count = est.levels.size();
  double xbar = 0, ybar = 0;
  for (const GridCount& g : est.levels) {
    xbar += g.level * log_n;
    ybar += std::log(static_cast<double>(g.cover_count));
  }
  xbar /= count;
  ybar /= count;
  double sxx = 0, sxy = 0;
  for (const GridCount& g : est.levels) {
    double dx = g.level * log_n - xbar;
    double dy = std::log(static_cast<double>(g.cover_count)) - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  est.slope = sxy / sxx;
  double ssr = 0;
  for (const GridCount& g : est.levels) {
    double dx = g.level * log_n - xbar;
    double dy = std::log(static_cast<double>(g.cover_count)) - ybar;
    double resid = dy - est.slope * dx;
    ssr += resid * resid;
  }
  est.stderr_ = std::sqrt(ssr / (static_cast<double>(count - 2) * sxx));
  est.formula_value = box_dim_formula(spec);
  return est;
}

std::vector<std::size_t> select_disjoint(
    const std::vector<std::pair<Rational, Rational>>& intervals) {
  std::vector<std::size_t> order(intervals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return intervals[a].first < intervals[b].first;
                   });
  std::vector<std::size_t> out;
  Rational right;
  for (std::size_t idx : order) {
    const auto& [left, len] = intervals[idx];
    if (out.empty() || left > right) {
      out.push_back(idx);
      right = left + len;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DisjointSubsystem select_projected_subsystem(const CarpetSpec& spec,
                                             const TranslationVector& t,
                                             int ell, double eps,
                                             std::uint64_t budget) {
  if (ell < 1) throw SpecError("depth must be positive");
  validate_translations(spec, t);
  long double count_bits =
      ell * std::log2(static_cast<long double>(spec.column_count()));
  if (count_bits > 40 ||
      pow_u64(spec.column_count(), ell) > budget)
    throw BudgetError("word enumeration exceeds budget");

  std::vector<ProjectedWord> words;
  ProjectedWord cur;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == ell) {
      words.push_back(cur);
      return;
    }
    for (int col : spec.columns()) {
      cur.push_back(col);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);

  Rational width(1, pow_big(spec.m(), ell));
  std::vector<std::pair<Rational, Rational>> intervals;
  for (const ProjectedWord& w : words)
    intervals.emplace_back(compose_projected(spec, t, w), width);
  std::vector<std::size_t> sel = select_disjoint(intervals);

  DisjointSubsystem out;
  out.ell = ell;
  for (std::size_t idx : sel) out.selected.push_back(words[idx]);
  double tbar = std::log(spec.column_count()) / std::log(spec.m());
  out.cardinality_bound =
      std::pow(3.0, -tbar) * std::pow(spec.m(), ell * (tbar - eps));
  return out;
}

LowerBoundCertificate certified_lower_bound(const CarpetSpec& spec,
                                            const TranslationVector& t, int k,
                                            int ell, std::uint64_t budget,
                                            int threads) {
  validate_translations(spec, t);
  if (ell < 1) throw SpecError("concatenation count must be positive");
  int rects = spec.rect_count();
  if (k < rects) throw SpecError("depth must be at least the rectangle count");
  int q = k / rects;
  int theta = rects * q;
  int grid_level = theta * ell;

  BigInt card = card_Hbar_exact(spec, k);
  if (card > budget) throw BudgetError("projected class exceeds budget");
  BigInt combos = 1;
  for (int i = 0; i < ell; ++i) {
    combos *= card;
    if (combos > budget) throw BudgetError("concatenations exceed budget");
  }
  std::uint64_t side = checked_grid_side(spec, grid_level);

  // The equal-frequency projected class: column i appears N_i * q times.
  ProjectedWord base;
  for (int col : spec.columns())
    base.insert(base.end(), spec.count_in_column(col) * q, col);
  std::vector<ProjectedWord> class_words;
  ProjectedWord perm = base;
  do {
    class_words.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // All ell-fold concatenations, as intervals of width m^-(theta ell).
  std::vector<ProjectedWord> concats;
  std::vector<std::pair<Rational, Rational>> intervals;
  Rational width(1, pow_big(spec.m(), grid_level));
  std::vector<std::size_t> slot(ell, 0);
  for (;;) {
    ProjectedWord w;
    for (int s = 0; s < ell; ++s)
      w.insert(w.end(), class_words[slot[s]].begin(), class_words[slot[s]].end());
    intervals.emplace_back(compose_projected(spec, t, w), width);
    concats.push_back(std::move(w));
    int s = ell - 1;
    while (s >= 0 && ++slot[s] == class_words.size()) slot[s--] = 0;
    if (s < 0) break;
  }
  std::vector<std::size_t> sel = select_disjoint(intervals);

  // Count occupied cells at side n^-(theta ell) over all selected words:
  // columns follow the word for theta*ell levels (rows free), then expand
  // freely until rectangles are no wider than a cell.
  int refine = 0;
  BigInt mp = pow_big(spec.m(), grid_level), np = pow_big(spec.n(), grid_level);
  while (mp < np) {
    mp *= spec.m();
    ++refine;
  }
  Alphabet alpha = make_alphabet(spec, t);
  GridJob job = base_job(spec, alpha, grid_level, grid_level + refine,
                         CellRule::Interior, budget, threads);
  CellBitmap cells(side, side);
  std::vector<std::uint16_t> free_syms = all_symbols(alpha);
  for (std::size_t idx : sel) {
    job.allowed.clear();
    for (int d = 0; d < grid_level; ++d)
      job.allowed.push_back(alpha.by_column.at(concats[idx][d]));
    job.allowed.insert(job.allowed.end(), refine, free_syms);
    detail::mark_cover(job, cells);
  }

  LowerBoundCertificate cert;
  cert.k = k;
  cert.ell = ell;
  cert.card_projected_class = card;
  cert.card_selected = sel.size();
  cert.cell_count = cells.count();
  cert.statistic = std::log(static_cast<double>(cert.cell_count)) /
                   (grid_level * std::log(spec.n()));
  cert.formula = box_dim_formula(spec);
  return cert;
}

std::string certificate_to_json(const LowerBoundCertificate& c) {
  nlohmann::json doc;
  doc["k"] = c.k;
  doc["l"] = c.ell;
  doc["card_Hbar"] = c.card_projected_class.str();
  doc["card_selected"] = c.card_selected;
  doc["cell_count"] = c.cell_count;
  doc["statistic"] = c.statistic;
  doc["formula"] = c.formula;
  return doc.dump();
}

}  // namespace carpets

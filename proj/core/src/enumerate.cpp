#include "enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "carpets/errors.hpp"
#include "carpets/spec.hpp"

namespace carpets::detail {

ScaledOffsets scale_offsets(const CarpetSpec& spec, const TranslationVector& t) {
  ScaledOffsets out;
  out.Q = 1;
  for (int col : spec.columns())
    out.Q = lcm(out.Q, BigInt(denominator(t.at(col))));
  for (int col : spec.columns())
    out.numerators[col] =
        BigInt(numerator(t.at(col))) * (out.Q / denominator(t.at(col)));
  return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CellBitmap::CellBitmap(std::uint64_t width, std::uint64_t height)
    : width_(width), height_(height), words_per_row_((width + 63) / 64) {
  std::uint64_t words = words_per_row_ * height_;
  bits_ = std::make_unique<std::atomic<std::uint64_t>[]>(words);
  for (std::uint64_t i = 0; i < words; ++i)
    bits_[i].store(0, std::memory_order_relaxed);
}

void CellBitmap::set(std::uint64_t x, std::uint64_t y) {
  bits_[y * words_per_row_ + x / 64].fetch_or(1ULL << (x % 64),
                                              std::memory_order_relaxed);
}

bool CellBitmap::test(std::uint64_t x, std::uint64_t y) const {
  return (bits_[y * words_per_row_ + x / 64].load(std::memory_order_relaxed) >>
          (x % 64)) &
         1;
}

void CellBitmap::set_row_range(std::uint64_t x0, std::uint64_t x1,
                               std::uint64_t y) {
  std::atomic<std::uint64_t>* row = bits_.get() + y * words_per_row_;
  std::uint64_t w0 = x0 / 64, w1 = x1 / 64;
  for (std::uint64_t w = w0; w <= w1; ++w) {
    std::uint64_t mask = ~0ULL;
    if (w == w0) mask &= ~0ULL << (x0 % 64);
    if (w == w1) mask &= ~0ULL >> (63 - x1 % 64);
    row[w].fetch_or(mask, std::memory_order_relaxed);
  }
}

bool CellBitmap::row_range_all_set(std::uint64_t x0, std::uint64_t x1,
                                   std::uint64_t y) const {
  const std::atomic<std::uint64_t>* row = bits_.get() + y * words_per_row_;
  std::uint64_t w0 = x0 / 64, w1 = x1 / 64;
  for (std::uint64_t w = w0; w <= w1; ++w) {
    std::uint64_t mask = ~0ULL;
    if (w == w0) mask &= ~0ULL << (x0 % 64);
    if (w == w1) mask &= ~0ULL >> (63 - x1 % 64);
    if ((row[w].load(std::memory_order_relaxed) & mask) != mask) return false;
  }
  return true;
}

std::uint64_t CellBitmap::count() const {
  std::uint64_t total = 0;
  std::uint64_t words = words_per_row_ * height_;
  for (std::uint64_t i = 0; i < words; ++i)
    total += __builtin_popcountll(bits_[i].load(std::memory_order_relaxed));
  return total;
}

namespace {

// Ranges no bigger than this get an all-already-marked scan before descending.
constexpr std::uint64_t kScanLimit = 4096;

std::uint64_t to_u64(std::uint64_t v) { return v; }
std::uint64_t to_u64(u128 v) { return static_cast<std::uint64_t>(v); }
std::uint64_t to_u64(const BigInt& v) { return v.convert_to<std::uint64_t>(); }

template <typename IntT>
struct Ctx {
  const GridJob* job = nullptr;
  CellBitmap* bitmap = nullptr;
  std::vector<IntT> tnum;
  std::vector<IntT> qm;   // Q * m^d
  IntT q;                 // Q
  IntT nell;              // n^grid_level
  std::uint64_t nell64 = 0;
  std::vector<std::uint64_t> ydiv;    // n^(d - grid_level) for d >= grid_level
  std::vector<std::uint64_t> ymul;    // n^(grid_level - d) for d <= grid_level
  std::uint64_t sub = 0;              // 1 under the Interior rule
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> stop{false};
};

template <typename IntT>
void dfs(Ctx<IntT>& c, int d, const IntT& value, std::uint64_t y_acc) {
  if (c.nodes.fetch_add(1, std::memory_order_relaxed) >= c.job->node_budget ||
      c.stop.load(std::memory_order_relaxed)) {
    c.stop.store(true, std::memory_order_relaxed);
    throw BudgetError("cell enumeration exceeded the node budget");
  }

  // x range of the current prefix box [value, value + Q] / (Q m^d).
  IntT lo_num = value;
  lo_num *= c.job->m;
  IntT scaled = lo_num;
  scaled *= c.nell;
  std::uint64_t cx0 = to_u64(IntT(scaled / c.qm[d]));
  scaled = lo_num;
  scaled += c.q;
  scaled *= c.nell;
  scaled -= c.sub;
  std::uint64_t cx1 = std::min(to_u64(IntT(scaled / c.qm[d])), c.nell64 - 1);

  // y range: height n^-d starting at y_acc * n^-d.
  int ell = c.job->grid_level;
  std::uint64_t cy0, cy1;
  if (d >= ell) {
    std::uint64_t div = c.ydiv[d - ell];
    cy0 = y_acc / div;
    cy1 = std::min((y_acc + 1 - c.sub) / div, c.nell64 - 1);
  } else {
    std::uint64_t mul = c.ymul[d];
    cy0 = y_acc * mul;
    cy1 = std::min((y_acc + 1) * mul - c.sub, c.nell64 - 1);
  }

  if (cx0 == cx1 && cy0 == cy1) {
    // The whole subtree stays inside one cell.
    c.bitmap->set(cx0, cy0);
    return;
  }
  if (d == c.job->depth) {
    for (std::uint64_t y = cy0; y <= cy1; ++y)
      c.bitmap->set_row_range(cx0, cx1, y);
    return;
  }
  if ((cx1 - cx0 + 1) * (cy1 - cy0 + 1) <= kScanLimit) {
    bool all = true;
    for (std::uint64_t y = cy0; all && y <= cy1; ++y)
      all = c.bitmap->row_range_all_set(cx0, cx1, y);
    // Everything the subtree can touch lies in this range and is marked.
    if (all) return;
  }
  for (std::uint16_t sym : c.job->allowed[d]) {
    IntT next = lo_num;
    next += c.tnum[sym];
    dfs(c, d + 1, next, y_acc * c.job->n + c.job->sym_row[sym]);
  }
}

template <typename IntT>
void run(const GridJob& job, CellBitmap& bitmap) {
  Ctx<IntT> c;
  c.job = &job;
  c.bitmap = &bitmap;
  for (const BigInt& v : job.sym_tnum) c.tnum.emplace_back(v.convert_to<IntT>());
  IntT qm = job.Q.convert_to<IntT>();
  c.q = qm;
  for (int d = 0; d <= job.depth; ++d) {
    c.qm.push_back(qm);
    qm *= job.m;
  }
  IntT nell = 1;
  c.nell64 = 1;
  for (int i = 0; i < job.grid_level; ++i) {
    nell *= job.n;
    c.nell64 *= job.n;
  }
  c.nell = nell;
  std::uint64_t p = 1;
  for (int d = job.grid_level; d <= job.depth; ++d) {
    c.ydiv.push_back(p);
    p *= job.n;
  }
  p = c.nell64;
  for (int d = 0; d <= std::min(job.grid_level, job.depth); ++d) {
    c.ymul.push_back(p);
    p /= job.n;
  }
  c.sub = job.rule == CellRule::Interior ? 1 : 0;

  const auto& first = job.allowed[0];
  int threads = job.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(first.size()));

  if (threads <= 1) {
    for (std::uint16_t sym : first)
      dfs(c, 1, c.tnum[sym], static_cast<std::uint64_t>(job.sym_row[sym]));
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < first.size(); i += threads) {
          std::uint16_t sym = first[i];
          dfs(c, 1, c.tnum[sym], static_cast<std::uint64_t>(job.sym_row[sym]));
        }
      } catch (...) {
        errors[w] = std::current_exception();
        c.stop.store(true, std::memory_order_relaxed);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

void mark_cover(const GridJob& job, CellBitmap& bitmap) {
  if (job.depth < 1) throw SpecError("expansion depth must be positive");
  if (static_cast<int>(job.allowed.size()) != job.depth)
    throw SpecError("allowed-symbol table must cover every depth");
  long double ybits = job.depth * std::log2(static_cast<long double>(job.n));
  if (ybits > 62) throw BudgetError("expansion depth too large");

  unsigned qbits = msb(job.Q) + 1;
  unsigned mbits = msb(BigInt(job.m)) + 1;
  unsigned nbits = msb(BigInt(job.n)) + 1;
  unsigned need = qbits + (job.depth + 1) * mbits + job.grid_level * nbits + 2;
  if (need <= 62)
    run<std::uint64_t>(job, bitmap);
  else if (need <= 126)
    run<u128>(job, bitmap);
  else
    run<BigInt>(job, bitmap);
}

}  // namespace carpets::detail

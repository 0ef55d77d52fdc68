#include "carpets/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include <json.hpp>

#include "carpets/errors.hpp"

namespace carpets {

namespace {

// Heuristic classification thresholds: the asymptotic condition (bounded
// -log Delta_k / k) is approximated by the final decay landing within this
// relative distance of log m, or by the decay having stopped increasing.
constexpr double kNoConcentrationRelTol = 0.10;
constexpr int kNoConcentrationTail = 3;
constexpr double kMonotoneSlack = 1e-12;

using u128 = unsigned __int128;

u128 to_u128(const BigInt& v) {
  u128 hi = (v >> 64).convert_to<std::uint64_t>();
  std::uint64_t lo = (v & BigInt(~std::uint64_t(0))).convert_to<std::uint64_t>();
  return (hi << 64) | lo;
}

BigInt from_u128(u128 v) {
  BigInt out = std::uint64_t(v >> 64);
  out <<= 64;
  out |= std::uint64_t(v);
  return out;
}

// Shared integer scaffolding: all level-k offsets become integers over the
// common denominator Q * m^(k-1), Q = lcm of the offset denominators.
struct Kernel {
  int m = 0;
  std::vector<int> columns;
  BigInt Q;
  std::vector<BigInt> tnum;  // offset numerators over Q, aligned with columns
};

Kernel make_kernel(const CarpetSpec& spec, const TranslationVector& t) {
  Kernel k;
  k.m = spec.m();
  k.columns = spec.columns();
  k.Q = 1;
  for (int col : k.columns) k.Q = lcm(k.Q, BigInt(denominator(t.at(col))));
  for (int col : k.columns)
    k.tnum.push_back(BigInt(numerator(t.at(col))) * (k.Q / denominator(t.at(col))));
  return k;
}

std::uint64_t checked_count(int symbols, int k, std::uint64_t budget) {
  long double est = k * std::log2(static_cast<long double>(symbols));
  if (est > 62) throw BudgetError("level enumeration exceeds budget");
  std::uint64_t count = 1;
  for (int i = 0; i < k; ++i) count *= symbols;
  if (count > budget) throw BudgetError("level enumeration exceeds budget");
  return count;
}

template <typename IntT>
struct Point {
  IntT value;
  std::uint64_t code;
  bool operator<(const Point& o) const {
    return value != o.value ? value < o.value : code < o.code;
  }
};

template <typename IntT>
void fill_subtree(const std::vector<IntT>& tnum, int m, int depth_left,
                  const IntT& acc, std::uint64_t code, Point<IntT>*& out) {
  if (depth_left == 0) {
    *out++ = {acc, code};
    return;
  }
  int symbols = static_cast<int>(tnum.size());
  for (int idx = 0; idx < symbols; ++idx) {
    IntT next = acc;
    next *= m;
    next += tnum[idx];
    fill_subtree(tnum, m, depth_left - 1,
                 static_cast<const IntT&>(next),
                 code * symbols + idx, out);
  }
}

// All (scaled value, packed code) pairs at depth k, sorted by value with the
// code as tiebreak; the result is independent of the thread partition.
template <typename IntT>
std::vector<Point<IntT>> sorted_points(const std::vector<IntT>& tnum, int m,
                                       int k, std::uint64_t count, int threads) {
  int symbols = static_cast<int>(tnum.size());
  std::vector<Point<IntT>> pts(count);
  std::uint64_t block = count / symbols;

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, symbols);
  if (threads > 1 && k > 1 && count >= (1u << 16)) {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int idx = w; idx < symbols; idx += threads) {
          Point<IntT>* out = pts.data() + idx * block;
          fill_subtree<IntT>(tnum, m, k - 1, tnum[idx],
                             static_cast<std::uint64_t>(idx), out);
        }
      });
    }
    for (auto& th : pool) th.join();
  } else {
    Point<IntT>* out = pts.data();
    for (int idx = 0; idx < symbols; ++idx)
      fill_subtree<IntT>(tnum, m, k - 1, tnum[idx],
                         static_cast<std::uint64_t>(idx), out);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

bool fits_u128(const Kernel& kern, int k) {
  unsigned mbits = msb(BigInt(kern.m)) + 1;
  unsigned qbits = kern.Q == 0 ? 1 : msb(kern.Q) + 1;
  return qbits + static_cast<unsigned>(k) * mbits + 2 <= 126;
}

ProjectedWord decode(const Kernel& kern, std::uint64_t code, int k) {
  int symbols = static_cast<int>(kern.columns.size());
  ProjectedWord word(k);
  for (int j = k - 1; j >= 0; --j) {
    word[j] = kern.columns[code % symbols];
    code /= symbols;
  }
  return word;
}

struct LevelScan {
  Rational delta;                                   // min adjacent gap
  std::optional<std::pair<std::uint64_t, std::uint64_t>> collision;  // codes
};

// One depth: enumerate, sort, take the minimal adjacent gap; record the first
// colliding code pair when the gap is zero.
LevelScan scan_level(const Kernel& kern, int k, std::uint64_t budget, int threads) {
  int symbols = static_cast<int>(kern.columns.size());
  std::uint64_t count = checked_count(symbols, k, budget);
  BigInt denom = kern.Q;
  for (int i = 1; i < k; ++i) denom *= kern.m;

  LevelScan out;
  if (fits_u128(kern, k)) {
    std::vector<u128> tnum;
    for (const BigInt& v : kern.tnum) tnum.push_back(to_u128(v));
    auto pts = sorted_points<u128>(tnum, kern.m, k, count, threads);
    u128 best = ~u128(0);
    for (std::uint64_t i = 1; i < count; ++i) {
      u128 gap = pts[i].value - pts[i - 1].value;
      if (gap == 0 && !out.collision)
        out.collision = {pts[i - 1].code, pts[i].code};
      best = std::min(best, gap);
    }
    out.delta = Rational(from_u128(best), denom);
  } else {
    auto pts = sorted_points<BigInt>(kern.tnum, kern.m, k, count, threads);
    BigInt best = -1;
    for (std::uint64_t i = 1; i < count; ++i) {
      BigInt gap = pts[i].value - pts[i - 1].value;
      if (gap == 0 && !out.collision)
        out.collision = {pts[i - 1].code, pts[i].code};
      if (best < 0 || gap < best) best = gap;
    }
    out.delta = Rational(best, denom);
  }
  return out;
}

void require_two_columns(const CarpetSpec& spec) {
  if (spec.column_count() < 2)
    throw SpecError("cylinder gaps need at least two occupied columns");
}

OverlapWitness build_witness(const CarpetSpec& spec, const Kernel& kern, int k,
                             std::pair<std::uint64_t, std::uint64_t> codes) {
  OverlapWitness w;
  w.k = k;
  w.rho = decode(kern, codes.first, k);
  w.rho_prime = decode(kern, codes.second, k);
  if (w.rho_prime < w.rho) std::swap(w.rho, w.rho_prime);
  w.coefficients = linear_form(spec, w.rho, w.rho_prime);
  return w;
}

}  // namespace

std::string to_string(DeltaClass c) {
  switch (c) {
    case DeltaClass::ExactOverlap: return "ExactOverlap";
    case DeltaClass::NoConcentrationEvidence: return "NoConcentrationEvidence";
    case DeltaClass::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::vector<Rational> level_points(const CarpetSpec& spec,
                                   const TranslationVector& t, int k,
                                   std::uint64_t budget) {
  if (k < 1) throw SpecError("depth must be positive");
  validate_translations(spec, t);
  Kernel kern = make_kernel(spec, t);
  int symbols = static_cast<int>(kern.columns.size());
  std::uint64_t count = checked_count(symbols, k, budget);
  BigInt denom = kern.Q;
  for (int i = 1; i < k; ++i) denom *= kern.m;

  std::vector<Rational> out;
  out.reserve(count);
  auto pts = sorted_points<BigInt>(kern.tnum, kern.m, k, count, 1);
  for (const auto& p : pts) out.emplace_back(p.value, denom);
  return out;
}

Rational delta_k(const CarpetSpec& spec, const TranslationVector& t, int k,
                 std::uint64_t budget, int threads) {
  if (k < 1) throw SpecError("depth must be positive");
  require_two_columns(spec);
  validate_translations(spec, t);
  Kernel kern = make_kernel(spec, t);
  return scan_level(kern, k, budget, threads).delta;
}

std::optional<OverlapWitness> detect_exact_overlap(const CarpetSpec& spec,
                                                   const TranslationVector& t,
                                                   int max_k,
                                                   std::uint64_t budget,
                                                   int threads) {
  if (max_k < 1) throw SpecError("depth must be positive");
  require_two_columns(spec);
  validate_translations(spec, t);
  Kernel kern = make_kernel(spec, t);
  for (int k = 1; k <= max_k; ++k) {
    LevelScan scan = scan_level(kern, k, budget, threads);
    if (scan.collision) return build_witness(spec, kern, k, *scan.collision);
  }
  return std::nullopt;
}

DeltaProfile decay_profile(const CarpetSpec& spec, const TranslationVector& t,
                           int max_k, std::uint64_t budget, int threads) {
  if (max_k < 1) throw SpecError("depth must be positive");
  require_two_columns(spec);
  validate_translations(spec, t);
  Kernel kern = make_kernel(spec, t);

  DeltaProfile profile;
  double inf = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= max_k; ++k) {
    LevelScan scan;
    try {
      scan = scan_level(kern, k, budget, threads);
    } catch (const BudgetError&) {
      profile.truncated = true;
      profile.classification = DeltaClass::Inconclusive;
      return profile;
    }
    if (scan.collision) {
      profile.entries.push_back({k, Rational(0), inf});
      profile.classification = DeltaClass::ExactOverlap;
      profile.witness = build_witness(spec, kern, k, *scan.collision);
      // A depth-k collision persists at every deeper level (append any common
      // suffix), so the remaining entries are zero without enumeration.
      for (int deeper = k + 1; deeper <= max_k; ++deeper)
        profile.entries.push_back({deeper, Rational(0), inf});
      return profile;
    }
    double decay = -static_cast<double>(log_rational(scan.delta)) / k;
    profile.entries.push_back({k, scan.delta, decay});
  }

  double log_m = std::log(spec.m());
  double final_decay = profile.entries.back().decay;
  bool near_log_m =
      std::abs(final_decay - log_m) <= kNoConcentrationRelTol * log_m;
  bool tail_flat = false;
  if (static_cast<int>(profile.entries.size()) >= kNoConcentrationTail) {
    tail_flat = true;
    std::size_t last = profile.entries.size() - 1;
    for (int i = 0; i + 1 < kNoConcentrationTail; ++i)
      if (profile.entries[last - i].decay >
          profile.entries[last - i - 1].decay + kMonotoneSlack)
        tail_flat = false;
  }
  profile.classification = (near_log_m || tail_flat)
                               ? DeltaClass::NoConcentrationEvidence
                               : DeltaClass::Inconclusive;
  return profile;
}

std::map<int, Rational> linear_form(const CarpetSpec& spec,
                                    const ProjectedWord& rho,
                                    const ProjectedWord& rho_prime) {
  if (rho.size() != rho_prime.size())
    throw SpecError("words must have equal length");
  if (rho == rho_prime) throw SpecError("words must be distinct");
  std::map<int, Rational> coeff;
  for (int col : spec.columns()) coeff[col] = 0;
  Rational power = 1;  // (1/m)^(pos-1)
  for (std::size_t pos = 0; pos < rho.size(); ++pos) {
    auto a = coeff.find(rho[pos]);
    auto b = coeff.find(rho_prime[pos]);
    if (a == coeff.end() || b == coeff.end())
      throw SpecError("word symbol is not an occupied column");
    a->second += power;
    b->second -= power;
    power /= spec.m();
  }
  return coeff;
}

double coefficient_upper_bound(int m) {
  return static_cast<double>(m) / (m - 1);
}

double coefficient_lower_bound(int m, int len) {
  double a = 1.0 / m;
  return std::pow(a, len) * (1 - 2 * a) / (1 - a);
}

std::string witness_to_json(const OverlapWitness& w) {
  nlohmann::json doc;
  doc["k"] = w.k;
  doc["rho"] = w.rho;
  doc["rho_prime"] = w.rho_prime;
  nlohmann::json coeff = nlohmann::json::object();
  for (const auto& [col, c] : w.coefficients)
    coeff[std::to_string(col)] = format_rational(c);
  doc["coefficients"] = std::move(coeff);
  return doc.dump();
}

}  // namespace carpets

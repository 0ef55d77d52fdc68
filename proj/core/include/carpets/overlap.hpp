#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carpets/spec.hpp"

namespace carpets {

// Minimal gap between projected offsets of distinct depth-k column words.
struct DeltaEntry {
  int k = 0;
  Rational delta;       // Delta_k, exact
  double decay = 0;     // -(1/k) ln Delta_k; +inf when Delta_k = 0
};

enum class DeltaClass {
  ExactOverlap,              // Delta_k = 0 at some depth
  NoConcentrationEvidence,   // decay settles near log m (or stops increasing)
  Inconclusive,              // truncated before either signal
};

std::string to_string(DeltaClass c);

// A colliding pair of depth-k words, plus the coefficients of the linear form
// sum_l c_l t_l that vanishes on the offsets (one coefficient per column).
struct OverlapWitness {
  int k = 0;
  ProjectedWord rho, rho_prime;   // lex-sorted: rho < rho_prime
  std::map<int, Rational> coefficients;
};

struct DeltaProfile {
  std::vector<DeltaEntry> entries;   // depths 1..max_k (or to the budget)
  DeltaClass classification = DeltaClass::Inconclusive;
  std::optional<OverlapWitness> witness;
  bool truncated = false;
};

std::string witness_to_json(const OverlapWitness& w);

// All S-bar_rho(0) over depth-k words, sorted (duplicates kept).
// Budget counts enumerated words; exceeding it throws BudgetError.
std::vector<Rational> level_points(const CarpetSpec& spec,
                                   const TranslationVector& t, int k,
                                   std::uint64_t budget = 1u << 22);

Rational delta_k(const CarpetSpec& spec, const TranslationVector& t, int k,
                 std::uint64_t budget = 1u << 22, int threads = 0);

// Smallest depth <= max_k with Delta_k = 0, with a witness pair; nullopt if
// none found.  Budget is per depth.
std::optional<OverlapWitness> detect_exact_overlap(
    const CarpetSpec& spec, const TranslationVector& t, int max_k,
    std::uint64_t budget = 1u << 22, int threads = 0);

// Full profile over depths 1..max_k.  Once a collision appears the remaining
// depths are filled with Delta = 0 without enumeration (a collision at depth k
// extends to every deeper level).  If the budget truncates the profile before
// any collision, classification is Inconclusive.
DeltaProfile decay_profile(const CarpetSpec& spec, const TranslationVector& t,
                           int max_k, std::uint64_t budget = 1u << 22,
                           int threads = 0);

// Coefficients c_l of Delta_{rho,rho'} as a function of the offsets.
std::map<int, Rational> linear_form(const CarpetSpec& spec,
                                    const ProjectedWord& rho,
                                    const ProjectedWord& rho_prime);

// Bounds on those coefficients for contraction a = 1/m: every |c_l| is at most
// 1/(1-a), and when the words differ the largest |c_l| is at least
// a^len (1-2a)/(1-a) (positive for m > 2).
double coefficient_upper_bound(int m);
double coefficient_lower_bound(int m, int len);

}  // namespace carpets

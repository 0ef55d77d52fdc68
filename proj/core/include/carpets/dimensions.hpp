#pragma once

#include <map>
#include <optional>
#include <string>

#include "carpets/spec.hpp"

namespace carpets {

// Closed-form dimensions of the standard-translation attractor, together with
// the natural-measure weights and slice statistics.
struct DimensionReport {
  double hausdorff = 0;
  double box = 0;        // = packing
  double packing = 0;
  double assouad = 0;
  double lower = 0;
  double affinity = 0;
  double expected_slice = 0;                   // sum_i p_i log N_i / log n
  std::map<std::pair<int, int>, double> weights;   // rectangle weights p_(i,j)
  std::map<int, double> column_weights;            // p_i = N_i^gamma / sum
  // Assouad/lower formulas are only asserted for the standard offsets.
  bool assouad_lower_standard_only = true;
};

double hausdorff_dim(const CarpetSpec& spec);
double box_dim_formula(const CarpetSpec& spec);
double assouad_dim(const CarpetSpec& spec);
double lower_dim(const CarpetSpec& spec);
double affinity_dim(const CarpetSpec& spec);

DimensionReport dimension_report(const CarpetSpec& spec);
std::string report_to_json(const DimensionReport& report);

// Generalized class: box dimension always; Hausdorff only when the closed form
// applies (absent for wide systems with a > 1/2).
struct GeneralDims {
  std::optional<double> hausdorff;
  double box = 0;
};

GeneralDims general_dims(const GeneralCarpetSpec& spec);
std::string general_dims_to_json(const GeneralCarpetSpec& spec,
                                 const GeneralDims& dims);

// Equal-frequency word class at depth k (requires k >= rect count): each
// rectangle appears floor(k/|D|) times in a word of length theta_k, giving the
// dimension statistic s_k <= box dimension, with s_k -> box dimension.
struct SubsystemStats {
  int k = 0;
  int theta_k = 0;           // |D| * floor(k / |D|)
  double log_card = 0;       // ln |H_k|
  double log_card_projected = 0;
  double s_k = 0;
};

SubsystemStats subsystem_stats(const CarpetSpec& spec, int k);

// Exact multinomial cardinalities for the same classes.
BigInt card_H_exact(const CarpetSpec& spec, int k);
BigInt card_Hbar_exact(const CarpetSpec& spec, int k);

// Two-sided bracket for ln(b!) of the classical form; lower = b ln b - b,
// upper = b ln b - b + ln b.  The upper inequality only holds for b >= 7.
std::pair<double, double> stirling_bounds(int b);

}  // namespace carpets

#include "carpets/dimensions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "carpets/errors.hpp"

namespace carpets {

namespace {

long double ld_log(long double x) { return std::log(x); }

// ln sum exp(terms), guarded by a max shift.
long double log_sum_exp(const std::vector<long double>& terms) {
  long double mx = *std::max_element(terms.begin(), terms.end());
  long double acc = 0;
  for (long double t : terms) acc += std::exp(t - mx);
  return mx + ld_log(acc);
}

// ln sum_i N_i^gamma over occupied columns.
long double log_moment(const CarpetSpec& spec, long double gamma) {
  std::vector<long double> terms;
  for (int col : spec.columns())
    terms.push_back(gamma * ld_log(spec.count_in_column(col)));
  return log_sum_exp(terms);
}

}  // namespace

double hausdorff_dim(const CarpetSpec& spec) {
  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  return static_cast<double>(log_moment(spec, lm / ln) / lm);
}

double box_dim_formula(const CarpetSpec& spec) {
  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  long double columns = spec.column_count();
  long double ratio = static_cast<long double>(spec.rect_count()) / columns;
  return static_cast<double>(ld_log(columns) / lm + ld_log(ratio) / ln);
}

double assouad_dim(const CarpetSpec& spec) {
  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  int mx = 0;
  for (int col : spec.columns()) mx = std::max(mx, spec.count_in_column(col));
  return static_cast<double>(ld_log(spec.column_count()) / lm + ld_log(mx) / ln);
}

double lower_dim(const CarpetSpec& spec) {
  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  int mn = spec.rect_count();
  for (int col : spec.columns()) mn = std::min(mn, spec.count_in_column(col));
  return static_cast<double>(ld_log(spec.column_count()) / lm + ld_log(mn) / ln);
}

double affinity_dim(const CarpetSpec& spec) {
  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  long double d = spec.rect_count();
  long double first = ld_log(d) / lm;
  if (first <= 1) return static_cast<double>(first);
  long double second = 1 + ld_log(d / spec.m()) / ln;
  return static_cast<double>(std::min<long double>(second, 2));
}

DimensionReport dimension_report(const CarpetSpec& spec) {
  DimensionReport rep;
  rep.hausdorff = hausdorff_dim(spec);
  rep.box = box_dim_formula(spec);
  rep.packing = rep.box;
  rep.assouad = assouad_dim(spec);
  rep.lower = lower_dim(spec);
  rep.affinity = affinity_dim(spec);

  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  long double gamma = lm / ln;
  long double lse = log_moment(spec, gamma);  // = s * ln m
  long double slice = 0;
  for (int col : spec.columns()) {
    long double lN = ld_log(spec.count_in_column(col));
    long double p_col = std::exp(gamma * lN - lse);
    long double p_rect = std::exp((gamma - 1) * lN - lse);
    rep.column_weights[col] = static_cast<double>(p_col);
    for (int j : spec.rows_of(col))
      rep.weights[{col, j}] = static_cast<double>(p_rect);
    slice += p_col * lN / ln;
  }
  rep.expected_slice = static_cast<double>(slice);
  return rep;
}

std::string report_to_json(const DimensionReport& report) {
  nlohmann::json doc;
  doc["hausdorff"] = report.hausdorff;
  doc["box"] = report.box;
  doc["packing"] = report.packing;
  doc["assouad"] = report.assouad;
  doc["lower"] = report.lower;
  doc["affinity"] = report.affinity;
  doc["expected_slice"] = report.expected_slice;
  nlohmann::json weights = nlohmann::json::object();
  for (const auto& [key, v] : report.weights)
    weights[std::to_string(key.first) + "," + std::to_string(key.second)] = v;
  doc["weights"] = std::move(weights);
  nlohmann::json projected = nlohmann::json::object();
  for (const auto& [col, v] : report.column_weights)
    projected[std::to_string(col)] = v;
  doc["projected_weights"] = std::move(projected);
  doc["flags"] = {{"assouad_lower_standard_only", report.assouad_lower_standard_only}};
  return doc.dump();
}

GeneralDims general_dims(const GeneralCarpetSpec& spec) {
  long double log_inv_a = static_cast<long double>(-log_rational(spec.a()));
  long double log_inv_b = static_cast<long double>(-log_rational(spec.b()));
  long double columns = spec.column_count();
  long double rects = spec.rect_count();

  GeneralDims out;
  if (spec.wide()) {
    // log(a * sum N_i) / log(1/b), shifted up by the full horizontal direction
    out.box = static_cast<double>(1 + (ld_log(rects) - log_inv_a) / log_inv_b);
  } else {
    out.box = static_cast<double>(ld_log(columns) / log_inv_a +
                                  ld_log(rects / columns) / log_inv_b);
  }
  if (!(spec.wide() && spec.a() > Rational(1, 2))) {
    long double gamma = log_inv_a / log_inv_b;  // log a / log b
    std::vector<long double> terms;
    for (const auto& col : spec.columns())
      terms.push_back(gamma * ld_log(col.heights.size()));
    out.hausdorff = static_cast<double>(log_sum_exp(terms) / log_inv_a);
  }
  return out;
}

std::string general_dims_to_json(const GeneralCarpetSpec& spec,
                                 const GeneralDims& dims) {
  nlohmann::json doc;
  doc["box"] = dims.box;
  if (dims.hausdorff) doc["hausdorff"] = *dims.hausdorff;
  doc["flags"] = {{"wide", spec.wide()},
                  {"hausdorff_valid", dims.hausdorff.has_value()}};
  return doc.dump();
}

SubsystemStats subsystem_stats(const CarpetSpec& spec, int k) {
  int rects = spec.rect_count();
  if (k < rects)
    throw SpecError("depth must be at least the rectangle count");
  int q = k / rects;
  int theta = rects * q;

  long double log_fact_theta = std::lgamma(static_cast<long double>(theta) + 1);
  long double log_fact_q = std::lgamma(static_cast<long double>(q) + 1);

  SubsystemStats st;
  st.k = k;
  st.theta_k = theta;
  st.log_card = static_cast<double>(log_fact_theta - rects * log_fact_q);
  long double projected_sum = 0;
  for (int col : spec.columns())
    projected_sum +=
        std::lgamma(static_cast<long double>(spec.count_in_column(col)) * q + 1);
  st.log_card_projected = static_cast<double>(log_fact_theta - projected_sum);

  long double lm = ld_log(spec.m()), ln = ld_log(spec.n());
  long double sbar = ld_log(spec.column_count()) / lm;
  st.s_k = static_cast<double>(
      static_cast<long double>(st.log_card) / (k * ln) + sbar * (1 - lm / ln));
  return st;
}

namespace {

BigInt factorial(int v) {
  BigInt out = 1;
  for (int i = 2; i <= v; ++i) out *= i;
  return out;
}

}  // namespace

BigInt card_H_exact(const CarpetSpec& spec, int k) {
  int rects = spec.rect_count();
  if (k < rects)
    throw SpecError("depth must be at least the rectangle count");
  int q = k / rects;
  BigInt denom = 1;
  BigInt fq = factorial(q);
  for (int i = 0; i < rects; ++i) denom *= fq;
  return factorial(rects * q) / denom;
}

BigInt card_Hbar_exact(const CarpetSpec& spec, int k) {
  int rects = spec.rect_count();
  if (k < rects)
    throw SpecError("depth must be at least the rectangle count");
  int q = k / rects;
  BigInt denom = 1;
  for (int col : spec.columns())
    denom *= factorial(spec.count_in_column(col) * q);
  return factorial(rects * q) / denom;
}

std::pair<double, double> stirling_bounds(int b) {
  if (b < 2) throw SpecError("bracket needs b >= 2");
  double lb = static_cast<double>(b) * std::log(b) - b;
  return {lb, lb + std::log(b)};
}

}  // namespace carpets

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carpets/rational.hpp"

namespace carpets {

// A word over the occupied columns (projection alphabet).
using ProjectedWord = std::vector<int>;
// A word over the selected rectangles, as (column, row) pairs.
using FullWord = std::vector<std::pair<int, int>>;

// An m-by-n grid system: n > m > 1, rects a nonempty duplicate-free set of
// 1-based (column, row) cells.  Column structure is derived on construction.
class CarpetSpec {
 public:
  static CarpetSpec create(int m, int n, std::vector<std::pair<int, int>> rects);

  int m() const { return m_; }
  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& rects() const { return rects_; }
  const std::vector<int>& columns() const { return columns_; }  // occupied, sorted
  int rect_count() const { return static_cast<int>(rects_.size()); }
  int column_count() const { return static_cast<int>(columns_.size()); }
  int count_in_column(int column) const;          // N_i
  std::vector<int> rows_of(int column) const;     // sorted rows of a column
  bool is_full_grid() const { return rect_count() == m_ * n_; }
  bool uniform_fibres() const;                    // all N_i equal

 private:
  CarpetSpec() = default;
  int m_ = 0;
  int n_ = 0;
  std::vector<std::pair<int, int>> rects_;        // sorted, unique
  std::vector<int> columns_;
  std::map<int, int> counts_;
};

// Exact per-column horizontal offsets; domain must equal the occupied columns,
// each value in [0, 1 - 1/m].
struct TranslationVector {
  std::map<int, Rational> entries;

  const Rational& at(int column) const { return entries.at(column); }
  bool has_duplicates() const;
};

struct GeneralColumn {
  Rational t;                      // horizontal offset of the column
  std::vector<Rational> heights;   // vertical offsets w of its rectangles
};

// Contraction ratios a (horizontal) and b (vertical) with per-column free
// heights.  `wide` permits a in (1/2, 1) and more than floor(1/a) columns,
// switching the box-dimension formula.
class GeneralCarpetSpec {
 public:
  static GeneralCarpetSpec create(Rational a, Rational b, bool wide,
                                  std::vector<GeneralColumn> columns);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  bool wide() const { return wide_; }
  const std::vector<GeneralColumn>& columns() const { return columns_; }
  int column_count() const { return static_cast<int>(columns_.size()); }
  int rect_count() const;

 private:
  GeneralCarpetSpec() = default;
  Rational a_, b_;
  bool wide_ = false;
  std::vector<GeneralColumn> columns_;
};

// Result of parsing a JSON spec document: exactly one of the two classes.
struct ParsedSpec {
  std::optional<CarpetSpec> standard;
  std::optional<TranslationVector> translations;  // set iff standard
  std::optional<GeneralCarpetSpec> general;
};

// JSON schema, standard class:
//   {"m":int, "n":int, "rects":[[i,j],...], "translations":["p/q",...]|"standard"}
// (omitted "translations" means "standard"; the array is aligned with the
// occupied columns in increasing order).  Generalized class:
//   {"a":"p/q","b":"p/q","wide":bool,"columns":[{"t":"p/q","heights":[...]},...]}
ParsedSpec parse_spec(const std::string& json_text);

std::string serialize_spec(const CarpetSpec& spec, const TranslationVector& t);
std::string serialize_spec(const GeneralCarpetSpec& spec);

// t_i = (i-1)/m for each occupied column.
TranslationVector standard_translations(const CarpetSpec& spec);
bool is_standard_translations(const CarpetSpec& spec, const TranslationVector& t);

// Domain/range validation for an externally built vector.
void validate_translations(const CarpetSpec& spec, const TranslationVector& t);

// S-bar_rho(0) = sum_j t_{rho_j} m^{-(j-1)}, exact.
Rational compose_projected(const CarpetSpec& spec, const TranslationVector& t,
                           const ProjectedWord& rho);

// Columns with identical offsets become one column holding the union of their
// row sets (relabelled to the smallest merged index).  Idempotent.
std::pair<CarpetSpec, TranslationVector> merge_equal_columns(
    const CarpetSpec& spec, const TranslationVector& t);

// Embedding a = 1/m, b = 1/n, heights (j-1)/n.
GeneralCarpetSpec to_general(const CarpetSpec& spec, const TranslationVector& t);

}  // namespace carpets

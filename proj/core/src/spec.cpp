#include "carpets/spec.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "carpets/errors.hpp"

namespace carpets {

using nlohmann::json;

CarpetSpec CarpetSpec::create(int m, int n, std::vector<std::pair<int, int>> rects) {
  if (m < 2) throw SpecError("m must be at least 2");
  if (n <= m) throw SpecError("n must exceed m");
  if (rects.empty()) throw SpecError("rect set must be nonempty");
  std::sort(rects.begin(), rects.end());
  if (std::adjacent_find(rects.begin(), rects.end()) != rects.end())
    throw SpecError("duplicate rect in spec");
  CarpetSpec out;
  out.m_ = m;
  out.n_ = n;
  for (const auto& [i, j] : rects) {
    if (i < 1 || i > m || j < 1 || j > n) {
      std::ostringstream msg;
      msg << "rect (" << i << "," << j << ") outside the " << m << "x" << n << " grid";
      throw SpecError(msg.str());
    }
    ++out.counts_[i];
  }
  out.rects_ = std::move(rects);
  for (const auto& [i, c] : out.counts_) {
    (void)c;
    out.columns_.push_back(i);
  }
  return out;
}

int CarpetSpec::count_in_column(int column) const {
  auto it = counts_.find(column);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<int> CarpetSpec::rows_of(int column) const {
  std::vector<int> rows;
  for (const auto& [i, j] : rects_)
    if (i == column) rows.push_back(j);
  return rows;  // rects_ is sorted, so rows come out sorted
}

bool CarpetSpec::uniform_fibres() const {
  int first = counts_.begin()->second;
  for (const auto& [i, c] : counts_) {
    (void)i;
    if (c != first) return false;
  }
  return true;
}

bool TranslationVector::has_duplicates() const {
  std::set<Rational> seen;
  for (const auto& [i, v] : entries) {
    (void)i;
    if (!seen.insert(v).second) return true;
  }
  return false;
}

GeneralCarpetSpec GeneralCarpetSpec::create(Rational a, Rational b, bool wide,
                                            std::vector<GeneralColumn> columns) {
  if (b <= 0 || a >= 1 || b >= a) throw SpecError("need 0 < b < a < 1");
  if (!wide && a > Rational(1, 2))
    throw SpecError("a must be at most 1/2 unless the wide flag is set");
  int count = static_cast<int>(columns.size());
  if (count < 2) throw SpecError("need at least two columns");
  if (!wide && Rational(count) * a > 1)
    throw SpecError("too many columns for horizontal contraction a");
  for (const auto& col : columns) {
    if (col.t < 0 || col.t > 1 - a)
      throw SpecError("column offset outside [0, 1-a]");
    if (col.heights.empty()) throw SpecError("column without rectangles");
    for (const auto& w : col.heights)
      if (w < 0 || w > 1 - b) throw SpecError("height outside [0, 1-b]");
    for (std::size_t j1 = 0; j1 < col.heights.size(); ++j1)
      for (std::size_t j2 = j1 + 1; j2 < col.heights.size(); ++j2)
        if (abs(col.heights[j1] - col.heights[j2]) < b)
          throw SpecError("column heights overlap: |w-w'| < b");
  }
  GeneralCarpetSpec out;
  out.a_ = std::move(a);
  out.b_ = std::move(b);
  out.wide_ = wide;
  out.columns_ = std::move(columns);
  return out;
}

int GeneralCarpetSpec::rect_count() const {
  int total = 0;
  for (const auto& col : columns_) total += static_cast<int>(col.heights.size());
  return total;
}

namespace {

Rational rational_field(const json& value, const char* what) {
  if (!value.is_string())
    throw ParseError(std::string(what) + " must be a rational encoded as a string");
  return parse_rational(value.get<std::string>());
}

ParsedSpec parse_standard(const json& doc) {
  if (!doc.contains("n")) throw ParseError("standard spec needs \"n\"");
  if (!doc["m"].is_number_integer() || !doc["n"].is_number_integer())
    throw ParseError("\"m\" and \"n\" must be integers");
  if (!doc.contains("rects") || !doc["rects"].is_array())
    throw ParseError("\"rects\" must be an array of [column, row] pairs");
  std::vector<std::pair<int, int>> rects;
  for (const auto& r : doc["rects"]) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
        !r[1].is_number_integer())
      throw ParseError("each rect must be an integer pair [column, row]");
    rects.emplace_back(r[0].get<int>(), r[1].get<int>());
  }
  CarpetSpec spec =
      CarpetSpec::create(doc["m"].get<int>(), doc["n"].get<int>(), std::move(rects));

  TranslationVector t;
  if (!doc.contains("translations") ||
      (doc["translations"].is_string() &&
       doc["translations"].get<std::string>() == "standard")) {
    t = standard_translations(spec);
  } else if (doc["translations"].is_array()) {
    const auto& arr = doc["translations"];
    if (static_cast<int>(arr.size()) != spec.column_count())
      throw SpecError("translations must list one entry per occupied column");
    int idx = 0;
    for (int col : spec.columns())
      t.entries[col] = rational_field(arr[idx++], "translation");
  } else {
    throw ParseError("\"translations\" must be \"standard\" or an array");
  }
  validate_translations(spec, t);

  ParsedSpec out;
  out.standard = std::move(spec);
  out.translations = std::move(t);
  return out;
}

ParsedSpec parse_general(const json& doc) {
  Rational a = rational_field(doc.at("a"), "\"a\"");
  if (!doc.contains("b")) throw ParseError("generalized spec needs \"b\"");
  Rational b = rational_field(doc["b"], "\"b\"");
  bool wide = false;
  if (doc.contains("wide")) {
    if (!doc["wide"].is_boolean()) throw ParseError("\"wide\" must be a boolean");
    wide = doc["wide"].get<bool>();
  }
  if (!doc.contains("columns") || !doc["columns"].is_array())
    throw ParseError("\"columns\" must be an array");
  std::vector<GeneralColumn> columns;
  for (const auto& c : doc["columns"]) {
    if (!c.is_object() || !c.contains("t") || !c.contains("heights") ||
        !c["heights"].is_array())
      throw ParseError("each column must be {\"t\": rational, \"heights\": [...]}");
    GeneralColumn col;
    col.t = rational_field(c["t"], "column offset");
    for (const auto& w : c["heights"])
      col.heights.push_back(rational_field(w, "height"));
    columns.push_back(std::move(col));
  }
  ParsedSpec out;
  out.general = GeneralCarpetSpec::create(std::move(a), std::move(b), wide,
                                          std::move(columns));
  return out;
}

}  // namespace

ParsedSpec parse_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("spec must be a JSON object");
  bool standard = doc.contains("m");
  bool general = doc.contains("a");
  if (standard == general)
    throw ParseError("spec must contain exactly one of \"m\" (grid class) or "
                     "\"a\" (generalized class)");
  try {
    return standard ? parse_standard(doc) : parse_general(doc);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad spec shape: ") + e.what());
  }
}

std::string serialize_spec(const CarpetSpec& spec, const TranslationVector& t) {
  json doc;
  doc["m"] = spec.m();
  doc["n"] = spec.n();
  json rects = json::array();
  for (const auto& [i, j] : spec.rects()) rects.push_back(json::array({i, j}));
  doc["rects"] = std::move(rects);
  if (is_standard_translations(spec, t)) {
    doc["translations"] = "standard";
  } else {
    json arr = json::array();
    for (int col : spec.columns()) arr.push_back(format_rational(t.at(col)));
    doc["translations"] = std::move(arr);
  }
  return doc.dump();
}

std::string serialize_spec(const GeneralCarpetSpec& spec) {
  json doc;
  doc["a"] = format_rational(spec.a());
  doc["b"] = format_rational(spec.b());
  doc["wide"] = spec.wide();
  json columns = json::array();
  for (const auto& col : spec.columns()) {
    json c;
    c["t"] = format_rational(col.t);
    json heights = json::array();
    for (const auto& w : col.heights) heights.push_back(format_rational(w));
    c["heights"] = std::move(heights);
    columns.push_back(std::move(c));
  }
  doc["columns"] = std::move(columns);
  return doc.dump();
}

TranslationVector standard_translations(const CarpetSpec& spec) {
  TranslationVector t;
  for (int col : spec.columns()) t.entries[col] = Rational(col - 1, spec.m());
  return t;
}

bool is_standard_translations(const CarpetSpec& spec, const TranslationVector& t) {
  for (int col : spec.columns())
    if (t.at(col) != Rational(col - 1, spec.m())) return false;
  return true;
}

void validate_translations(const CarpetSpec& spec, const TranslationVector& t) {
  if (t.entries.size() != spec.columns().size())
    throw SpecError("translation domain must equal the occupied columns");
  Rational upper(spec.m() - 1, spec.m());
  for (int col : spec.columns()) {
    auto it = t.entries.find(col);
    if (it == t.entries.end())
      throw SpecError("missing translation for column " + std::to_string(col));
    if (it->second < 0 || it->second > upper) {
      std::ostringstream msg;
      msg << "translation t_" << col << " outside [0, 1-1/m]";
      throw SpecError(msg.str());
    }
  }
}

Rational compose_projected(const CarpetSpec& spec, const TranslationVector& t,
                           const ProjectedWord& rho) {
  if (rho.empty()) throw SpecError("word must be nonempty");
  Rational acc = 0;
  for (auto it = rho.rbegin(); it != rho.rend(); ++it) {
    auto entry = t.entries.find(*it);
    if (entry == t.entries.end())
      throw SpecError("word symbol " + std::to_string(*it) +
                      " is not an occupied column");
    acc = entry->second + acc / spec.m();
  }
  return acc;
}

std::pair<CarpetSpec, TranslationVector> merge_equal_columns(
    const CarpetSpec& spec, const TranslationVector& t) {
  // Group columns by offset; label each group by its smallest member.
  std::map<Rational, std::vector<int>> groups;
  for (int col : spec.columns()) groups[t.at(col)].push_back(col);

  std::vector<std::pair<int, int>> rects;
  TranslationVector merged_t;
  for (const auto& [offset, cols] : groups) {
    int label = cols.front();
    std::set<int> rows;
    for (int col : cols)
      for (int j : spec.rows_of(col)) rows.insert(j);
    for (int j : rows) rects.emplace_back(label, j);
    merged_t.entries[label] = offset;
  }
  return {CarpetSpec::create(spec.m(), spec.n(), std::move(rects)),
          std::move(merged_t)};
}

GeneralCarpetSpec to_general(const CarpetSpec& spec, const TranslationVector& t) {
  std::vector<GeneralColumn> columns;
  for (int col : spec.columns()) {
    GeneralColumn c;
    c.t = t.at(col);
    for (int j : spec.rows_of(col)) c.heights.emplace_back(j - 1, spec.n());
    columns.push_back(std::move(c));
  }
  return GeneralCarpetSpec::create(Rational(1, spec.m()), Rational(1, spec.n()),
                                   false, std::move(columns));
}

}  // namespace carpets

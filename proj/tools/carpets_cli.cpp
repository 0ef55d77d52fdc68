// carpets: exact analysis of grid self-affine carpets with movable columns.
//
// Subcommands: dims, delta, boxcount, lowerbound, render, scan.
// Exit codes: 0 success, 1 parse failure, 2 invariant violation,
//             3 exact overlap detected, 4 budget exceeded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "carpets/boxcount.hpp"
#include "carpets/dimensions.hpp"
#include "carpets/errors.hpp"
#include "carpets/overlap.hpp"
#include "carpets/render.hpp"
#include "carpets/scan.hpp"
#include "carpets/spec.hpp"

namespace {

using namespace carpets;

struct Common {
  std::string spec_path;
  std::string out_path;
  int threads = 0;
  std::uint64_t budget = 20000000;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec_path, "Spec JSON path")->required();
  cmd->add_option("--out", c.out_path, "Output path (default: stdout)");
  cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores");
  cmd->add_option("--budget", c.budget, "Enumeration node budget");
}

ParsedSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

// Standard-class commands reject generalized specs.
std::pair<CarpetSpec, TranslationVector> require_standard(const ParsedSpec& p) {
  if (!p.standard)
    throw SpecError("this command needs a standard m-by-n spec");
  return {*p.standard, *p.translations};
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(c.out_path, std::ios::binary);
  if (!out) throw ParseError("cannot open output file: " + c.out_path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_dims(const Common& c) {
  ParsedSpec parsed = load_spec(c.spec_path);
  if (parsed.general) {
    GeneralDims dims = general_dims(*parsed.general);
    emit(c, general_dims_to_json(*parsed.general, dims) + "\n");
    return 0;
  }
  const CarpetSpec& spec = *parsed.standard;
  const TranslationVector& t = *parsed.translations;
  nlohmann::json doc = nlohmann::json::parse(report_to_json(dimension_report(spec)));
  if (t.has_duplicates()) {
    auto [merged, merged_t] = merge_equal_columns(spec, t);
    (void)merged_t;
    doc["merged"] =
        nlohmann::json::parse(report_to_json(dimension_report(merged)));
  }
  emit(c, doc.dump(2) + "\n");
  return 0;
}

int cmd_delta(const Common& c, int max_depth) {
  auto [spec, t] = require_standard(load_spec(c.spec_path));
  DeltaProfile profile = decay_profile(spec, t, max_depth, c.budget, c.threads);

  std::ostringstream csv;
  csv << "k,delta_num,delta_den,decay,classification\n";
  for (const DeltaEntry& e : profile.entries)
    csv << e.k << "," << numerator(e.delta) << "," << denominator(e.delta)
        << "," << fmt_double(e.decay) << ","
        << to_string(profile.classification) << "\n";
  emit(c, csv.str());

  if (profile.witness) {
    std::string w = witness_to_json(*profile.witness);
    if (c.out_path.empty()) {
      std::cerr << w << "\n";
    } else {
      std::ofstream out(c.out_path + ".witness.json", std::ios::binary);
      out << w << "\n";
    }
  }
  return profile.classification == DeltaClass::ExactOverlap ? 3 : 0;
}

int cmd_boxcount(const Common& c, int lmin, int lmax, int extra) {
  auto [spec, t] = require_standard(load_spec(c.spec_path));
  BoxDimEstimate est =
      estimate_box_dim(spec, t, lmin, lmax, extra, c.budget, c.threads);

  std::ostringstream csv;
  csv << "l,r_num,r_den,cover_count,sample_count,L\n";
  for (const GridCount& g : est.levels)
    csv << g.level << "," << numerator(g.r) << "," << denominator(g.r) << ","
        << g.cover_count << "," << g.sample_count << "," << g.cover_depth
        << "\n";
  csv << "slope," << fmt_double(est.slope) << "\n";
  csv << "stderr," << fmt_double(est.stderr_) << "\n";
  csv << "formula," << fmt_double(est.formula_value) << "\n";
  emit(c, csv.str());
  return 0;
}

int cmd_lowerbound(const Common& c, int k, int ell) {
  auto [spec, t] = require_standard(load_spec(c.spec_path));
  LowerBoundCertificate cert =
      certified_lower_bound(spec, t, k, ell, c.budget, c.threads);
  emit(c, certificate_to_json(cert) + "\n");
  return 0;
}

int cmd_render(const Common& c, int level, int extra) {
  auto [spec, t] = require_standard(load_spec(c.spec_path));
  RasterImage img =
      render_occupancy(spec, t, level, extra, c.budget, c.threads);
  emit(c, pgm_bytes(img));
  return 0;
}

int cmd_scan(const Common& c, std::uint64_t samples, std::uint64_t seed,
             int bits, int max_depth) {
  auto [spec, t] = require_standard(load_spec(c.spec_path));
  (void)t;
  if (samples < 1) throw SpecError("need at least one sample");
  std::vector<ScanRow> rows =
      run_scan(spec, samples, seed, bits, max_depth, c.budget);
  emit(c, scan_csv(spec, rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact dimension and overlap analysis of grid self-affine carpets"};
  app.require_subcommand(1);

  Common common;
  int max_depth = 8;
  int lmin = 3, lmax = 6, extra = 3;
  int lb_k = 0, lb_ell = 1;
  int level = 2;
  std::uint64_t samples = 100, seed = 1;
  int bits = 20, scan_depth = 6;

  CLI::App* dims = app.add_subcommand("dims", "Closed-form dimension report (JSON)");
  add_common(dims, common);

  CLI::App* delta = app.add_subcommand("delta", "Cylinder-gap decay profile (CSV)");
  add_common(delta, common);
  delta->add_option("--max-depth", max_depth, "Deepest level to scan");

  CLI::App* boxcount = app.add_subcommand("boxcount", "Grid cell counts and slope (CSV)");
  add_common(boxcount, common);
  boxcount->add_option("--lmin", lmin, "Smallest grid level");
  boxcount->add_option("--lmax", lmax, "Largest grid level");
  boxcount->add_option("--extra", extra, "Cover depth beyond the grid level");

  CLI::App* lowerbound = app.add_subcommand(
      "lowerbound", "Disjoint-subsystem cell-count certificate (JSON)");
  add_common(lowerbound, common);
  lowerbound->add_option("--k", lb_k, "Word depth of the equal-frequency class")
      ->required();
  lowerbound->add_option("--l", lb_ell, "Number of concatenated words");

  CLI::App* render = app.add_subcommand("render", "Occupancy raster (binary PGM)");
  add_common(render, common);
  render->add_option("--level", level, "Grid level; image side is n^level");
  render->add_option("--extra", extra, "Cover depth beyond the grid level");

  CLI::App* scan = app.add_subcommand("scan", "Random-offset overlap scan (CSV)");
  add_common(scan, common);
  scan->add_option("--samples", samples, "Number of offset vectors");
  scan->add_option("--seed", seed, "Generator seed");
  scan->add_option("--denominator-bits", bits, "Fractional bits of each offset");
  scan->add_option("--max-depth", scan_depth, "Overlap search depth per sample");

  CLI11_PARSE(app, argc, argv);

  try {
    if (dims->parsed()) return cmd_dims(common);
    if (delta->parsed()) return cmd_delta(common, max_depth);
    if (boxcount->parsed()) return cmd_boxcount(common, lmin, lmax, extra);
    if (lowerbound->parsed()) return cmd_lowerbound(common, lb_k, lb_ell);
    if (render->parsed()) return cmd_render(common, level, extra);
    if (scan->parsed()) return cmd_scan(common, samples, seed, bits, scan_depth);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const SpecError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

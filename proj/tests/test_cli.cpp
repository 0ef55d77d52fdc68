#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(CARPETS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_file(const std::string& name, const std::string& content) {
  std::ofstream out(name, std::ios::binary);
  out << content;
  return name;
}

std::string read_file(const std::string& name) {
  std::ifstream in(name, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kOverlapSpec =
    R"({"m":4,"n":5,"rects":[[1,1],[2,1],[3,1]],"translations":["0","1/4","5/16"]})";
const char* kStandardSpec =
    R"({"m":3,"n":5,"rects":[[1,1],[2,1],[2,3],[3,1],[3,3],[3,5]]})";
const char* kSscSpec = R"({"m":2,"n":4,"rects":[[1,1],[1,3],[2,2]]})";
const char* kGeneralSpec =
    R"({"a":"1/3","b":"1/5","wide":false,)"
    R"("columns":[{"t":"0","heights":["0","2/5"]},{"t":"1/2","heights":["0"]}]})";

}  // namespace

TEST_CASE("cli: dimension reports") {
  std::string path = write_file("cli_dims.json", kStandardSpec);
  RunResult r = run_cli("dims --spec " + path);
  CHECK(r.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["hausdorff"].get<double>() > 1.4);
  CHECK(doc["box"].get<double>() > doc["hausdorff"].get<double>());
  CHECK_FALSE(doc.contains("merged"));

  // duplicate offsets add a merged sub-report with strictly smaller values
  std::string dup = write_file(
      "cli_dims_dup.json",
      R"({"m":3,"n":5,"rects":[[1,1],[2,1],[2,3],[3,1],[3,3],[3,5]],)"
      R"("translations":["0","1/2","1/2"]})");
  RunResult rd = run_cli("dims --spec " + dup);
  CHECK(rd.exit_code == 0);
  nlohmann::json dd = nlohmann::json::parse(rd.out);
  REQUIRE(dd.contains("merged"));
  CHECK(dd["merged"]["hausdorff"].get<double>() < dd["hausdorff"].get<double>());
  CHECK(dd["merged"]["box"].get<double>() < dd["box"].get<double>());

  std::string gen = write_file("cli_dims_gen.json", kGeneralSpec);
  RunResult rg = run_cli("dims --spec " + gen);
  CHECK(rg.exit_code == 0);
  nlohmann::json dg = nlohmann::json::parse(rg.out);
  CHECK(dg["box"].get<double>() == doctest::Approx(0.882859389984));
  CHECK(dg["flags"]["hausdorff_valid"].get<bool>());
}

TEST_CASE("cli: gap profile and overlap signalling") {
  std::string path = write_file("cli_delta.json", kStandardSpec);
  RunResult r = run_cli("delta --spec " + path + " --max-depth 6");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("k,delta_num,delta_den,decay,classification\n", 0) == 0);
  CHECK(r.out.find("NoConcentrationEvidence") != std::string::npos);

  // overlapping offsets: exit 3 and a witness sidecar next to --out
  std::string overlap = write_file("cli_delta_overlap.json", kOverlapSpec);
  RunResult ro =
      run_cli("delta --spec " + overlap + " --max-depth 6 --out cli_delta.csv");
  CHECK(ro.exit_code == 3);
  std::string csv = read_file("cli_delta.csv");
  CHECK(csv.find("ExactOverlap") != std::string::npos);
  nlohmann::json witness =
      nlohmann::json::parse(read_file("cli_delta.csv.witness.json"));
  CHECK(witness["k"].get<int>() == 2);

  // duplicate offsets collide at depth one
  std::string dup = write_file(
      "cli_delta_dup.json",
      R"({"m":3,"n":4,"rects":[[1,1],[2,1]],"translations":["1/3","1/3"]})");
  RunResult rd = run_cli("delta --spec " + dup + " --max-depth 3");
  CHECK(rd.exit_code == 3);
  CHECK(rd.out.find("1,0,1,inf") != std::string::npos);
}

TEST_CASE("cli: box counting") {
  std::string path = write_file("cli_box.json", kSscSpec);
  RunResult r = run_cli("boxcount --spec " + path + " --lmin 3 --lmax 5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("l,r_num,r_den,cover_count,sample_count,L\n", 0) == 0);
  CHECK(r.out.find("3,1,64,242,") != std::string::npos);
  CHECK(r.out.find("slope,") != std::string::npos);
  CHECK(r.out.find("formula,1.29248") != std::string::npos);

  RunResult rb = run_cli("boxcount --spec " + path +
                         " --lmin 3 --lmax 5 --budget 50");
  CHECK(rb.exit_code == 4);
}

TEST_CASE("cli: lower bound certificate") {
  std::string path = write_file(
      "cli_lb.json", R"({"m":2,"n":4,"rects":[[1,1],[1,3],[2,1],[2,3]]})");
  RunResult r = run_cli("lowerbound --spec " + path + " --k 4");
  CHECK(r.exit_code == 0);
  nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["cell_count"].get<std::uint64_t>() == 1024);
  CHECK(doc["card_selected"].get<int>() == 4);
  CHECK(doc["statistic"].get<double>() == doctest::Approx(1.25));
}

TEST_CASE("cli: render writes a valid raster") {
  std::string path = write_file("cli_render.json", kSscSpec);
  RunResult r = run_cli("render --spec " + path + " --level 2 --out cli_render.pgm");
  CHECK(r.exit_code == 0);
  std::string pgm = read_file("cli_render.pgm");
  CHECK(pgm.compare(0, 13, "P5\n16 16\n255\n") == 0);
  CHECK(pgm.size() == 13 + 256);
}

TEST_CASE("cli: scans are reproducible") {
  std::string path = write_file("cli_scan.json", kStandardSpec);
  std::string args =
      "scan --spec " + path + " --samples 3 --seed 7 --denominator-bits 12 --max-depth 4";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("sample,t_1,t_2,t_3,overlap,overlap_k,hausdorff,box,"
                    "merged_hausdorff,merged_box\n", 0) == 0);
  // 3 data rows after the header
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 4);
}

TEST_CASE("cli: error paths map to the exit-code contract") {
  CHECK(run_cli("dims --spec does_not_exist.json").exit_code == 1);
  std::string bad = write_file("cli_bad.json", "{not json");
  CHECK(run_cli("dims --spec " + bad).exit_code == 1);
  std::string invalid =
      write_file("cli_invalid.json", R"({"m":3,"n":3,"rects":[[1,1]]})");
  CHECK(run_cli("dims --spec " + invalid).exit_code == 2);

  // standard-only commands reject the generalized class
  std::string gen = write_file("cli_gen.json", kGeneralSpec);
  CHECK(run_cli("delta --spec " + gen).exit_code == 2);
  CHECK(run_cli("boxcount --spec " + gen).exit_code == 2);
  CHECK(run_cli("render --spec " + gen).exit_code == 2);
}

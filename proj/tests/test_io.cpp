#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#ifdef MTSC_CLI_PATH
#include <sys/wait.h>
#endif

#include "mtsc/io.hpp"
#include "mtsc/region_jd.hpp"
#include "mtsc/sim.hpp"
#include "support.hpp"

using namespace mtsc;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "mtsc_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string scratch(const std::string& name) {
  return (scratch_dir() / name).string();
}

void put(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string get(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string dsbs_file() {
  const std::string path = scratch("dsbs.json");
  put(path, "{\"pmf\": [[0.375,0.125],[0.125,0.375]]}");
  return path;
}

}  // namespace

TEST_CASE("load_pmf") {
  const std::string ok = scratch("uniform.json");
  put(ok, "{\"pmf\": [[0.25,0.25],[0.25,0.25]]}");
  const JointPmf p = load_pmf(ok);
  CHECK(p.m() == 2);
  CHECK(p(0, 1) == doctest::Approx(0.25));

  const std::string bad = scratch("bad.json");
  put(bad, "{\"pmf\": [[0.25,");
  CHECK_THROWS_AS(load_pmf(bad), ParseError);

  const std::string wrong = scratch("wrong.json");
  put(wrong, "{\"pmf\": [[0.5, 0.6]]}");
  CHECK_THROWS_WITH_AS(load_pmf(wrong),
                       doctest::Contains("wrong.json"), ValidationError);

  const std::string missing = scratch("missing_field.json");
  put(missing, "{\"matrix\": [[1.0]]}");
  CHECK_THROWS_AS(load_pmf(missing), ParseError);

  CHECK_THROWS_AS(load_pmf(scratch("never_written.json")), IoError);
}

TEST_CASE("verify reports the entropy summary") {
  RunManifest m;
  m.command = "verify";
  m.input_path = dsbs_file();
  std::ostringstream out;
  CHECK(run(m, out) == 0);
  CHECK(out.str().find("H(X|Y)=0.811278124") != std::string::npos);
}

TEST_CASE("csv emission is deterministic and round-trips") {
  Table t;
  t.columns = {"a", "b"};
  t.rows = {{0.1234567891234, 2.0}, {3.5, 1.0 / 3.0}, {1e-12, 7e9}};
  const std::string p1 = scratch("t1.csv"), p2 = scratch("t2.csv");
  write_csv(t, p1);
  write_csv(t, p2);
  CHECK(get(p1) == get(p2));

  const Table back = read_csv(p1);
  CHECK(back.columns == t.columns);
  const std::string p3 = scratch("t3.csv");
  write_csv(back, p3);
  CHECK(get(p3) == get(p1));  // emit(load(emit(x))) is byte-identical

  Table empty;
  empty.columns = {"only", "header"};
  const std::string p4 = scratch("t4.csv");
  write_csv(empty, p4);
  CHECK(get(p4) == "only,header\n");
}

TEST_CASE("region-jd boundary at d=0 is the Slepian-Wolf corner segment") {
  RunManifest m;
  m.command = "region-jd";
  m.input_path = dsbs_file();
  m.params = {{"d", 0.0}, {"samples", 5}};
  m.output_path = scratch("sw.csv");
  std::ostringstream out;
  CHECK(run(m, out) == 0);
  const Table t = read_csv(m.output_path);
  REQUIRE(t.rows.size() == 5);
  const CornerPair c = jd_corner_points(load_pmf(m.input_path), 0.0);
  CHECK(t.rows.front()[0] == doctest::Approx(c.p1.rx).epsilon(1e-8));
  CHECK(t.rows.front()[1] == doctest::Approx(c.p1.ry).epsilon(1e-8));
  CHECK(t.rows.back()[0] == doctest::Approx(c.p2.rx).epsilon(1e-8));
  CHECK(t.rows.back()[1] == doctest::Approx(c.p2.ry).epsilon(1e-8));
}

TEST_CASE("region-jd membership verdict with certificate") {
  RunManifest m;
  m.command = "region-jd";
  m.input_path = dsbs_file();
  m.params = {{"rx", 0.5}, {"ry", 1.0}, {"d", 0.4}};
  m.output_path = scratch("verdict.json");
  std::ostringstream out;
  CHECK(run(m, out) == 0);
  const std::string verdict = get(m.output_path);
  CHECK(verdict.find("\"contains\": true") != std::string::npos);
  CHECK(verdict.find("delta_x") != std::string::npos);
  CHECK(out.str().find("contains=true") != std::string::npos);
}

TEST_CASE("region-xd curve emission is nonincreasing") {
  RunManifest m;
  m.command = "region-xd";
  m.input_path = dsbs_file();
  m.params = {{"samples", 5}, {"restarts", 6}};
  m.output_path = scratch("curve.csv");
  std::ostringstream out;
  CHECK(run(m, out) == 0);
  const Table t = read_csv(m.output_path);
  REQUIRE(t.rows.size() == 5);
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i][1] <= t.rows[i - 1][1] + 1e-9);
  // The sidecar labels the curve an achievable upper bound.
  CHECK(get(m.output_path + ".meta.json").find("achievable upper bound") !=
        std::string::npos);
}

TEST_CASE("simulate wz via the manifest matches the direct call") {
  RunManifest m;
  m.command = "simulate";
  m.scheme = "wz";
  m.input_path = dsbs_file();
  m.seed = 0;
  m.params = {{"n", 16}, {"rate", 0.4}, {"eps", 0.1}, {"trials", 150}};
  m.output_path = scratch("wz.csv");
  std::ostringstream out;
  CHECK(run(m, out) == 0);
  const Table t = read_csv(m.output_path);
  const SimConfig cfg{16, 0.1, 150, 0, 30.0};
  const SimResult direct = simulate_wz(load_pmf(m.input_path), cfg, 0.4);
  CHECK(t.rows.front()[0] ==
        doctest::Approx(direct.mean_distortion).epsilon(1e-8));
  CHECK(t.columns.back() == "rate_x");
}

TEST_CASE("artifacts are regenerable from the sidecar alone") {
  RunManifest m;
  m.command = "region-jd";
  m.input_path = dsbs_file();
  m.params = {{"d", 0.3}, {"samples", 9}};
  m.output_path = scratch("regen1.csv");
  std::ostringstream out;
  REQUIRE(run(m, out) == 0);

  // Rebuild the manifest from the sidecar record only.
  const std::string meta = get(m.output_path + ".meta.json");
  RunManifest rebuilt;
  rebuilt.command = "region-jd";
  rebuilt.input_path = dsbs_file();
  rebuilt.seed = 0;
  for (const char* key : {"d", "samples"}) {
    const std::string tag = std::string("\"") + key + "\": ";
    const std::size_t at = meta.find(tag);
    REQUIRE(at != std::string::npos);
    rebuilt.params[key] = std::strtod(meta.c_str() + at + tag.size(), nullptr);
  }
  rebuilt.output_path = scratch("regen2.csv");
  REQUIRE(run(rebuilt, out) == 0);
  CHECK(get(m.output_path) == get(rebuilt.output_path));
}

TEST_CASE("reruns with the same manifest are byte-identical") {
  for (const char* target : {"r1.csv", "r2.csv"}) {
    RunManifest m;
    m.command = "simulate";
    m.scheme = "jd";
    m.input_path = dsbs_file();
    m.params = {{"n", 16}, {"d", 0.3}, {"trials", 100}};
    m.output_path = scratch(target);
    std::ostringstream out;
    REQUIRE(run(m, out) == 0);
  }
  CHECK(get(scratch("r1.csv")) == get(scratch("r2.csv")));
}

TEST_CASE("error taxonomy maps to the documented exit codes") {
  CHECK(exit_code_for(IoError("x")) == 4);
  CHECK(exit_code_for(ParseError("x")) == 2);
  CHECK(exit_code_for(NotNormalized("x")) == 2);
  CHECK(exit_code_for(UnknownCommand("x")) == 2);
  CHECK(exit_code_for(std::runtime_error("x")) == 3);
  CHECK(error_record(ParseError("bad json")).find("ParseError") !=
        std::string::npos);

  RunManifest m;
  m.command = "nonsense";
  std::ostringstream out;
  CHECK_THROWS_AS(run(m, out), UnknownCommand);
}

#ifdef MTSC_CLI_PATH
TEST_CASE("the installed binary honors the exit-code contract") {
  const std::string cli = MTSC_CLI_PATH;
  const std::string quiet = " > " + scratch("cli_out.txt") + " 2>&1";
  CHECK(std::system((cli + " verify --pmf " + dsbs_file() + quiet).c_str()) ==
        0);
  const std::string bad = scratch("cli_bad.json");
  put(bad, "{\"pmf\": [[0.9,0.3]]}");
  int rc = std::system((cli + " verify --pmf " + bad + quiet).c_str());
  CHECK(WEXITSTATUS(rc) == 2);
  rc = std::system(
      (cli + " verify --pmf " + scratch("ghost.json") + quiet).c_str());
  CHECK(WEXITSTATUS(rc) == 4);
  rc = std::system((cli + " region-xd --pmf " + dsbs_file() +
                    " --ry-budget 0.4 --restarts 4" + quiet)
                       .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
}
#endif

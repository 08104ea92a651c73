#include <doctest.h>

#include <sstream>

#include "capsim/cli.hpp"
#include "capsim/csv.hpp"
#include "support.hpp"

using namespace capsim;
using capsim::testing::scratch_dir;
using capsim::testing::source_dir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string cfg(const char* name) { return (source_dir() / "configs" / name).string(); }

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"simulate"}).code == 1);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate writes its outputs and is reproducible") {
  const auto dir = scratch_dir("cli_sim");
  const auto a = run({"simulate", cfg("table2.cfg"), "--out", (dir / "a").string(), "--svg"});
  REQUIRE(a.code == 0);
  for (const char* f : {"release.csv", "profiles.csv", "manifest.json", "release.svg"}) CHECK(std::filesystem::exists(dir / "a" / f));
  const auto table = parse_numeric_csv(read_text_file(dir / "a" / "release.csv"));
  CHECK(table.rows.back()[table.column("t_s")] == 14400);
  CHECK(table.rows.back()[table.column("fraction")] >= 0.999);
  CHECK(read_text_file(dir / "a" / "manifest.json").find("\"resolved_strata\"") != std::string::npos);

  REQUIRE(run({"simulate", cfg("table2.cfg"), "--out", (dir / "b").string()}).code == 0);
  CHECK(read_text_file(dir / "a" / "release.csv") == read_text_file(dir / "b" / "release.csv"));
}

TEST_CASE("bad configurations exit 2") {
  const auto dir = scratch_dir("cli_bad");
  write_text_file(dir / "bad.cfg", "lambda: 1\nt_end: 10\nstrata:\n  - {thickness: 10, d_plus: 0.5, dr: 1, dt: 5}\n");
  const auto r = run({"simulate", (dir / "bad.cfg").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("CFL") != std::string::npos);
  CHECK(run({"simulate", (dir / "bad.cfg").string(), "--clamp-cfl", "--out", (dir / "o").string()}).code == 0);
  CHECK(run({"simulate", (dir / "missing.cfg").string()}).code == 2);
}

TEST_CASE("sweep writes one series per value") {
  const auto dir = scratch_dir("cli_sweep");
  write_text_file(dir / "s.cfg", "lambda: 0.2\nt_end: 600\nstrata:\n  - {thickness: 10, d_plus: 0.1, c_init: 1, dr: 1, dt: 0.5}\n");
  const auto r = run({"sweep", (dir / "s.cfg").string(), "--param", "lambda", "--values", "0,0.05,inf", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto text = read_text_file(dir / "sweep.csv");
  CHECK(text.find("lambda=0,") != std::string::npos);
  CHECK(text.find("lambda=inf,") != std::string::npos);
  CHECK(run({"sweep", (dir / "s.cfg").string(), "--param", "strata[0].beta", "--values", "0,50", "--out", dir.string()}).code == 3);
}

TEST_CASE("oracle command") {
  const auto dir = scratch_dir("cli_oracle");
  const auto r = run({"oracle", cfg("table2.cfg"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto table = parse_numeric_csv(read_text_file(dir / "oracle.csv"));
  CHECK(table.rows.size() == 241);
  CHECK(table.rows.back()[table.column("fraction")] > 0.999);
  CHECK(run({"oracle", cfg("table4.cfg"), "--out", dir.string()}).code == 2);
}

TEST_CASE("fit command") {
  const auto dir = scratch_dir("cli_fit");
  write_text_file(dir / "f.cfg",
                  "lambda: 0.05\nt_end: 600\nstrata:\n  - {thickness: 10, d_plus: 0.1, c_init: 1, dr: 1, dt: 0.5}\n"
                  "fit:\n  data_unit: fraction\n  max_evaluations: 30\n  parameters:\n"
                  "    - {path: lambda, lower: 0.001, upper: 1, log: true}\n");
  write_text_file(dir / "d.csv", "t_min,release\n0,0\n5,0.3\n10,0.5\n");
  const auto r = run({"fit", (dir / "f.cfg").string(), (dir / "d.csv").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"fit_report.txt", "fit_trace.csv", "best_config.yaml", "release.csv"}) CHECK(std::filesystem::exists(dir / f));
  CHECK(run({"fit", cfg("table2.cfg"), (dir / "d.csv").string(), "--out", dir.string()}).code == 2);
}

TEST_CASE("empty release has no plot") { CHECK_THROWS(release_svg(ReleaseRecord{})); }

#include <doctest.h>

#include "capsim/config.hpp"
#include "capsim/errors.hpp"
#include "support.hpp"

using namespace capsim;
using capsim::testing::source_dir;

TEST_CASE("shipped single-stratum configuration") {
  const auto rc = load_config(source_dir() / "configs/table2.cfg");
  const auto& c = rc.simulation;
  REQUIRE(c.capsule.strata.size() == 1);
  CHECK(c.capsule.strata[0].d_plus == 0.5);
  CHECK(c.capsule.strata[0].thickness == 100);
  CHECK(c.capsule.lambda == 1);
  CHECK(c.t_end == 14400);
  CHECK_FALSE(rc.fit.has_value());
}

TEST_CASE("shipped case-study configuration") {
  const auto rc = load_config(source_dir() / "configs/table4.cfg");
  const auto& s = rc.simulation.capsule.strata;
  REQUIRE(s.size() == 11);
  CHECK(s[1].fictitious);
  CHECK(s[2].d_plus == 6e-7);
  CHECK(s[2].alpha == 0.5);
  CHECK(s[2].c_init == 0);
  CHECK(s[3].c_init == 5.085e-3);
  CHECK(rc.simulation.capsule.lambda == 0.05);
  REQUIRE(rc.simulation.erosion.has_value());
  CHECK(rc.simulation.erosion->samples.size() == 5);
  REQUIRE(rc.fit.has_value());
  CHECK(rc.fit->parameters.size() == 3);
  CHECK(rc.fit->parameters[1].log_scale);
  CHECK(rc.fit->seed == 7);
}

TEST_CASE("emit and parse round trip") {
  for (const char* name : {"configs/table2.cfg", "configs/table4.cfg"}) {
    const auto rc = load_config(source_dir() / name);
    const auto text = emit_config(rc);
    CHECK(parse_config(text) == rc);
    CHECK(emit_config(parse_config(text)) == text);
  }
  const char* sink = "lambda: .inf\nt_end: 10\nstrata:\n  - {thickness: 5, d_plus: 0.1, dr: 1, dt: 0.5, c_init: 1}\n";
  const auto rc = parse_config(sink);
  CHECK(std::isinf(rc.simulation.capsule.lambda));
  CHECK(parse_config(emit_config(rc)) == rc);
}

TEST_CASE("missing capsule") {
  for (const char* text : {"", "lambda: 1\nt_end: 10\n"}) {
    try {
      parse_config(text);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("missing capsule") != std::string::npos);
    }
  }
}

TEST_CASE("unknown keys report their line") {
  const char* text = "lambda: 1\nt_end: 10\nstrata:\n  - thickness: 5\n    d_plus: 0.1\n    speed: 3\n    dr: 1\n    dt: 0.5\n";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 6);
    CHECK(std::string(e.what()).find("speed") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("lambda: one\nt_end: 1\nstrata: [{thickness: 1, d_plus: 1, dr: 1, dt: 0.1}]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("lambda: 1\nt_end: 0\nstrata: [{thickness: 1, d_plus: 1, dr: 1, dt: 0.1}]\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("lambda: 1\nt_end: 1\nscheme: implicit\nstrata: [{thickness: 1, d_plus: 1, dr: 1, dt: 0.1}]\n"),
                  ConfigError);
}

TEST_CASE("fictitious strata inherit from their parent") {
  const char* text =
      "lambda: 0.1\nt_end: 1\nstrata:\n"
      "  - {thickness: 9, d_plus: 0.2, alpha: 0.5, beta: 1.0e-4, c_init: 3, dr: 1, dt: 0.5}\n"
      "  - {thickness: 1, dr: 0.1, dt: 0.005, fictitious: true}\n"
      "  - {thickness: 1, d_plus: 0.2, c_init: 1, dr: 0.1, dt: 0.005}\n";
  const auto s = parse_config(text).simulation.capsule.strata;
  CHECK(s[1].d_plus == 0.2);
  CHECK(s[1].alpha == 0.5);
  CHECK(s[1].beta == 1e-4);
  CHECK(s[1].c_init == 3);
  CHECK(s[1].parent == 0);
}

TEST_CASE("invariant violations are listed together") {
  const char* text =
      "lambda: 1\nt_end: 1\nstrata:\n"
      "  - {thickness: -1, d_plus: 0.2, dr: 1, dt: 0.5}\n"
      "  - {thickness: 1, d_plus: -0.2, dr: 0.1, dt: 0.005}\n";
  try {
    parse_config(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() >= 2);
  }
}

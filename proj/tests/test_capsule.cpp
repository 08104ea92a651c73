#include <doctest.h>

#include "capsim/capsule.hpp"
#include "capsim/errors.hpp"
#include "support.hpp"

using namespace capsim;
using capsim::testing::stratum;

namespace {

bool mentions(const std::vector<std::string>& issues, const std::string& needle) {
  for (const auto& i : issues) {
    if (i.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::vector<StratumSpec> case_study_strata() {
  std::vector<StratumSpec> s{stratum(280, 6e-7, 35, 1, 0, 0.5), stratum(5, 6e-7, 0.5, 0.05, 0, 0.5),
                             stratum(0.65, 6e-7, 0.005, 0.01, 0, 0.5)};
  s[1].fictitious = s[2].fictitious = true;
  s[1].parent = s[2].parent = 0;
  for (int i = 0; i < 2; ++i) s.push_back(stratum(0.018, 5e-6, 0.001, 0.01, 5.085e-3, 0.2));
  for (int i = 0; i < 6; ++i) s.push_back(stratum(0.018, 1e-6, 0.001, 0.01, 2.543e-3, 1.0));
  return s;
}

}  // namespace

TEST_CASE("derive_radii accumulates thicknesses") {
  CHECK(derive_radii(std::vector{stratum(100, 1, 1, 1)}) == std::vector<double>{100});

  const auto r = derive_radii(std::vector{stratum(280, 1, 35, 1), stratum(5, 1, 0.5, 1), stratum(0.65, 1, 0.005, 1)});
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 280);
  CHECK(r[1] == 285);
  CHECK(r[2] == doctest::Approx(285.65).epsilon(1e-14));

  const auto all = derive_radii(case_study_strata());
  CHECK(all.back() == doctest::Approx(285.794).epsilon(1e-14));
  CHECK(all[2] == doctest::Approx(285.65).epsilon(1e-14));
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i] > all[i - 1]);
}

TEST_CASE("derive_radii names a non-positive stratum") {
  try {
    derive_radii(std::vector{stratum(1, 1, 1, 1), stratum(0, 1, 1, 1)});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(mentions(e.issues(), "stratum 1"));
  }
}

TEST_CASE("validate_capsule accepts the case-study capsule") {
  CapsuleSpec spec{case_study_strata(), 0.05};
  const auto v = validate_capsule(spec, CapsuleChecks{100, false});
  CHECK(v.size() == 11);
  CHECK(v.core_radius() == doctest::Approx(285.65));
  CHECK(v.physical_index[1] == 0);
  CHECK(v.physical_index[2] == 0);
  CHECK(v.physical_index[3] == 1);
  CHECK(v.physical_radii.size() == 9);
}

TEST_CASE("validate_capsule reports every violation") {
  SUBCASE("dr must divide the thickness") {
    const auto issues = capsule_issues(CapsuleSpec{{stratum(1, 1, 0.3, 1)}, 0});
    CHECK(mentions(issues, "dr does not divide thickness"));
  }
  SUBCASE("dt multiples of the smallest step") {
    CHECK(capsule_issues(CapsuleSpec{{stratum(1, 1, 1, 1), stratum(1, 1, 1, 0.05), stratum(1, 1, 1, 0.01)}, 0})
              .empty());
    CHECK(mentions(capsule_issues(CapsuleSpec{{stratum(1, 1, 1, 0.015), stratum(1, 1, 1, 0.01)}, 0}),
                   "integer multiple of the smallest dt"));
  }
  SUBCASE("several problems at once") {
    auto s = stratum(1, -1, 0.3, 1);
    s.alpha = -2;
    const auto issues = capsule_issues(CapsuleSpec{{s, stratum(1, 1, 0.01, 1)}, -1});
    CHECK(mentions(issues, "d_plus"));
    CHECK(mentions(issues, "alpha"));
    CHECK(mentions(issues, "lambda"));
    CHECK(mentions(issues, "dr does not divide"));
    CHECK(mentions(issues, "dr ratio"));
    CHECK_THROWS_AS(validate_capsule(CapsuleSpec{{s}, 0}), ValidationError);
  }
  SUBCASE("missing capsule") { CHECK(mentions(capsule_issues(CapsuleSpec{}), "missing capsule")); }
  SUBCASE("fictitious strata must copy their parent") {
    auto f = stratum(1, 2, 1, 1);
    f.fictitious = true;
    CHECK(mentions(capsule_issues(CapsuleSpec{{stratum(1, 1, 1, 1), f}, 0}), "must share"));
  }
}

TEST_CASE("validate_capsule is idempotent and accepts a homogeneous sphere") {
  const CapsuleSpec spec{{stratum(100, 0.5, 1, 0.1)}, 1};
  const auto once = validate_capsule(spec);
  const auto twice = validate_capsule(once.spec);
  CHECK(once == twice);

  const auto cs = validate_capsule(CapsuleSpec{case_study_strata(), 0.05}, CapsuleChecks{100, false});
  CHECK(validate_capsule(cs.spec, CapsuleChecks{100, false}) == cs);
}

TEST_CASE("initial mass of the case-study shell") {
  const auto cs = validate_capsule(CapsuleSpec{case_study_strata(), 0.05}, CapsuleChecks{100, false});
  // Independent evaluation of Σ c0 (4/3)π(R_ℓ³ - R_{ℓ-1}³) in long double.
  long double expected = 0, r = 285.65L;
  const long double pi = std::numbers::pi_v<long double>;
  for (int i = 0; i < 8; ++i) {
    const long double c = i < 2 ? 5.085e-3L : 2.543e-3L;
    const long double r2 = r + 0.018L;
    expected += c * 4.0L / 3.0L * pi * (r2 * r2 * r2 - r * r * r);
    r = r2;
  }
  CHECK(initial_mass(cs) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-9));
  CHECK(std::abs(initial_mass(cs) - 472.10) < 5.0);
}

TEST_CASE("shell_volume is accurate for thin shells") {
  const long double pi = std::numbers::pi_v<long double>;
  const long double a = 285.793L, b = 285.794L;
  const long double exact = 4.0L / 3.0L * pi * (b - a) * (a * a + a * b + b * b);
  CHECK(shell_volume(285.793, 285.794) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-9));
  CHECK(shell_volume(0, 100) == doctest::Approx(capsim::testing::ball(100)).epsilon(1e-15));
}

TEST_CASE("integer_ratio tolerates round-off only") {
  CHECK(integer_ratio(1.0, 0.1) == 10);
  CHECK(integer_ratio(0.65, 0.005) == 130);
  CHECK(integer_ratio(1.0, 0.3) == 0);
  CHECK(integer_ratio(0.5, 1.0) == 0);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "capsim/errors.hpp"
#include "capsim/oracle.hpp"
#include "capsim/simulation.hpp"
#include "support.hpp"

using namespace capsim;

namespace {

/// Perfect-sink release of a sphere, summed directly: 1 - (6/π²) Σ exp(-D n²π² t / R²) / n².
double sink_fraction(double d, double radius, double t) {
  const double pi = std::numbers::pi;
  double s = 0;
  for (int n = 1; n <= 20000; ++n) s += std::exp(-d * n * n * pi * pi * t / (radius * radius)) / (double(n) * n);
  return 1.0 - 6.0 / (pi * pi) * s;
}

}  // namespace

TEST_CASE("oracle at t = 0 and for a barrier") {
  CHECK(SphereOracle(OracleSpec{}).fraction(0.0) == 0.0);
  OracleSpec barrier;
  barrier.lambda = 0.0;
  const SphereOracle o(barrier);
  CHECK(o.biot() == 0.0);
  CHECK(o.fraction(1e4) == 0.0);
  OracleSpec negative;
  negative.lambda = -1;
  CHECK_THROWS_AS(SphereOracle{negative}, ValidationError);
}

TEST_CASE("perfect sink matches the direct series") {
  OracleSpec s;
  s.lambda = INFINITY;
  const SphereOracle o(s);
  for (double t : {10.0, 100.0, 1000.0, 14400.0}) CHECK(o.fraction(t) == doctest::Approx(sink_fraction(0.5, 100, t)).epsilon(1e-9));
  CHECK(o.fraction(14400) > 0.999);
}

TEST_CASE("roots are bracketed and accurate") {
  const SphereOracle o(OracleSpec{});
  const auto mu = o.eigenvalues();
  REQUIRE(mu.size() == 200);
  for (std::size_t n = 0; n < mu.size(); ++n) {
    CHECK(mu[n] > n * std::numbers::pi);
    CHECK(mu[n] < (n + 1) * std::numbers::pi);
    // Independent residual in the product form, scaled by the bracket.
    const double bi = o.biot();
    CHECK(std::abs(mu[n] * std::cos(mu[n]) - (1 - bi) * std::sin(mu[n])) <= 1e-9 * (n + 1));
    CHECK(o.residual(n) <= 1e-6);
  }
  double sum = 0;
  for (double c : o.coefficients()) sum += c;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fraction is monotone, bounded and converged in the number of terms") {
  OracleSpec lo;
  OracleSpec hi;
  hi.n_terms = 400;
  const SphereOracle a(lo), b(hi);
  double last = 0;
  for (double t = 60; t <= 14400; t += 60) {
    const double f = a.fraction(t);
    CHECK(f >= last);
    CHECK(f <= 1.0);
    CHECK(std::abs(f - b.fraction(t)) <= a.truncation_bound(t) + 1e-15);
    last = f;
  }
  CHECK(a.released_mass(14400) == doctest::Approx(a.fraction(14400) * 4.0 / 3.0 * std::numbers::pi * 1e6));
}

TEST_CASE("finite volumes converge to the series") {
  const SphereOracle o(OracleSpec{});
  auto worst_error = [&](double dr, double dt) {
    const auto r = simulate(capsim::testing::config_of({capsim::testing::stratum(100, 0.5, dr, dt)}, 1.0, 1200));
    double worst = 0;
    for (const auto& s : r.record.samples) worst = std::max(worst, std::abs(s.fraction - o.fraction(s.t)));
    return worst;
  };
  const double coarse = worst_error(0.5, 0.04);
  const double fine = worst_error(0.25, 0.01);
  CHECK(coarse <= 1e-2);
  CHECK(fine <= 3e-3);
  CHECK(fine < 0.6 * coarse);
}

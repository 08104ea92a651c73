#include <doctest.h>

#include <random>

#include "capsim/errors.hpp"
#include "capsim/simulation.hpp"
#include "support.hpp"

using namespace capsim;
using capsim::testing::config_of;
using capsim::testing::rel_diff;
using capsim::testing::stratum;

TEST_CASE("schedule multipliers") {
  SUBCASE("three strata") {
    const auto cfg = config_of({stratum(50, 1e-3, 1, 0.1), stratum(10, 1e-3, 0.5, 5e-3), stratum(1, 1e-3, 0.1, 1e-3)}, 1, 1);
    const auto s = build_schedule(prepare_capsule(cfg));
    CHECK(s.dt_min == 1e-3);
    CHECK(s.multiplier == std::vector<long>{100, 5, 1});
    CHECK(s.due(0, 0));
    CHECK_FALSE(s.due(0, 99));
    CHECK(s.due(0, 200));
    CHECK(s.due(1, 15));
  }
  SUBCASE("ten strata with variable dt") {
    const std::vector<double> f{1, 0.5, 0.1, 0.05, 0.1, 0.5, 1, 0.05, 0.05, 1};
    std::vector<StratumSpec> strata;
    for (double x : f) strata.push_back(stratum(10, 0.5, 0.1, 1e-3 * x));
    const auto s = build_schedule(prepare_capsule(config_of(strata, 1, 1)));
    CHECK(s.dt_min == doctest::Approx(5e-5));
    CHECK(s.multiplier == std::vector<long>{20, 10, 2, 1, 2, 10, 20, 1, 1, 20});
  }
  SUBCASE("single stratum") {
    const auto s = build_schedule(prepare_capsule(config_of({stratum(100, 0.5, 1, 0.1)}, 1, 1)));
    CHECK(s.multiplier == std::vector<long>{1});
  }
}

TEST_CASE("interface owner") {
  CHECK(interface_owner(stratum(1, 1, 1, 0.1), stratum(1, 1, 0.1, 0.1)) == Owner::outer);
  CHECK(interface_owner(stratum(1, 1, 0.1, 0.1), stratum(1, 1, 1, 0.1)) == Owner::inner);
  CHECK(interface_owner(stratum(1, 1, 1, 0.01), stratum(1, 1, 1, 0.1)) == Owner::inner);
  CHECK(interface_owner(stratum(1, 1, 1, 0.1), stratum(1, 1, 1, 0.01)) == Owner::outer);
  CHECK(interface_owner(stratum(1, 1, 1, 0.1), stratum(1, 1, 1, 0.1)) == Owner::outer);
}

TEST_CASE("zero horizon returns the initial state") {
  const auto r = simulate(config_of({stratum(100, 0.5, 1, 0.1)}, 1, 0));
  CHECK(r.ticks == 0);
  REQUIRE(r.record.samples.size() == 1);
  CHECK(r.record.samples[0].m_total == 0.0);
  CHECK(r.final_audit == 0.0);
}

TEST_CASE("splitting a homogeneous sphere is exact") {
  for (const Scheme scheme : {Scheme::conservative, Scheme::paper_form}) {
    const auto whole = simulate(config_of({stratum(100, 0.5, 1, 0.1)}, 1, 1800, scheme));
    for (double cut : {1.0, 37.0, 99.0}) {
      const auto split = simulate(config_of({stratum(cut, 0.5, 1, 0.1), stratum(100 - cut, 0.5, 1, 0.1)}, 1, 1800, scheme));
      REQUIRE(split.record.samples.size() == whole.record.samples.size());
      double worst = 0;
      for (std::size_t i = 0; i < whole.record.samples.size(); ++i) {
        worst = std::max(worst, rel_diff(split.record.samples[i].m_total, whole.record.samples[i].m_total));
      }
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("per-tick balance with multirate, erosion and decay") {
  auto cfg = config_of({stratum(20, 0.2, 1, 0.5, 1.0, 0.5, 1e-4), stratum(4, 0.05, 0.1, 0.05, 3.0, 0.3),
                        stratum(1, 0.02, 0.02, 5e-3, 2.0, 1.0, 1e-3)},
                       0.5, 600);
  ErosionSchedule e;
  e.samples = {{0, 25}, {600, 21.5}};
  cfg.erosion = e;
  Simulation sim(cfg);
  double worst = 0;
  while (sim.tick() < sim.end_tick() && sim.step()) worst = std::max(worst, sim.audit());
  CHECK(worst <= 1e-10);
  CHECK(sim.alive(2) == 0);
  CHECK(sim.release().m_eroded() > 0);
  CHECK(sim.release().m_flux() > 0);
  CHECK(sim.release().decayed() > 0);
}

TEST_CASE("buffers are empty after a tick where every non-owner is due") {
  const auto cfg = config_of({stratum(10, 0.1, 1, 0.4), stratum(2, 0.1, 0.25, 0.05)}, 0.2, 10);
  Simulation sim(cfg);
  for (int i = 0; i < 40; ++i) {
    sim.step();
    if ((sim.tick() - 1) % 8 == 0) CHECK(sim.pending_buffer_mass() == 0.0);
  }
}

TEST_CASE("runs are deterministic") {
  auto cfg = config_of({stratum(20, 0.2, 1, 0.5, 1.0, 0.5), stratum(2, 0.05, 0.1, 0.05, 3.0, 0.3)}, 0.5, 300);
  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  REQUIRE(a.record.samples.size() == b.record.samples.size());
  for (std::size_t i = 0; i < a.record.samples.size(); ++i) CHECK(a.record.samples[i].m_total == b.record.samples[i].m_total);
}

TEST_CASE("negative concentrations raise a stability fault") {
  auto cfg = config_of({stratum(10, 0.1, 1, 0.1, 1.0, 1.0, 20.0)}, 0.5, 10);
  try {
    simulate(cfg);
    FAIL("expected StabilityFault");
  } catch (const StabilityFault& f) {
    CHECK(f.tick() == 0);
    CHECK(f.stratum() == 0);
  }
}

TEST_CASE("property: random two-stratum capsules keep the balance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double d0 = 0.05 + u(rng), d1 = 0.01 + 0.2 * u(rng);
    const double dr1 = trial % 2 ? 0.5 : 0.25;
    auto s0 = stratum(8, d0, 1, 0.0, 0.5 + u(rng), 0.2 + 0.8 * u(rng));
    auto s1 = stratum(2, d1, dr1, 0.0, 0.5 + u(rng), 0.2 + 0.8 * u(rng));
    s1.dt = std::floor(dr1 * dr1 / (6.0 * std::max(d0, d1)) * 100.0) / 100.0;
    if (s1.dt <= 0.0) s1.dt = 0.005;
    s0.dt = s1.dt * (1 + trial % 4);
    auto cfg = config_of({s0, s1}, u(rng), 50);
    cfg.clamp_cfl = true;
    Simulation sim(cfg);
    double worst = 0;
    while (sim.tick() < sim.end_tick() && sim.step()) worst = std::max(worst, sim.audit());
    CHECK(worst <= 1e-10);
  }
}

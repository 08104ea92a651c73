#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "capsim/simulation.hpp"

namespace capsim::testing {

inline std::filesystem::path source_dir() { return CAPSIM_SOURCE_DIR; }

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("capsim_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Sphere volume computed in long double, independent of shell_volume.
inline double ball(long double r) { return static_cast<double>(4.0L / 3.0L * std::numbers::pi_v<long double> * r * r * r); }

inline StratumSpec stratum(double thickness, double d, double dr, double dt, double c = 1.0, double alpha = 1.0,
                           double beta = 0.0) {
  StratumSpec s;
  s.thickness = thickness;
  s.d_plus = d;
  s.alpha = alpha;
  s.beta = beta;
  s.c_init = c;
  s.dr = dr;
  s.dt = dt;
  return s;
}

inline SimulationConfig config_of(std::vector<StratumSpec> strata, double lambda, double t_end,
                                  Scheme scheme = Scheme::conservative, double output_every = 60.0) {
  SimulationConfig c;
  c.capsule.strata = std::move(strata);
  c.capsule.lambda = lambda;
  c.t_end = t_end;
  c.output_every = output_every;
  c.scheme = scheme;
  return c;
}

/// Relative difference, with an absolute floor for values near zero.
inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace capsim::testing

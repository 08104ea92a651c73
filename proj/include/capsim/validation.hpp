#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "capsim/release.hpp"
#include "capsim/simulation.hpp"

namespace capsim {

/// Homogeneous test sphere: R = 100 µm, D = 0.5 µm²/s, λ = 1, c0 = 1, β = 0, α = 1, T = 14400 s.
struct TestSphere {
  static constexpr double radius = 100.0;
  static constexpr double diffusivity = 0.5;
  static constexpr double lambda = 1.0;
  static constexpr double c0 = 1.0;
  static constexpr double t_end = 14400.0;
};

StratumSpec test_stratum(double thickness, double dr, double dt);

/// One-stratum test sphere on a uniform grid.
SimulationConfig test_sphere_config(double dr, double dt, Scheme scheme);

struct ValidationCase {
  std::string name;
  SimulationConfig config;
  double published_pct{0.0};  ///< mean relative error reported for the grid
};

/// fine, coarse, 10-coarse, 10-fine-var-dt, coarse+fine, fine+coarse.
std::vector<ValidationCase> validation_cases(Scheme scheme);

struct ErrorStats {
  double mean_rel_pct{0.0};  ///< over samples whose reference fraction is >= 1 %
  double max_rel_pct{0.0};
  double max_abs{0.0};       ///< over all samples, in released fraction
  std::size_t counted{0};
};

/// Compares sampled fractions against `reference(t)`.
ErrorStats compare_release(const ReleaseRecord& record, const std::function<double(double)>& reference);

enum class Reference { oracle, paper_grid };

struct ValidationRow {
  std::string config;
  Scheme scheme{Scheme::paper_form};
  ErrorStats error;
  double runtime_s{0.0};
  double published_pct{0.0};
  double final_fraction{0.0};
  std::uint64_t inward_branches{0};
};

struct ValidationOptions {
  Reference reference{Reference::oracle};
  std::vector<Scheme> schemes{Scheme::paper_form, Scheme::conservative};
  std::vector<std::string> only;  ///< case names to run; empty runs all
  std::function<void(const ValidationRow&)> progress;
};

std::vector<ValidationRow> run_validation_suite(const ValidationOptions& options = {});

std::string scheme_name(Scheme scheme);

/// `config,mean_rel_err_pct,max_rel_err_pct,runtime_s`
std::string validation_csv(const std::vector<ValidationRow>& rows);
std::string validation_table(const std::vector<ValidationRow>& rows);

}  // namespace capsim

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace capsim {

/**
 * Outer radius R(t) of an eroding capsule, either as a piecewise-linear (t, R) table or as
 * constant-speed phases. R(t) = max(R_core, R_L - ∫₀ᵗ v_e(s) ds); the table form stores R
 * directly and is held constant after its last sample.
 */
struct ErosionSchedule {
  struct Sample {
    double t{0.0};
    double radius{0.0};
    bool operator==(const Sample&) const = default;
  };
  struct Phase {
    double t_start{0.0};
    double t_end{0.0};
    double speed{0.0};  ///< µm/s, >= 0
    bool operator==(const Phase&) const = default;
  };

  std::vector<Sample> samples;  ///< used when non-empty
  std::vector<Phase> phases;

  bool empty() const { return samples.empty() && phases.empty(); }
  bool operator==(const ErosionSchedule&) const = default;
};

/// Load-time checks: strictly increasing t, non-increasing R, non-negative speeds, R(0) = r_outer.
/// Returns every violation found.
std::vector<std::string> erosion_issues(const ErosionSchedule& schedule, double r_outer);

/// R(t) clamped below at `r_core`.
double radius_at(const ErosionSchedule& schedule, double t, double r_outer, double r_core);

/// Parses either `t_s,R_um` or `t_start_s,t_end_s,v_um_per_s` CSV text.
ErosionSchedule parse_erosion_csv(const std::string& text);
ErosionSchedule load_erosion_csv(const std::filesystem::path& path);

/// CSV text in the samples form (phases are written in the phases form).
std::string erosion_to_csv(const ErosionSchedule& schedule);

}  // namespace capsim

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capsim/capsule.hpp"
#include "capsim/erosion.hpp"
#include "capsim/grid.hpp"
#include "capsim/kernel.hpp"
#include "capsim/release.hpp"

namespace capsim {

struct SimulationConfig {
  CapsuleSpec capsule;
  double t_end{0.0};                     ///< s, rounded to a multiple of the smallest dt
  std::optional<ErosionSchedule> erosion;
  double output_every{60.0};             ///< s, rounded to a multiple of the smallest dt
  double profile_every{0.0};             ///< s; 0 disables profile sampling
  Scheme scheme{Scheme::conservative};
  double fictitious_max_ratio{10.0};
  bool auto_fictitious{true};
  bool clamp_cfl{false};

  bool operator==(const SimulationConfig&) const = default;
};

/// Validated capsule after fictitious insertion and the CFL check, ready to be gridded.
/// Throws ValidationError listing every problem.
ValidatedCapsule prepare_capsule(const SimulationConfig& config);

struct Schedule {
  double dt_min{0.0};
  std::vector<long> multiplier;  ///< k_ℓ = dt_ℓ / dt_min

  bool due(std::size_t stratum, std::uint64_t tick) const {
    return tick % static_cast<std::uint64_t>(multiplier[stratum]) == 0;
  }
};

Schedule build_schedule(const ValidatedCapsule& capsule);

/// Side of an interface that computes the exchanged flux: the finer dr, then the smaller dt,
/// then the outer stratum.
enum class Owner : unsigned char { inner, outer };
Owner interface_owner(const StratumSpec& inner, const StratumSpec& outer);

enum class RunStatus { completed, fully_eroded };

struct ProfilePoint {
  double t{0.0};
  double r{0.0};
  double c{0.0};
};

struct SimulationResult {
  ValidatedCapsule capsule;
  Schedule schedule;
  ReleaseRecord record;
  std::vector<ProfilePoint> profiles;
  RunStatus status{RunStatus::completed};
  std::uint64_t ticks{0};
  double final_audit{0.0};
};

/**
 * Multirate time loop. Each global tick of length dt_min: erosion check, updates of the strata
 * due at this tick from the outermost inward, application of interface buffers to the strata
 * that do not own their interface, release accumulation.
 */
class Simulation {
public:
  explicit Simulation(const SimulationConfig& config, KernelOptions options = {});

  /// Advances one tick. Returns false once the capsule is fully eroded.
  bool step();

  std::uint64_t tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) * schedule_.dt_min; }
  std::uint64_t end_tick() const { return end_tick_; }
  RunStatus status() const { return status_; }

  const ValidatedCapsule& capsule() const { return capsule_; }
  const Schedule& schedule() const { return schedule_; }
  const std::vector<StratumGrid>& grids() const { return grids_; }
  const ReleaseAccumulator& release() const { return release_; }

  /// Alive cells of one stratum.
  std::span<const double> cells(std::size_t stratum) const;
  std::size_t alive(std::size_t stratum) const { return alive_[stratum]; }
  std::size_t outermost() const { return top_; }
  double outer_radius() const;

  /// Σ V_j C_j over alive cells minus mass parked in interface buffers.
  double in_capsule_mass() const;
  double pending_buffer_mass() const;
  /// Relative mass-balance residual using exact cell volumes.
  double audit() const;

  void append_profile(std::vector<ProfilePoint>& out) const;

private:
  struct Link {
    Owner owner{Owner::outer};
    double coef_plus{0.0};   ///< harmonic-mean D̂⁺ · A / dr of the owner
    double coef_minus{0.0};
    double buffer{0.0};      ///< mass gained by the owner, not yet removed from the other side
  };

  void erode(double t);
  void flush(std::size_t link);
  void retire_top_cell();
  double boundary_value(std::size_t stratum, bool outer_side) const;
  void check_value(double v, std::size_t stratum) const;

  SimulationConfig config_;
  KernelOptions options_;
  ValidatedCapsule capsule_;
  Schedule schedule_;
  std::vector<StratumGrid> grids_;
  std::vector<StratumStencil> stencils_;
  std::vector<std::vector<double>> cells_;
  std::vector<std::size_t> alive_;
  std::vector<Link> links_;
  std::vector<double> snapshot_;  ///< per link: non-owner boundary value at tick start
  std::vector<double> flux_;
  std::vector<double> robin_;     ///< per stratum robin factor (1 - dr λ)
  ReleaseAccumulator release_;
  std::size_t top_{0};
  std::uint64_t tick_{0};
  std::uint64_t end_tick_{0};
  double eps_neg_{0.0};
  RunStatus status_{RunStatus::completed};
};

/// Runs to t_end, sampling release every output_every and profiles every profile_every.
SimulationResult simulate(const SimulationConfig& config, const KernelOptions& options = {});

/// `t_s,r_um,c_ug_per_um3`
std::string profiles_to_csv(const std::vector<ProfilePoint>& profiles);

}  // namespace capsim

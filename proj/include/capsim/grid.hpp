#pragma once

#include <cstddef>
#include <vector>

#include "capsim/capsule.hpp"

namespace capsim {

/// Uniform cell partition of one stratum. Faces are indexed 0..n, cells 0..n-1.
struct StratumGrid {
  std::size_t stratum{0};
  std::size_t n{0};
  double dr{0.0};
  double dt{0.0};
  double r_inner{0.0};
  double r_outer{0.0};
  std::vector<double> centers;  ///< r_j
  std::vector<double> faces;    ///< r_{j-1/2}, size n+1
  std::vector<double> areas;    ///< 4π r², size n+1
  std::vector<double> volumes;  ///< exact shell volumes, size n

  double total_volume() const;
};

StratumGrid build_grid(const StratumSpec& stratum, double r_inner, double r_outer, std::size_t index = 0);

/// Grids for every stratum of a validated capsule.
std::vector<StratumGrid> build_grids(const ValidatedCapsule& capsule);

/// Explicit-scheme bound dr²/(2·d_max); +inf when d_max is zero.
double cfl_max_dt(const StratumGrid& grid, double d_max);

/// Harmonic mean 2ab/(a+b); exact `a` when a == b and 0 when either is 0.
double harmonic_mean(double a, double b);

/// Largest interface diffusivity a stratum can see: its own D± and the harmonic means at both interfaces.
double stratum_d_max(const ValidatedCapsule& capsule, std::size_t index);

/**
 * Grades every interface whose dr ratio exceeds `max_ratio` by inserting fictitious strata carved
 * off the coarser neighbour. Inserted strata copy the neighbour's physics, use a geometric dr
 * sequence, span at least four of their own cells and pick the largest dt that divides the
 * neighbour's dt and stays within 0.9 of their CFL bound.
 */
ValidatedCapsule insert_fictitious_strata(const ValidatedCapsule& capsule, double max_ratio);

/**
 * Checks every stratum's dt against its CFL bound. Violations throw ValidationError unless
 * `clamp` is set, in which case offending steps are lowered to at most 0.9 of the bound while
 * keeping all steps integer multiples of a common base.
 */
ValidatedCapsule enforce_cfl(const ValidatedCapsule& capsule, bool clamp);

}  // namespace capsim

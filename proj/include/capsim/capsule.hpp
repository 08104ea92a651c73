#pragma once

/**
 * @file capsule.hpp
 * @brief Physical description of a multi-stratum spherical capsule.
 *
 * Units throughout: length in µm, time in s, mass in µg, concentration in µg/µm³.
 * Strata are ordered from the core (index 0) outward.
 */

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace capsim {

/// One concentric shell (or the core) together with its numerical resolution.
struct StratumSpec {
  double thickness{0.0};  ///< ΔR [µm]
  double d_plus{0.0};     ///< outward diffusivity D⁺ [µm²/s]
  double alpha{1.0};      ///< anisotropic factor D⁻/D⁺
  double beta{0.0};       ///< decay / binding rate [1/s]
  double c_init{0.0};     ///< initial concentration [µg/µm³]
  double dr{0.0};         ///< cell size [µm]
  double dt{0.0};         ///< time step [s]
  /// Numerical partition of a physical stratum. Inherits physics from its parent.
  bool fictitious{false};
  /// Index (in the same list) of the physical stratum a fictitious stratum belongs to.
  /// -1 selects the nearest preceding non-fictitious stratum.
  int parent{-1};
  std::string name;

  double d_minus() const { return alpha * d_plus; }

  bool operator==(const StratumSpec&) const = default;
};

struct CapsuleSpec {
  std::vector<StratumSpec> strata;
  /// Robin coefficient of the outer surface. +inf denotes a perfect sink.
  double lambda{0.0};

  bool operator==(const CapsuleSpec&) const = default;
};

/// A capsule whose invariants have been checked, with derived geometry.
struct ValidatedCapsule {
  CapsuleSpec spec;                          ///< normalized: parents resolved
  std::vector<double> radii;                 ///< outer radius R_ℓ of each stratum
  std::vector<std::size_t> physical_index;   ///< physical stratum id of each numerical stratum
  std::vector<double> physical_radii;        ///< outer radius of each physical stratum

  std::size_t size() const { return spec.strata.size(); }
  const StratumSpec& operator[](std::size_t i) const { return spec.strata[i]; }
  double inner_radius(std::size_t i) const { return i == 0 ? 0.0 : radii[i - 1]; }
  double outer_radius() const { return radii.back(); }
  /// Outer radius of the physical core, the lower clamp of erosion.
  double core_radius() const { return physical_radii.front(); }

  bool operator==(const ValidatedCapsule&) const = default;
};

struct CapsuleChecks {
  /// Largest allowed dr ratio across an internal interface.
  double max_dr_ratio{10.0};
  /// When set, ratio violations are left for fictitious-stratum insertion instead of reported.
  bool allow_ratio_violations{false};
};

/// Prefix sums of thicknesses. Throws ValidationError naming a non-positive stratum.
std::vector<double> derive_radii(std::span<const StratumSpec> strata);

/// Every invariant violation of `spec`; empty when valid.
std::vector<std::string> capsule_issues(const CapsuleSpec& spec, const CapsuleChecks& checks = {});

/// Checks all invariants and derives radii. Throws ValidationError listing every violation.
ValidatedCapsule validate_capsule(const CapsuleSpec& spec, const CapsuleChecks& checks = {});

/// Total mass Σ c_init · shell volume.
double initial_mass(const ValidatedCapsule& capsule);

/// Volume of the spherical shell between `r_in` and `r_out`, stable for thin shells.
double shell_volume(double r_in, double r_out);

/// Integer ratio `a / b` if it lies within a relative 1e-9 of an integer ≥ 1, else 0.
long integer_ratio(double a, double b);

}  // namespace capsim

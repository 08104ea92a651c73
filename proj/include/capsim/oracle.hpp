#pragma once

#include <span>
#include <vector>

namespace capsim {

/// Homogeneous sphere with surface condition ∂c/∂r = -λc at r = R.
struct OracleSpec {
  double radius{100.0};
  double diffusivity{0.5};
  double lambda{1.0};  ///< +inf for a perfect sink
  double c0{1.0};
  int n_terms{200};
  double tolerance{1e-15};  ///< bisection width, relative to the bracket
};

/**
 * Eigenfunction series for the released fraction,
 *   F(t) = 1 - Σ c_n exp(-D μ_n² t / R²),  c_n = 6 Bi² / (μ_n² (μ_n² + Bi (Bi - 1))),
 * where μ_n is the root of μ cot μ = 1 - Bi in (nπ, (n+1)π) and Bi = λR.
 */
class SphereOracle {
public:
  explicit SphereOracle(const OracleSpec& spec);

  double biot() const { return biot_; }
  std::span<const double> eigenvalues() const { return mu_; }
  std::span<const double> coefficients() const { return coef_; }

  /// Released fraction in [0, 1]; exactly 0 at t = 0.
  double fraction(double t) const;
  /// Released mass c0 · (4/3)πR³ · fraction(t).
  double released_mass(double t) const;
  /// Upper bound on the magnitude of the omitted tail at time t.
  double truncation_bound(double t) const;
  /// |μ cot μ - (1 - Bi)| for the n-th retained root.
  double residual(std::size_t n) const;

private:
  OracleSpec spec_;
  double biot_;
  std::vector<double> mu_;
  std::vector<double> coef_;
};

}  // namespace capsim

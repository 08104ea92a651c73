#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "capsim/capsule.hpp"
#include "capsim/grid.hpp"

namespace capsim {

/**
 * Discrete form of the stratum update.
 *
 * `paper_form` divides by dr·r_j² and weights faces by r², i.e. uses 4π r_j² dr as the cell
 * mass measure. `conservative` uses exact shell volumes, so Σ V_j C_j telescopes to round-off.
 * Both share the face factor 4π r_{j±1/2}²/dr.
 */
enum class Scheme { conservative, paper_form };

/// Direction-dependent interface diffusivity.
///
/// Within a stratum: D⁺ of `lo` when c_lo >= c_hi, otherwise D⁻. Across strata: the harmonic mean
/// of the direction-matched coefficients of both strata.
double interface_diffusivity(double c_lo, double c_hi, const StratumSpec& lo, const StratumSpec& hi,
                             bool cross_stratum);

/// D̂ · r_half² · (c_j1 - c_j) / dr. Positive means cell j gains mass across r_half.
double numerical_flux(double d_hat, double r_half, double c_j, double c_j1, double dr);

/// Ghost concentration past the outer surface, c_N (1 - dr λ); 0 for a perfect sink (λ = +inf).
/// Throws ValidationError when dr·λ > 1.
double robin_ghost(double c_n, double dr, double lambda);

/// Multiplier (1 - dr λ) applied to the last cell to form the Robin ghost.
double robin_factor(double dr, double lambda);

/// Boundary treatment of one stratum face.
struct FaceCoupling {
  enum class Kind : unsigned char {
    closed,  ///< zero flux: center symmetry, impermeable wall, or buffered interface side
    ghost,   ///< neighbour value supplied in `ghost`
    robin,   ///< ghost = robin_factor · last cell
  };
  Kind kind{Kind::closed};
  double coef_plus{0.0};   ///< D̂⁺ · A / dr
  double coef_minus{0.0};  ///< D̂⁻ · A / dr
  double ghost{0.0};
  double robin_factor{1.0};
};

/// Per-stratum constants of the explicit update, precomputed for one scheme flavour.
struct StratumStencil {
  std::size_t n{0};
  double dt{0.0};
  double decay_step{0.0};                 ///< dt · β
  double floor{0.0};                      ///< updates below this value are reported
  std::vector<double> coef_plus;          ///< D⁺ A_f / dr, faces 0..n
  std::vector<double> coef_minus;         ///< D⁻ A_f / dr, faces 0..n
  std::vector<double> weights;            ///< cell mass measure
  std::vector<double> step_over_weight;   ///< dt / weight
};

StratumStencil make_stencil(const StratumGrid& grid, const StratumSpec& spec, Scheme scheme);

/// Mass exchanged during one update [µg]. Gains are positive into the stratum.
struct StepTransfer {
  double gained_inner{0.0};
  double gained_outer{0.0};
  double decayed{0.0};
  bool below_floor{false};  ///< some updated value fell below the stencil floor
  double min_value{0.0};    ///< smallest updated concentration, set only when below_floor
};

struct KernelOptions {
  /// When false every face uses D⁺, as if the direction test did not exist.
  bool directional{true};
  /// When non-null, incremented once per internal or ghost face that selects the D⁻ branch.
  std::uint64_t* inward_branch_count{nullptr};
};

/**
 * One explicit step of C^{n+1} = C^n + (dt/w_j)(Φ_{j+1/2} - Φ_{j-1/2}) - dt β C^n on the first
 * `cells.size()` cells. `flux` is scratch space of at least cells.size()+1 entries.
 */
StepTransfer step_stratum(std::span<double> cells, const StratumStencil& stencil, const FaceCoupling& inner,
                          const FaceCoupling& outer, std::span<double> flux, const KernelOptions& options = {});

}  // namespace capsim

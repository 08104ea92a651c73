#include "capsim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "capsim/errors.hpp"

namespace capsim {

double interface_diffusivity(double c_lo, double c_hi, const StratumSpec& lo, const StratumSpec& hi,
                             bool cross_stratum) {
  const bool outward = c_lo >= c_hi;
  if (!cross_stratum) return outward ? lo.d_plus : lo.d_minus();
  return outward ? harmonic_mean(lo.d_plus, hi.d_plus) : harmonic_mean(lo.d_minus(), hi.d_minus());
}

double numerical_flux(double d_hat, double r_half, double c_j, double c_j1, double dr) {
  return d_hat * r_half * r_half * (c_j1 - c_j) / dr;
}

double robin_factor(double dr, double lambda) {
  if (std::isinf(lambda)) return 0.0;
  const double x = dr * lambda;
  if (x > 1.0) throw ValidationError("boundary too permeable for this grid: dr*lambda > 1");
  return 1.0 - x;
}

double robin_ghost(double c_n, double dr, double lambda) { return c_n * robin_factor(dr, lambda); }

StratumStencil make_stencil(const StratumGrid& grid, const StratumSpec& spec, Scheme scheme) {
  StratumStencil s;
  s.n = grid.n;
  s.dt = grid.dt;
  s.decay_step = grid.dt * spec.beta;
  s.floor = -std::numeric_limits<double>::infinity();
  s.coef_plus.resize(grid.n + 1);
  s.coef_minus.resize(grid.n + 1);
  for (std::size_t f = 0; f <= grid.n; ++f) {
    s.coef_plus[f] = spec.d_plus * grid.areas[f] / grid.dr;
    s.coef_minus[f] = spec.d_minus() * grid.areas[f] / grid.dr;
  }
  s.weights.resize(grid.n);
  s.step_over_weight.resize(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) {
    s.weights[j] = scheme == Scheme::conservative
                       ? grid.volumes[j]
                       : 4.0 * std::numbers::pi * grid.centers[j] * grid.centers[j] * grid.dr;
    s.step_over_weight[j] = grid.dt / s.weights[j];
  }
  return s;
}

namespace {

template <bool Directional>
inline double pick(double lo, double hi, double cp, double cm) {
  if constexpr (Directional) {
    return lo >= hi ? cp : cm;
  } else {
    (void)lo;
    (void)hi;
    (void)cm;
    return cp;
  }
}

template <bool Directional, bool Count>
StepTransfer step_impl(std::span<double> cells, const StratumStencil& st, const FaceCoupling& inner,
                       const FaceCoupling& outer, std::span<double> flux, std::uint64_t* count) {
  const std::size_t n = cells.size();
  double* c = cells.data();
  double* F = flux.data();
  const double* cp = st.coef_plus.data();
  const double* cm = st.coef_minus.data();

  std::uint64_t inward = 0;
  if (inner.kind == FaceCoupling::Kind::ghost) {
    const double g = inner.ghost;
    if constexpr (Count) inward += g < c[0];
    F[0] = pick<Directional>(g, c[0], inner.coef_plus, inner.coef_minus) * (c[0] - g);
  } else {
    F[0] = 0.0;
  }
  for (std::size_t f = 1; f < n; ++f) {
    const double lo = c[f - 1], hi = c[f];
    if constexpr (Count) inward += lo < hi;
    F[f] = pick<Directional>(lo, hi, cp[f], cm[f]) * (hi - lo);
  }
  if (outer.kind == FaceCoupling::Kind::closed) {
    F[n] = 0.0;
  } else {
    const double last = c[n - 1];
    const double g = outer.kind == FaceCoupling::Kind::robin ? outer.robin_factor * last : outer.ghost;
    if constexpr (Count) inward += last < g;
    F[n] = pick<Directional>(last, g, outer.coef_plus, outer.coef_minus) * (g - last);
  }

  StepTransfer out;
  out.gained_inner = -F[0] * st.dt;
  out.gained_outer = F[n] * st.dt;

  const double* __restrict sw = st.step_over_weight.data();
  const double* __restrict Fr = F;
  double* __restrict cr = c;
  const double floor = st.floor;
  int below = 0;
  if (st.decay_step > 0.0) {
    const double db = st.decay_step;
    const double* __restrict w = st.weights.data();
    double decayed = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double old = cr[j];
      decayed += db * w[j] * old;
      const double v = old + sw[j] * (Fr[j + 1] - Fr[j]) - db * old;
      cr[j] = v;
    }
    out.decayed = decayed;
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      cr[j] = cr[j] + sw[j] * (Fr[j + 1] - Fr[j]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) below |= cr[j] < floor;
  out.below_floor = below != 0;
  if (out.below_floor) out.min_value = *std::min_element(cr, cr + n);
  if constexpr (Count) *count += inward;
  return out;
}

}  // namespace

StepTransfer step_stratum(std::span<double> cells, const StratumStencil& stencil, const FaceCoupling& inner,
                          const FaceCoupling& outer, std::span<double> flux, const KernelOptions& options) {
  if (cells.empty()) return {};
  if (options.inward_branch_count) {
    return options.directional
               ? step_impl<true, true>(cells, stencil, inner, outer, flux, options.inward_branch_count)
               : step_impl<false, true>(cells, stencil, inner, outer, flux, options.inward_branch_count);
  }
  return options.directional ? step_impl<true, false>(cells, stencil, inner, outer, flux, nullptr)
                             : step_impl<false, false>(cells, stencil, inner, outer, flux, nullptr);
}

}  // namespace capsim

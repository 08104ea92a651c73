#include "capsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "capsim/errors.hpp"

namespace capsim {

namespace {

constexpr double pi = std::numbers::pi;

// μ cos μ - (1 - Bi) sin μ shares its roots with μ cot μ - (1 - Bi) away from the poles.
double characteristic(double mu, double biot) { return mu * std::cos(mu) - (1.0 - biot) * std::sin(mu); }

double bisect(double lo, double hi, double biot, double tol) {
  double f_lo = characteristic(lo, biot);
  const double width = tol * (hi - lo);
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = characteristic(mid, biot);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SphereOracle::SphereOracle(const OracleSpec& spec) : spec_(spec) {
  std::vector<std::string> issues;
  if (!(spec.radius > 0.0)) issues.emplace_back("oracle radius must be > 0");
  if (!(spec.diffusivity >= 0.0)) issues.emplace_back("oracle diffusivity must be >= 0");
  if (!(spec.lambda >= 0.0)) issues.emplace_back("Bi < 0: lambda must be >= 0");
  if (spec.n_terms < 1) issues.emplace_back("oracle needs at least one term");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  biot_ = spec.lambda * spec.radius;
  if (biot_ == 0.0) return;
  const auto n = static_cast<std::size_t>(spec.n_terms);
  mu_.resize(n);
  coef_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * pi;
    const double b = a + pi;
    if (std::isinf(biot_)) {
      mu_[k] = b;
      coef_[k] = 6.0 / (b * b);
      continue;
    }
    const double lo = k == 0 ? 1e-9 * std::min(1.0, 1.0 / biot_) : a;
    const double mu = bisect(lo, b, biot_, spec.tolerance);
    mu_[k] = mu;
    coef_[k] = 6.0 * biot_ * biot_ / (mu * mu * (mu * mu + biot_ * (biot_ - 1.0)));
  }
}

double SphereOracle::fraction(double t) const {
  if (t <= 0.0 || biot_ == 0.0) return 0.0;
  const double scale = spec_.diffusivity * t / (spec_.radius * spec_.radius);
  double remaining = 0.0;
  for (std::size_t k = mu_.size(); k-- > 0;) remaining += coef_[k] * std::exp(-scale * mu_[k] * mu_[k]);
  return std::clamp(1.0 - remaining, 0.0, 1.0);
}

double SphereOracle::released_mass(double t) const {
  return spec_.c0 * 4.0 / 3.0 * pi * spec_.radius * spec_.radius * spec_.radius * fraction(t);
}

double SphereOracle::truncation_bound(double t) const {
  if (biot_ == 0.0) return 0.0;
  const double N = static_cast<double>(mu_.size());
  if (t <= 0.0 || N < 2.0) return 1.0;
  const double scale = spec_.diffusivity * t / (spec_.radius * spec_.radius);
  double amplitude = 6.0 / (pi * pi * (N - 1.0));
  if (std::isfinite(biot_)) {
    const double m2 = N * N * pi * pi;
    amplitude *= std::max(1.0, biot_ * biot_ / (biot_ * biot_ - biot_ + m2));
  }
  return std::min(1.0, amplitude * std::exp(-scale * N * N * pi * pi));
}

double SphereOracle::residual(std::size_t n) const {
  const double mu = mu_.at(n);
  if (std::isinf(biot_)) return std::abs(std::sin(mu));
  return std::abs(mu / std::tan(mu) - (1.0 - biot_));
}

}  // namespace capsim

#include "capsim/capsule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "capsim/errors.hpp"

namespace capsim {

namespace {

std::string label(const StratumSpec& s, std::size_t i) {
  std::ostringstream os;
  os << "stratum " << i;
  if (!s.name.empty()) os << " (" << s.name << ")";
  return os.str();
}

int resolve_parent(const std::vector<StratumSpec>& strata, std::size_t i) {
  const auto& s = strata[i];
  if (!s.fictitious) return -1;
  if (s.parent >= 0) return s.parent;
  for (std::size_t k = i; k-- > 0;) {
    if (!strata[k].fictitious) return static_cast<int>(k);
  }
  return -1;
}

}  // namespace

long integer_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) return 0;
  const double q = a / b;
  const double k = std::round(q);
  if (k < 1.0 || std::abs(q - k) > 1e-9 * k) return 0;
  return static_cast<long>(k);
}

double shell_volume(double r_in, double r_out) {
  // (b³ - a³) factored so thin shells at large radius keep their digits.
  return 4.0 / 3.0 * std::numbers::pi * (r_out - r_in) * (r_in * r_in + r_in * r_out + r_out * r_out);
}

std::vector<double> derive_radii(std::span<const StratumSpec> strata) {
  std::vector<double> radii;
  radii.reserve(strata.size());
  double r = 0.0;
  for (std::size_t i = 0; i < strata.size(); ++i) {
    if (!(strata[i].thickness > 0.0) || !std::isfinite(strata[i].thickness)) {
      throw ValidationError(label(strata[i], i) + ": thickness must be positive");
    }
    r += strata[i].thickness;
    radii.push_back(r);
  }
  return radii;
}

std::vector<std::string> capsule_issues(const CapsuleSpec& spec, const CapsuleChecks& checks) {
  std::vector<std::string> issues;
  const auto& strata = spec.strata;
  if (strata.empty()) {
    issues.emplace_back("missing capsule: at least one stratum is required");
    return issues;
  }
  if (std::isnan(spec.lambda) || spec.lambda < 0.0) {
    issues.emplace_back("lambda must be >= 0");
  }

  auto nonneg = [&](double v, const std::string& who, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) issues.push_back(who + ": " + what + " must be finite and >= 0");
  };

  for (std::size_t i = 0; i < strata.size(); ++i) {
    const auto& s = strata[i];
    const auto who = label(s, i);
    if (!(s.thickness > 0.0) || !std::isfinite(s.thickness)) issues.push_back(who + ": thickness must be positive");
    nonneg(s.d_plus, who, "d_plus");
    nonneg(s.alpha, who, "alpha");
    nonneg(s.beta, who, "beta");
    nonneg(s.c_init, who, "c_init");
    if (!(s.dr > 0.0) || !std::isfinite(s.dr)) {
      issues.push_back(who + ": dr must be positive");
    } else if (s.thickness > 0.0 && integer_ratio(s.thickness, s.dr) == 0) {
      issues.push_back(who + ": dr does not divide thickness");
    }
    if (!(s.dt > 0.0) || !std::isfinite(s.dt)) issues.push_back(who + ": dt must be positive");

    if (s.fictitious) {
      const int p = resolve_parent(strata, i);
      if (p < 0 || p >= static_cast<int>(strata.size()) || p == static_cast<int>(i) || strata[p].fictitious) {
        issues.push_back(who + ": fictitious stratum has no physical parent");
      } else {
        const auto& ps = strata[p];
        if (ps.d_plus != s.d_plus || ps.alpha != s.alpha || ps.beta != s.beta || ps.c_init != s.c_init) {
          issues.push_back(who + ": fictitious stratum must share d_plus, alpha, beta and c_init with its parent");
        }
        const auto lo = std::min<std::size_t>(i, p), hi = std::max<std::size_t>(i, p);
        for (std::size_t k = lo + 1; k < hi; ++k) {
          if (!strata[k].fictitious || resolve_parent(strata, k) != p) {
            issues.push_back(who + ": fictitious stratum is not contiguous with its parent");
            break;
          }
        }
      }
    }
  }

  double dt_min = 0.0;
  for (const auto& s : strata) {
    if (s.dt > 0.0) dt_min = dt_min == 0.0 ? s.dt : std::min(dt_min, s.dt);
  }
  if (dt_min > 0.0) {
    for (std::size_t i = 0; i < strata.size(); ++i) {
      if (strata[i].dt > 0.0 && integer_ratio(strata[i].dt, dt_min) == 0) {
        issues.push_back(label(strata[i], i) + ": dt is not an integer multiple of the smallest dt");
      }
    }
  }

  for (std::size_t i = 0; i + 1 < strata.size(); ++i) {
    const double a = strata[i].dr, b = strata[i + 1].dr;
    if (!(a > 0.0) || !(b > 0.0)) continue;
    const double big = std::max(a, b), small = std::min(a, b);
    const long q = integer_ratio(big, small);
    std::ostringstream os;
    os << "interface " << i << "|" << i + 1 << ": ";
    if (q == 0) {
      issues.push_back(os.str() + "larger dr is not an integer multiple of the smaller");
    } else if (!checks.allow_ratio_violations && static_cast<double>(q) > checks.max_dr_ratio) {
      os << "dr ratio " << q << " exceeds " << checks.max_dr_ratio
         << " (enable fictitious-stratum insertion or raise the limit)";
      issues.push_back(os.str());
    }
  }
  return issues;
}

ValidatedCapsule validate_capsule(const CapsuleSpec& spec, const CapsuleChecks& checks) {
  auto issues = capsule_issues(spec, checks);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  ValidatedCapsule out;
  out.spec = spec;
  auto& strata = out.spec.strata;
  for (std::size_t i = 0; i < strata.size(); ++i) strata[i].parent = resolve_parent(spec.strata, i);
  out.radii = derive_radii(strata);

  std::size_t next_physical = 0;
  std::vector<std::size_t> physical_of_stratum(strata.size(), 0);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    if (!strata[i].fictitious) physical_of_stratum[i] = next_physical++;
  }
  for (std::size_t i = 0; i < strata.size(); ++i) {
    if (strata[i].fictitious) physical_of_stratum[i] = physical_of_stratum[strata[i].parent];
  }
  out.physical_index = physical_of_stratum;
  out.physical_radii.assign(next_physical, 0.0);
  for (std::size_t i = 0; i < strata.size(); ++i) {
    auto& r = out.physical_radii[physical_of_stratum[i]];
    r = std::max(r, out.radii[i]);
  }
  return out;
}

double initial_mass(const ValidatedCapsule& capsule) {
  double m = 0.0;
  for (std::size_t i = 0; i < capsule.size(); ++i) {
    m += capsule[i].c_init * shell_volume(capsule.inner_radius(i), capsule.radii[i]);
  }
  return m;
}

}  // namespace capsim

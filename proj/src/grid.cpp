#include "capsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "capsim/errors.hpp"

namespace capsim {

double StratumGrid::total_volume() const {
  double v = 0.0;
  for (double x : volumes) v += x;
  return v;
}

StratumGrid build_grid(const StratumSpec& stratum, double r_inner, double r_outer, std::size_t index) {
  StratumGrid g;
  g.stratum = index;
  g.dr = stratum.dr;
  g.dt = stratum.dt;
  g.r_inner = r_inner;
  g.r_outer = r_outer;
  g.n = static_cast<std::size_t>(integer_ratio(r_outer - r_inner, stratum.dr));
  if (g.n == 0) g.n = static_cast<std::size_t>(integer_ratio(stratum.thickness, stratum.dr));
  if (g.n == 0) throw ValidationError("stratum " + std::to_string(index) + ": dr does not divide thickness");

  g.faces.resize(g.n + 1);
  for (std::size_t j = 0; j < g.n; ++j) g.faces[j] = r_inner + static_cast<double>(j) * g.dr;
  g.faces[g.n] = r_outer;

  g.centers.resize(g.n);
  g.volumes.resize(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    g.centers[j] = r_inner + (static_cast<double>(j) + 0.5) * g.dr;
    g.volumes[j] = shell_volume(g.faces[j], g.faces[j + 1]);
  }
  g.areas.resize(g.n + 1);
  for (std::size_t j = 0; j <= g.n; ++j) g.areas[j] = 4.0 * std::numbers::pi * g.faces[j] * g.faces[j];
  return g;
}

std::vector<StratumGrid> build_grids(const ValidatedCapsule& capsule) {
  std::vector<StratumGrid> grids;
  grids.reserve(capsule.size());
  for (std::size_t i = 0; i < capsule.size(); ++i) {
    grids.push_back(build_grid(capsule[i], capsule.inner_radius(i), capsule.radii[i], i));
  }
  return grids;
}

double cfl_max_dt(const StratumGrid& grid, double d_max) {
  if (!(d_max > 0.0)) return std::numeric_limits<double>::infinity();
  return grid.dr * grid.dr / (2.0 * d_max);
}

double harmonic_mean(double a, double b) {
  if (a == b) return a;
  if (a == 0.0 || b == 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

double stratum_d_max(const ValidatedCapsule& capsule, std::size_t index) {
  const auto& s = capsule[index];
  double d = std::max(s.d_plus, s.d_minus());
  auto with_neighbour = [&](std::size_t k) {
    const auto& o = capsule[k];
    d = std::max({d, harmonic_mean(s.d_plus, o.d_plus), harmonic_mean(s.d_minus(), o.d_minus())});
  };
  if (index > 0) with_neighbour(index - 1);
  if (index + 1 < capsule.size()) with_neighbour(index + 1);
  return d;
}

namespace {

double spec_cfl_bound(const StratumSpec& s, double d_max) {
  if (!(d_max > 0.0)) return std::numeric_limits<double>::infinity();
  return s.dr * s.dr / (2.0 * d_max);
}

long largest_divisor_at_most(long n, double cap) {
  for (long d = std::min<long>(n, static_cast<long>(std::floor(cap))); d >= 2; --d) {
    if (n % d == 0) return d;
  }
  return 0;
}

struct Insertion {
  std::vector<StratumSpec> strata;  // ordered inner to outer
  bool carve_from_inner{false};     // coarse neighbour is the inner stratum
  double carved{0.0};
};

}  // namespace

ValidatedCapsule insert_fictitious_strata(const ValidatedCapsule& capsule, double max_ratio) {
  if (!(max_ratio >= 1.0)) throw ValidationError("fictitious_max_ratio must be >= 1");
  const auto& src = capsule.spec.strata;
  const std::size_t L = src.size();

  double dt_min = std::numeric_limits<double>::infinity();
  for (const auto& s : src) dt_min = std::min(dt_min, s.dt);

  std::vector<StratumSpec> work = src;
  std::vector<Insertion> inserts(L > 0 ? L - 1 : 0);
  std::vector<std::string> issues;
  bool changed = false;

  for (std::size_t i = 0; i + 1 < L; ++i) {
    const bool inner_coarse = src[i].dr > src[i + 1].dr;
    const std::size_t ci = inner_coarse ? i : i + 1;
    const auto& coarse = src[ci];
    const auto& fine = src[inner_coarse ? i + 1 : i];
    const long q = integer_ratio(coarse.dr, fine.dr);
    if (static_cast<double>(q) <= max_ratio) continue;

    std::vector<long> chain;  // dr multipliers of the fine step, ascending
    long current = 1;
    bool ok = true;
    while (static_cast<double>(q / current) > max_ratio) {
      const long d = largest_divisor_at_most(q / current, max_ratio);
      if (d == 0) {
        ok = false;
        break;
      }
      current *= d;
      chain.push_back(current);
    }
    std::ostringstream where;
    where << "interface " << i << "|" << i + 1;
    if (!ok) {
      issues.push_back(where.str() + ": dr ratio " + std::to_string(q) +
                       " cannot be graded with integer steps <= max ratio; use a larger fictitious_max_ratio");
      continue;
    }

    const int parent = coarse.fictitious ? coarse.parent : static_cast<int>(ci);
    const long k_parent = std::max<long>(1, integer_ratio(coarse.dt, dt_min));
    Insertion ins;
    ins.carve_from_inner = inner_coarse;
    for (long mult : chain) {
      StratumSpec f = coarse;
      f.fictitious = true;
      f.parent = parent;
      f.name = (coarse.name.empty() ? "stratum" + std::to_string(ci) : coarse.name) + "~x" + std::to_string(mult);
      f.dr = fine.dr * static_cast<double>(mult);
      const long per_coarse = q / mult;  // fictitious cells per coarse cell
      const long coarse_cells = (4 + per_coarse - 1) / per_coarse;
      f.thickness = static_cast<double>(coarse_cells) * coarse.dr;

      double d_max = std::max({f.d_plus, f.d_minus(), harmonic_mean(f.d_plus, fine.d_plus),
                               harmonic_mean(f.d_minus(), fine.d_minus())});
      const double bound = 0.9 * spec_cfl_bound(f, d_max);
      long best = 0;
      for (long m = k_parent; m >= 1; --m) {
        if (k_parent % m == 0 && dt_min * static_cast<double>(m) <= bound) {
          best = m;
          break;
        }
      }
      if (best == 0) {
        issues.push_back(where.str() + ": no admissible dt for inserted stratum with dr " + std::to_string(f.dr));
        ok = false;
        break;
      }
      f.dt = dt_min * static_cast<double>(best);
      ins.carved += f.thickness;
      ins.strata.push_back(f);
    }
    if (!ok) continue;
    // Inner-coarse: strata run from coarse to fine going outward.
    if (inner_coarse) std::reverse(ins.strata.begin(), ins.strata.end());
    work[ci].thickness -= ins.carved;
    inserts[i] = std::move(ins);
    changed = true;
  }

  for (std::size_t i = 0; i < L; ++i) {
    if (integer_ratio(work[i].thickness, work[i].dr) == 0 || work[i].thickness < work[i].dr * (1.0 - 1e-9)) {
      issues.push_back("stratum " + std::to_string(i) +
                       " is too thin to split at the requested grading; use a larger fictitious_max_ratio");
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  if (!changed) return capsule;

  // Assemble, remapping parents to the new positions.
  std::vector<StratumSpec> out;
  std::vector<int> new_index(L, -1);
  for (std::size_t i = 0; i < L; ++i) {
    new_index[i] = static_cast<int>(out.size());
    out.push_back(work[i]);
    if (i + 1 < L) {
      for (const auto& f : inserts[i].strata) out.push_back(f);
    }
  }
  for (auto& s : out) {
    if (s.fictitious && s.parent >= 0) s.parent = new_index[s.parent];
  }

  CapsuleSpec spec{out, capsule.spec.lambda};
  return validate_capsule(spec, CapsuleChecks{max_ratio, false});
}

ValidatedCapsule enforce_cfl(const ValidatedCapsule& capsule, bool clamp) {
  const std::size_t L = capsule.size();
  std::vector<double> bounds(L);
  std::vector<std::string> issues;
  double min_target = std::numeric_limits<double>::infinity();
  double dt_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < L; ++i) {
    bounds[i] = spec_cfl_bound(capsule[i], stratum_d_max(capsule, i));
    dt_min = std::min(dt_min, capsule[i].dt);
    if (capsule[i].dt > bounds[i] * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "stratum " << i << ": dt " << capsule[i].dt << " exceeds the CFL bound " << bounds[i];
      issues.push_back(os.str());
      min_target = std::min(min_target, 0.9 * bounds[i]);
    }
  }
  if (issues.empty()) return capsule;
  if (!clamp) throw ValidationError(std::move(issues));

  // New base divides the old smallest step, so untouched strata stay integer multiples.
  const double m = std::ceil(dt_min / min_target - 1e-12);
  const double base = dt_min / std::max(1.0, m);
  CapsuleSpec spec = capsule.spec;
  for (std::size_t i = 0; i < L; ++i) {
    if (spec.strata[i].dt > bounds[i] * (1.0 + 1e-12)) {
      spec.strata[i].dt = base * std::max(1.0, std::floor(0.9 * bounds[i] / base));
    }
  }
  return validate_capsule(spec, CapsuleChecks{std::numeric_limits<double>::infinity(), false});
}

}  // namespace capsim

#include "capsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "capsim/csv.hpp"
#include "capsim/errors.hpp"

namespace capsim {

namespace {

std::vector<std::string> config_issues(const SimulationConfig& c) {
  std::vector<std::string> issues;
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) issues.emplace_back("t_end must be finite and >= 0");
  if (!(c.output_every > 0.0) || !std::isfinite(c.output_every)) issues.emplace_back("output_every must be > 0");
  if (!(c.profile_every >= 0.0) || !std::isfinite(c.profile_every)) {
    issues.emplace_back("profile_every must be >= 0");
  }
  if (!(c.fictitious_max_ratio >= 1.0)) issues.emplace_back("fictitious_max_ratio must be >= 1");
  return issues;
}

// Strata that can end up carrying the Robin boundary.
std::vector<std::size_t> exposable_strata(const ValidatedCapsule& capsule, bool eroding) {
  std::vector<std::size_t> out;
  const std::size_t last = capsule.size() - 1;
  if (!eroding) return {last};
  const double floor = capsule.core_radius() * (1.0 - 1e-12);
  for (std::size_t i = 0; i <= last; ++i) {
    if (capsule.radii[i] >= floor) out.push_back(i);
  }
  return out;
}

std::uint64_t ticks_for(double seconds, double dt_min) {
  return static_cast<std::uint64_t>(std::llround(seconds / dt_min));
}

}  // namespace

ValidatedCapsule prepare_capsule(const SimulationConfig& config) {
  auto issues = config_issues(config);
  std::optional<ValidatedCapsule> capsule;
  try {
    capsule = validate_capsule(config.capsule,
                               CapsuleChecks{config.fictitious_max_ratio, config.auto_fictitious});
    if (config.auto_fictitious && config.fictitious_max_ratio >= 1.0) {
      capsule = insert_fictitious_strata(*capsule, config.fictitious_max_ratio);
    }
    capsule = enforce_cfl(*capsule, config.clamp_cfl);
  } catch (const ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  if (capsule) {
    const bool eroding = config.erosion && !config.erosion->empty();
    if (eroding) {
      auto more = erosion_issues(*config.erosion, capsule->outer_radius());
      issues.insert(issues.end(), more.begin(), more.end());
    }
    for (std::size_t i : exposable_strata(*capsule, eroding)) {
      const double x = (*capsule)[i].dr * capsule->spec.lambda;
      if (std::isfinite(capsule->spec.lambda) && x > 1.0) {
        std::ostringstream os;
        os << "stratum " << i << ": boundary too permeable for this grid (dr*lambda = " << x << " > 1)";
        issues.push_back(os.str());
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return *capsule;
}

Schedule build_schedule(const ValidatedCapsule& capsule) {
  Schedule s;
  s.dt_min = std::numeric_limits<double>::infinity();
  for (const auto& st : capsule.spec.strata) s.dt_min = std::min(s.dt_min, st.dt);
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < capsule.size(); ++i) {
    const long k = integer_ratio(capsule[i].dt, s.dt_min);
    if (k == 0) issues.push_back("stratum " + std::to_string(i) + ": dt is not an integer multiple of the smallest dt");
    s.multiplier.push_back(k);
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return s;
}

Owner interface_owner(const StratumSpec& inner, const StratumSpec& outer) {
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); };
  if (!same(inner.dr, outer.dr)) return inner.dr < outer.dr ? Owner::inner : Owner::outer;
  if (!same(inner.dt, outer.dt)) return inner.dt < outer.dt ? Owner::inner : Owner::outer;
  return Owner::outer;
}

Simulation::Simulation(const SimulationConfig& config, KernelOptions options)
    : config_(config),
      options_(options),
      capsule_(prepare_capsule(config)),
      schedule_(build_schedule(capsule_)),
      grids_(build_grids(capsule_)),
      release_(initial_mass(capsule_)) {
  const std::size_t L = capsule_.size();
  std::size_t widest = 0;
  double c_max = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    stencils_.push_back(make_stencil(grids_[i], capsule_[i], config_.scheme));
    cells_.emplace_back(grids_[i].n, capsule_[i].c_init);
    alive_.push_back(grids_[i].n);
    widest = std::max(widest, grids_[i].n);
    c_max = std::max(c_max, capsule_[i].c_init);
    const double x = capsule_[i].dr * capsule_.spec.lambda;
    robin_.push_back(std::isinf(capsule_.spec.lambda) ? 0.0 : (x <= 1.0 ? 1.0 - x : std::nan("")));
  }
  flux_.assign(widest + 1, 0.0);
  eps_neg_ = 1e-14 * c_max;
  for (auto& st : stencils_) st.floor = -eps_neg_;
  top_ = L - 1;
  end_tick_ = ticks_for(config_.t_end, schedule_.dt_min);

  links_.resize(L - 1);
  snapshot_.assign(L - 1, 0.0);
  for (std::size_t i = 0; i + 1 < L; ++i) {
    auto& link = links_[i];
    const auto& a = capsule_[i];
    const auto& b = capsule_[i + 1];
    link.owner = interface_owner(a, b);
    const double dr = link.owner == Owner::inner ? a.dr : b.dr;
    const double r = capsule_.radii[i];
    const double area = 4.0 * std::numbers::pi * r * r;
    link.coef_plus = harmonic_mean(a.d_plus, b.d_plus) * area / dr;
    link.coef_minus = harmonic_mean(a.d_minus(), b.d_minus()) * area / dr;
  }
}

std::span<const double> Simulation::cells(std::size_t stratum) const {
  return {cells_[stratum].data(), alive_[stratum]};
}

double Simulation::outer_radius() const { return grids_[top_].faces[alive_[top_]]; }

double Simulation::pending_buffer_mass() const {
  double b = 0.0;
  for (std::size_t i = 0; i < top_; ++i) b += links_[i].buffer;
  return b;
}

double Simulation::in_capsule_mass() const {
  double m = 0.0;
  for (std::size_t s = 0; s <= top_; ++s) {
    const auto& v = grids_[s].volumes;
    for (std::size_t j = 0; j < alive_[s]; ++j) m += v[j] * cells_[s][j];
  }
  return m - pending_buffer_mass();
}

double Simulation::audit() const {
  return mass_audit(release_.initial_mass(), in_capsule_mass(), release_.m_total(), release_.decayed());
}

void Simulation::append_profile(std::vector<ProfilePoint>& out) const {
  const double t = time();
  for (std::size_t s = 0; s <= top_; ++s) {
    for (std::size_t j = 0; j < alive_[s]; ++j) out.push_back({t, grids_[s].centers[j], cells_[s][j]});
  }
}

double Simulation::boundary_value(std::size_t stratum, bool outer_side) const {
  return outer_side ? cells_[stratum][alive_[stratum] - 1] : cells_[stratum][0];
}

void Simulation::check_value(double v, std::size_t stratum) const {
  if (v < -eps_neg_) {
    std::ostringstream os;
    os << "negative concentration " << v << " in stratum " << stratum << " at tick " << tick_ << " (t = " << time()
       << " s); reduce dt";
    throw StabilityFault(os.str(), tick_, stratum);
  }
}

void Simulation::flush(std::size_t i) {
  auto& link = links_[i];
  if (link.buffer == 0.0) return;
  const std::size_t other = link.owner == Owner::outer ? i : i + 1;
  const std::size_t j = link.owner == Owner::outer ? alive_[other] - 1 : 0;
  double& c = cells_[other][j];
  c -= link.buffer / stencils_[other].weights[j];
  link.buffer = 0.0;
  check_value(c, other);
}

void Simulation::erode(double t) {
  const double R = radius_at(*config_.erosion, t, capsule_.outer_radius(), capsule_.core_radius());
  const double tol = 1e-12 * capsule_.outer_radius();
  double eroded = 0.0;
  while (true) {
    const std::size_t s = top_;
    const std::size_t j = alive_[s] - 1;
    if (grids_[s].faces[j] < R - tol) break;
    if (s == 0 && j == 0) {
      status_ = RunStatus::fully_eroded;
      break;
    }
    if (j == 0 && s > 0) flush(s - 1);
    eroded += cells_[s][j] * stencils_[s].weights[j];
    --alive_[s];
    if (alive_[s] == 0) --top_;
  }
  if (eroded != 0.0) release_.accumulate(0.0, eroded);
}

bool Simulation::step() {
  if (status_ == RunStatus::fully_eroded) return false;
  if (config_.erosion && !config_.erosion->empty()) {
    erode(time());
    if (status_ == RunStatus::fully_eroded) return false;
  }

  for (std::size_t i = 0; i < top_; ++i) {
    snapshot_[i] = links_[i].owner == Owner::outer ? boundary_value(i, true) : boundary_value(i + 1, false);
  }

  double released = 0.0;
  double decayed = 0.0;
  for (std::size_t s = top_ + 1; s-- > 0;) {
    if (!schedule_.due(s, tick_)) continue;
    const auto& st = stencils_[s];
    FaceCoupling inner;
    FaceCoupling outer;
    const bool owns_inner = s > 0 && links_[s - 1].owner == Owner::outer;
    const bool owns_outer = s < top_ && links_[s].owner == Owner::inner;
    if (owns_inner) {
      const auto& link = links_[s - 1];
      inner = {FaceCoupling::Kind::ghost, link.coef_plus, link.coef_minus, snapshot_[s - 1], 1.0};
    }
    if (s == top_) {
      const std::size_t f = alive_[s];
      outer = {FaceCoupling::Kind::robin, st.coef_plus[f], st.coef_minus[f], 0.0, robin_[s]};
    } else if (owns_outer) {
      const auto& link = links_[s];
      outer = {FaceCoupling::Kind::ghost, link.coef_plus, link.coef_minus, snapshot_[s], 1.0};
    }
    const auto tr = step_stratum({cells_[s].data(), alive_[s]}, st, inner, outer, flux_, options_);
    if (tr.below_floor) check_value(tr.min_value, s);
    if (owns_inner) links_[s - 1].buffer += tr.gained_inner;
    if (owns_outer) links_[s].buffer += tr.gained_outer;
    if (s == top_) released -= tr.gained_outer;
    decayed += tr.decayed;
  }

  for (std::size_t i = 0; i < top_; ++i) {
    if (links_[i].buffer == 0.0) continue;
    const std::size_t other = links_[i].owner == Owner::outer ? i : i + 1;
    if (schedule_.due(other, tick_)) flush(i);
  }

  release_.accumulate(released, 0.0);
  release_.add_decayed(decayed);
  ++tick_;
  return true;
}

SimulationResult simulate(const SimulationConfig& config, const KernelOptions& options) {
  Simulation sim(config, options);
  SimulationResult result;
  const double dt_min = sim.schedule().dt_min;
  const std::uint64_t out_every = std::max<std::uint64_t>(1, ticks_for(config.output_every, dt_min));
  const std::uint64_t prof_every =
      config.profile_every > 0.0 ? std::max<std::uint64_t>(1, ticks_for(config.profile_every, dt_min)) : 0;

  result.record.initial_mass = sim.release().initial_mass();
  result.record.samples.push_back(sim.release().sample(0.0));
  if (prof_every) sim.append_profile(result.profiles);

  while (sim.tick() < sim.end_tick()) {
    if (!sim.step()) break;
    const auto n = sim.tick();
    if (n % out_every == 0) result.record.samples.push_back(sim.release().sample(sim.time()));
    if (prof_every && n % prof_every == 0) sim.append_profile(result.profiles);
  }
  if (result.record.samples.back().t != sim.time()) result.record.samples.push_back(sim.release().sample(sim.time()));

  result.record.decayed_mass = sim.release().decayed();
  result.status = sim.status();
  result.ticks = sim.tick();
  result.final_audit = sim.audit();
  result.capsule = sim.capsule();
  result.schedule = sim.schedule();
  return result;
}

std::string profiles_to_csv(const std::vector<ProfilePoint>& profiles) {
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"t_s", "r_um", "c_ug_per_um3"});
  for (const auto& p : profiles) {
    w.field(p.t).field(p.r).field(p.c);
    w.end_row();
  }
  return os.str();
}

}  // namespace capsim

#pragma once

#include <string>
#include <vector>

namespace capsim {

struct ReleaseSample {
  double t{0.0};
  double m_flux{0.0};
  double m_eroded{0.0};
  double m_total{0.0};
  double fraction{0.0};

  bool operator==(const ReleaseSample&) const = default;
};

/// Cumulative released mass sampled over time, with the decay tally needed to close the mass balance.
struct ReleaseRecord {
  std::vector<ReleaseSample> samples;
  double decayed_mass{0.0};
  double initial_mass{0.0};

  /// m_total at time `t`, linearly interpolated and held constant outside the sampled range.
  double total_at(double t) const;
};

/// Running sums owned by the time loop.
class ReleaseAccumulator {
public:
  explicit ReleaseAccumulator(double initial_mass) : initial_(initial_mass) {}

  /// Adds one tick worth of outgoing boundary flux and eroded mass [µg].
  /// Increments below -1e-12·initial are an internal fault (std::logic_error).
  void accumulate(double boundary_flux_mass, double eroded_mass);
  void add_decayed(double mass) { decayed_ += mass; }

  double m_flux() const { return flux_; }
  double m_eroded() const { return eroded_; }
  double m_total() const { return flux_ + eroded_; }
  double decayed() const { return decayed_; }
  double initial_mass() const { return initial_; }

  ReleaseSample sample(double t) const;

private:
  double initial_;
  double flux_{0.0};
  double eroded_{0.0};
  double decayed_{0.0};
};

/// |initial - (in_capsule + released + decayed)| / initial; the absolute residual when initial is 0.
double mass_audit(double initial, double in_capsule, double released, double decayed);

/// `t_s,m_flux_ug,m_eroded_ug,m_total_ug,fraction`
std::string release_to_csv(const ReleaseRecord& record);

}  // namespace capsim

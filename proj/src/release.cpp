#include "capsim/release.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "capsim/csv.hpp"

namespace capsim {

double ReleaseRecord::total_at(double t) const {
  if (samples.empty()) return 0.0;
  if (t <= samples.front().t) return samples.front().m_total;
  if (t >= samples.back().t) return samples.back().m_total;
  auto it = std::upper_bound(samples.begin(), samples.end(), t, [](double v, const auto& s) { return v < s.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return a.m_total + w * (b.m_total - a.m_total);
}

void ReleaseAccumulator::accumulate(double boundary_flux_mass, double eroded_mass) {
  const double tol = -1e-12 * initial_;
  if (boundary_flux_mass < tol || eroded_mass < tol) {
    std::ostringstream os;
    os << "negative release increment (flux " << boundary_flux_mass << ", eroded " << eroded_mass << ")";
    throw std::logic_error(os.str());
  }
  flux_ += boundary_flux_mass;
  eroded_ += eroded_mass;
}

ReleaseSample ReleaseAccumulator::sample(double t) const {
  ReleaseSample s;
  s.t = t;
  s.m_flux = flux_;
  s.m_eroded = eroded_;
  s.m_total = flux_ + eroded_;
  s.fraction = initial_ > 0.0 ? s.m_total / initial_ : 0.0;
  return s;
}

double mass_audit(double initial, double in_capsule, double released, double decayed) {
  const double residual = std::abs(initial - (in_capsule + released + decayed));
  return initial > 0.0 ? residual / initial : residual;
}

std::string release_to_csv(const ReleaseRecord& record) {
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"t_s", "m_flux_ug", "m_eroded_ug", "m_total_ug", "fraction"});
  for (const auto& s : record.samples) {
    w.field(s.t).field(s.m_flux).field(s.m_eroded).field(s.m_total).field(s.fraction);
    w.end_row();
  }
  return os.str();
}

}  // namespace capsim

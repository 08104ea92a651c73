#include "capsim/erosion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "capsim/csv.hpp"
#include "capsim/errors.hpp"

namespace capsim {

std::vector<std::string> erosion_issues(const ErosionSchedule& schedule, double r_outer) {
  std::vector<std::string> issues;
  if (!schedule.samples.empty()) {
    const auto& s = schedule.samples;
    if (s.front().t != 0.0) issues.emplace_back("erosion samples must start at t = 0");
    if (std::abs(s.front().radius - r_outer) > 1e-9 * r_outer) {
      std::ostringstream os;
      os << "erosion samples must start at the outer radius " << r_outer << " (got " << s.front().radius << ")";
      issues.push_back(os.str());
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s[i].t) || !std::isfinite(s[i].radius)) {
        issues.push_back("erosion sample " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && !(s[i].t > s[i - 1].t)) {
        issues.push_back("erosion sample " + std::to_string(i) + ": time is not strictly increasing");
      }
      if (i > 0 && s[i].radius > s[i - 1].radius) {
        issues.push_back("erosion sample " + std::to_string(i) + ": radius increases");
      }
    }
  } else {
    double last_end = 0.0;
    for (std::size_t i = 0; i < schedule.phases.size(); ++i) {
      const auto& p = schedule.phases[i];
      const auto who = "erosion phase " + std::to_string(i);
      if (!(p.t_start >= 0.0) || !(p.t_end > p.t_start)) issues.push_back(who + ": needs 0 <= t_start < t_end");
      if (!(p.speed >= 0.0) || !std::isfinite(p.speed)) issues.push_back(who + ": speed must be finite and >= 0");
      if (p.t_start < last_end) issues.push_back(who + ": overlaps the previous phase");
      last_end = std::max(last_end, p.t_end);
    }
  }
  return issues;
}

double radius_at(const ErosionSchedule& schedule, double t, double r_outer, double r_core) {
  double r = r_outer;
  if (!schedule.samples.empty()) {
    const auto& s = schedule.samples;
    if (t <= s.front().t) {
      r = s.front().radius;
    } else if (t >= s.back().t) {
      r = s.back().radius;
    } else {
      auto it = std::upper_bound(s.begin(), s.end(), t, [](double v, const auto& x) { return v < x.t; });
      const auto& b = *it;
      const auto& a = *(it - 1);
      const double w = (t - a.t) / (b.t - a.t);
      r = a.radius + w * (b.radius - a.radius);
    }
  } else {
    double eroded = 0.0;
    for (const auto& p : schedule.phases) {
      const double span = std::min(t, p.t_end) - p.t_start;
      if (span > 0.0) eroded += p.speed * span;
    }
    r = r_outer - eroded;
  }
  return std::max(r_core, r);
}

ErosionSchedule parse_erosion_csv(const std::string& text) {
  const auto table = parse_numeric_csv(text);
  ErosionSchedule schedule;
  const auto& h = table.header;
  if (h == std::vector<std::string>{"t_s", "R_um"}) {
    for (const auto& row : table.rows) schedule.samples.push_back({row[0], row[1]});
  } else if (h == std::vector<std::string>{"t_start_s", "t_end_s", "v_um_per_s"}) {
    for (const auto& row : table.rows) schedule.phases.push_back({row[0], row[1], row[2]});
  } else {
    throw ConfigError("erosion CSV header must be 't_s,R_um' or 't_start_s,t_end_s,v_um_per_s'", 1);
  }
  if (schedule.empty()) throw ConfigError("erosion CSV has no rows", 0);
  return schedule;
}

ErosionSchedule load_erosion_csv(const std::filesystem::path& path) {
  try {
    return parse_erosion_csv(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), 0);
  }
}

std::string erosion_to_csv(const ErosionSchedule& schedule) {
  std::ostringstream os;
  CsvWriter w(os);
  if (!schedule.samples.empty()) {
    w.header({"t_s", "R_um"});
    for (const auto& s : schedule.samples) {
      w.field(s.t).field(s.radius);
      w.end_row();
    }
  } else {
    w.header({"t_start_s", "t_end_s", "v_um_per_s"});
    for (const auto& p : schedule.phases) {
      w.field(p.t_start).field(p.t_end).field(p.speed);
      w.end_row();
    }
  }
  return os.str();
}

}  // namespace capsim

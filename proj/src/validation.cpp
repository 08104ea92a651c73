#include "capsim/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "capsim/csv.hpp"
#include "capsim/oracle.hpp"

namespace capsim {

StratumSpec test_stratum(double thickness, double dr, double dt) {
  StratumSpec s;
  s.thickness = thickness;
  s.d_plus = TestSphere::diffusivity;
  s.alpha = 1.0;
  s.beta = 0.0;
  s.c_init = TestSphere::c0;
  s.dr = dr;
  s.dt = dt;
  return s;
}

namespace {

SimulationConfig base_config(std::vector<StratumSpec> strata, Scheme scheme) {
  SimulationConfig c;
  c.capsule.strata = std::move(strata);
  c.capsule.lambda = TestSphere::lambda;
  c.t_end = TestSphere::t_end;
  c.output_every = 60.0;
  c.scheme = scheme;
  return c;
}

}  // namespace

SimulationConfig test_sphere_config(double dr, double dt, Scheme scheme) {
  return base_config({test_stratum(TestSphere::radius, dr, dt)}, scheme);
}

std::vector<ValidationCase> validation_cases(Scheme scheme) {
  std::vector<ValidationCase> cases;
  cases.push_back({"fine", test_sphere_config(0.1, 1e-3, scheme), 0.034});
  cases.push_back({"coarse", test_sphere_config(1.0, 0.1, scheme), 0.376});

  std::vector<StratumSpec> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(test_stratum(10.0, 1.0, 0.1));
  cases.push_back({"10-coarse", base_config(ten, scheme), 0.376});

  const double mult[] = {1, 0.5, 0.1, 0.05, 0.1, 0.5, 1, 0.05, 0.05, 1};
  ten.clear();
  for (double m : mult) ten.push_back(test_stratum(10.0, 0.1, 1e-3 * m));
  cases.push_back({"10-fine-var-dt", base_config(ten, scheme), 0.033});

  cases.push_back({"coarse+fine",
                   base_config({test_stratum(75.0, 1.0, 0.02), test_stratum(25.0, 0.1, 1e-3)}, scheme), 0.073});
  cases.push_back({"fine+coarse",
                   base_config({test_stratum(75.0, 0.1, 1e-3), test_stratum(25.0, 1.0, 0.02)}, scheme), 0.374});
  return cases;
}

ErrorStats compare_release(const ReleaseRecord& record, const std::function<double(double)>& reference) {
  ErrorStats e;
  double sum = 0.0;
  for (const auto& s : record.samples) {
    const double ref = reference(s.t);
    const double diff = std::abs(s.fraction - ref);
    e.max_abs = std::max(e.max_abs, diff);
    if (ref >= 0.01) {
      const double rel = 100.0 * diff / ref;
      sum += rel;
      e.max_rel_pct = std::max(e.max_rel_pct, rel);
      ++e.counted;
    }
  }
  e.mean_rel_pct = e.counted ? sum / static_cast<double>(e.counted) : 0.0;
  return e;
}

std::string scheme_name(Scheme scheme) { return scheme == Scheme::conservative ? "conservative" : "paper"; }

std::vector<ValidationRow> run_validation_suite(const ValidationOptions& options) {
  using clock = std::chrono::steady_clock;
  std::vector<ValidationRow> rows;
  const SphereOracle oracle(OracleSpec{TestSphere::radius, TestSphere::diffusivity, TestSphere::lambda,
                                       TestSphere::c0, 400, 1e-15});

  for (Scheme scheme : options.schemes) {
    std::function<double(double)> reference = [&](double t) { return oracle.fraction(t); };
    ReleaseRecord paper_reference;
    if (options.reference == Reference::paper_grid) {
      paper_reference = simulate(test_sphere_config(0.01, 1e-5, scheme)).record;
      reference = [&](double t) {
        return paper_reference.total_at(t) / paper_reference.initial_mass;
      };
    }
    for (const auto& c : validation_cases(scheme)) {
      if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), c.name) == options.only.end()) {
        continue;
      }
      std::uint64_t inward = 0;
      const auto start = clock::now();
      const auto result = simulate(c.config, KernelOptions{true, &inward});
      ValidationRow row;
      row.runtime_s = std::chrono::duration<double>(clock::now() - start).count();
      row.config = c.name;
      row.scheme = scheme;
      row.error = compare_release(result.record, reference);
      row.published_pct = c.published_pct;
      row.final_fraction = result.record.samples.back().fraction;
      row.inward_branches = inward;
      if (options.progress) options.progress(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"config", "mean_rel_err_pct", "max_rel_err_pct", "runtime_s"});
  for (const auto& r : rows) {
    w.field(r.config + "/" + scheme_name(r.scheme))
        .field(r.error.mean_rel_pct)
        .field(r.error.max_rel_pct)
        .field(r.runtime_s);
    w.end_row();
  }
  return os.str();
}

std::string validation_table(const std::vector<ValidationRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-13s %12s %12s %10s %10s %10s\n", "config", "scheme", "mean err %",
                "max err %", "published", "final", "runtime s");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-13s %12.4f %12.4f %10.3f %10.6f %10.1f\n", r.config.c_str(),
                  scheme_name(r.scheme).c_str(), r.error.mean_rel_pct, r.error.max_rel_pct, r.published_pct,
                  r.final_fraction, r.runtime_s);
    os << line;
  }
  return os.str();
}

}  // namespace capsim

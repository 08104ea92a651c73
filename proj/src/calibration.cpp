#include "capsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "capsim/csv.hpp"
#include "capsim/errors.hpp"

namespace capsim {

namespace {

using Field = ParameterPath::Field;

Field parse_field(std::string_view name, std::string_view path) {
  if (name == "d_plus") return Field::d_plus;
  if (name == "alpha") return Field::alpha;
  if (name == "beta") return Field::beta;
  if (name == "c_init") return Field::c_init;
  throw ValidationError("parameter path '" + std::string(path) + "': unknown field '" + std::string(name) +
                        "' (expected d_plus, alpha, beta or c_init)");
}

std::size_t parse_index(std::string_view text, std::string_view path) {
  std::size_t value = 0;
  if (text.empty()) throw ValidationError("parameter path '" + std::string(path) + "': empty stratum index");
  for (char ch : text) {
    if (ch < '0' || ch > '9') {
      throw ValidationError("parameter path '" + std::string(path) + "': bad stratum index '" + std::string(text) + "'");
    }
    value = value * 10 + static_cast<std::size_t>(ch - '0');
  }
  return value;
}

double& field_ref(StratumSpec& s, Field f) {
  switch (f) {
    case Field::d_plus: return s.d_plus;
    case Field::alpha: return s.alpha;
    case Field::beta: return s.beta;
    case Field::c_init: return s.c_init;
    case Field::lambda: break;
  }
  throw std::logic_error("lambda is not a stratum field");
}

int physical_parent(const std::vector<StratumSpec>& strata, std::size_t k) {
  if (strata[k].parent >= 0) return strata[k].parent;
  for (std::size_t i = k; i-- > 0;) {
    if (!strata[i].fictitious) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

ParameterPath parse_parameter_path(std::string_view text, std::size_t n_strata) {
  ParameterPath p;
  p.text = std::string(text);
  if (text == "lambda") return p;

  const std::string_view prefix = "strata[";
  const auto close = text.find("].");
  if (text.substr(0, prefix.size()) != prefix || close == std::string_view::npos) {
    throw ValidationError("parameter path '" + p.text + "': expected 'lambda' or 'strata[<indices>].<field>'");
  }
  p.field = parse_field(text.substr(close + 2), text);
  const auto list = text.substr(prefix.size(), close - prefix.size());
  if (list == "*") {
    p.strata.resize(n_strata);
    std::iota(p.strata.begin(), p.strata.end(), std::size_t{0});
  } else {
    std::size_t start = 0;
    while (start <= list.size()) {
      auto comma = list.find(',', start);
      if (comma == std::string_view::npos) comma = list.size();
      const auto item = list.substr(start, comma - start);
      const auto dash = item.find('-');
      if (dash == std::string_view::npos) {
        p.strata.push_back(parse_index(item, text));
      } else {
        const auto a = parse_index(item.substr(0, dash), text);
        const auto b = parse_index(item.substr(dash + 1), text);
        if (b < a) throw ValidationError("parameter path '" + p.text + "': descending range");
        for (auto i = a; i <= b; ++i) p.strata.push_back(i);
      }
      start = comma + 1;
    }
  }
  for (auto i : p.strata) {
    if (i >= n_strata) {
      throw ValidationError("parameter path '" + p.text + "': stratum " + std::to_string(i) + " does not exist (" +
                            std::to_string(n_strata) + " strata)");
    }
  }
  return p;
}

double get_parameter(const SimulationConfig& config, const ParameterPath& path) {
  if (path.field == Field::lambda) return config.capsule.lambda;
  auto s = config.capsule.strata.at(path.strata.front());
  return field_ref(s, path.field);
}

void set_parameter(SimulationConfig& config, const ParameterPath& path, double value) {
  if (path.field == Field::lambda) {
    config.capsule.lambda = value;
    return;
  }
  auto& strata = config.capsule.strata;
  for (auto i : path.strata) {
    if (strata.at(i).fictitious) {
      if (path.text.find('*') != std::string::npos) continue;
      throw ValidationError("parameter path '" + path.text + "': stratum " + std::to_string(i) +
                            " is fictitious; address its physical parent");
    }
    field_ref(strata[i], path.field) = value;
    for (std::size_t k = 0; k < strata.size(); ++k) {
      if (strata[k].fictitious && physical_parent(strata, k) == static_cast<int>(i)) {
        field_ref(strata[k], path.field) = value;
      }
    }
  }
}

std::vector<DataPoint> parse_experimental_csv(const std::string& text) {
  const auto table = parse_numeric_csv(text);
  std::size_t ct = 0, cr = 0;
  try {
    ct = table.column("t_min");
    cr = table.column("release");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("experimental data: ") + e.what(), 1);
  }
  std::vector<DataPoint> out;
  for (const auto& row : table.rows) out.push_back({60.0 * row[ct], row[cr]});
  return out;
}

double objective(const SimulationConfig& config, const std::vector<DataPoint>& data, ObjectiveKind kind,
                 DataUnit unit, std::string* diagnostic) {
  if (data.empty()) throw std::invalid_argument("no data");
  std::size_t usable = 0;
  double t_max = 0.0;
  for (const auto& d : data) {
    t_max = std::max(t_max, d.t);
    if (kind == ObjectiveKind::rmse_absolute || d.value != 0.0) ++usable;
  }
  if (usable == 0) throw std::invalid_argument("no data");

  SimulationConfig run = config;
  run.t_end = std::max(run.t_end, t_max);
  run.profile_every = 0.0;
  ReleaseRecord record;
  try {
    record = simulate(run).record;
  } catch (const std::exception& e) {
    if (diagnostic) *diagnostic = e.what();
    return std::numeric_limits<double>::infinity();
  }
  const double scale = unit == DataUnit::fraction && record.initial_mass > 0.0 ? 1.0 / record.initial_mass : 1.0;
  double sum = 0.0;
  for (const auto& d : data) {
    const double sim = record.total_at(d.t) * scale;
    if (kind == ObjectiveKind::rmse_absolute) {
      sum += (sim - d.value) * (sim - d.value);
    } else if (d.value != 0.0) {
      const double r = (sim - d.value) / d.value;
      sum += r * r;
    }
  }
  return std::sqrt(sum / static_cast<double>(usable));
}

namespace {

struct Coordinates {
  std::vector<ParameterPath> paths;
  std::vector<FreeParameter> params;
  std::vector<double> lo, hi;  // in search coordinates

  double to_unit(std::size_t i, double x) const {
    const double y = params[i].log_scale ? std::log(x) : x;
    return std::clamp((y - lo[i]) / (hi[i] - lo[i]), 0.0, 1.0);
  }
  double from_unit(std::size_t i, double z) const {
    z = std::clamp(z, 0.0, 1.0);
    const double y = lo[i] + z * (hi[i] - lo[i]);
    const double x = params[i].log_scale ? std::exp(y) : y;
    return std::clamp(x, params[i].lower, params[i].upper);
  }
};

struct BudgetExhausted {};

}  // namespace

FitResult fit_parameters(const SimulationConfig& base, const std::vector<DataPoint>& data,
                         const FitSettings& settings) {
  const std::size_t d = settings.parameters.size();
  std::vector<std::string> issues;
  Coordinates co;
  co.params = settings.parameters;
  for (const auto& p : settings.parameters) {
    try {
      co.paths.push_back(parse_parameter_path(p.path, base.capsule.strata.size()));
    } catch (const ValidationError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
      issues.push_back("parameter '" + p.path + "': bounds must be finite with lower < upper");
    } else if (p.log_scale && !(p.lower > 0.0)) {
      issues.push_back("parameter '" + p.path + "': log scale needs a positive lower bound");
    }
    co.lo.push_back(p.log_scale && p.lower > 0.0 ? std::log(p.lower) : p.lower);
    co.hi.push_back(p.log_scale && p.upper > 0.0 ? std::log(p.upper) : p.upper);
  }
  if (settings.max_evaluations < static_cast<int>(d) + 1) {
    issues.push_back("max_evaluations must be at least the number of free parameters + 1");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  FitResult result;
  for (const auto& p : settings.parameters) result.paths.push_back(p.path);

  auto config_at = [&](const std::vector<double>& z) {
    SimulationConfig c = base;
    for (std::size_t i = 0; i < d; ++i) set_parameter(c, co.paths[i], co.from_unit(i, z[i]));
    return c;
  };
  auto evaluate = [&](const std::vector<double>& z) {
    if (static_cast<int>(result.trace.size()) >= settings.max_evaluations) throw BudgetExhausted{};
    FitEvaluation ev;
    ev.index = static_cast<int>(result.trace.size());
    for (std::size_t i = 0; i < d; ++i) ev.values.push_back(co.from_unit(i, z[i]));
    std::string why;
    try {
      ev.loss = objective(config_at(z), data, settings.objective, settings.unit, &why);
    } catch (const ValidationError& e) {
      ev.loss = std::numeric_limits<double>::infinity();
      why = e.what();
    }
    if (!why.empty()) result.diagnostics.push_back("evaluation " + std::to_string(ev.index) + ": " + why);
    result.trace.push_back(ev);
    return ev.loss;
  };

  std::vector<double> z0(d);
  for (std::size_t i = 0; i < d; ++i) z0[i] = co.to_unit(i, get_parameter(base, co.paths[i]));

  std::vector<std::vector<double>> x{z0};
  std::vector<double> f;
  result.status = FitStatus::converged;
  try {
    f.push_back(evaluate(z0));
    result.initial_loss = f[0];
    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    for (std::size_t i = 0; i < d; ++i) {
      auto v = z0;
      const double step = 0.1 * jitter(rng);
      v[i] = v[i] + step <= 1.0 ? v[i] + step : v[i] - step;
      x.push_back(v);
      f.push_back(evaluate(v));
    }

    auto clip = [](std::vector<double> v) {
      for (auto& e : v) e = std::clamp(e, 0.0, 1.0);
      return v;
    };
    auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double coef) {
      std::vector<double> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = c[i] + coef * (w[i] - c[i]);
      return clip(v);
    };

    while (d > 0) {
      std::vector<std::size_t> order(d + 1);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      std::vector<std::vector<double>> xs;
      std::vector<double> fs;
      for (auto k : order) {
        xs.push_back(x[k]);
        fs.push_back(f[k]);
      }
      x = std::move(xs);
      f = std::move(fs);

      double diameter = 0.0;
      for (std::size_t k = 1; k <= d; ++k) {
        for (std::size_t i = 0; i < d; ++i) diameter = std::max(diameter, std::abs(x[k][i] - x[0][i]));
      }
      if (diameter <= 1e-7) break;

      std::vector<double> c(d, 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < d; ++i) c[i] += x[k][i] / static_cast<double>(d);
      }
      const auto& worst = x[d];
      const auto xr = along(c, worst, -1.0);
      const double fr = evaluate(xr);
      if (fr < f[0]) {
        const auto xe = along(c, worst, -2.0);
        const double fe = evaluate(xe);
        if (fe < fr) {
          x[d] = xe;
          f[d] = fe;
        } else {
          x[d] = xr;
          f[d] = fr;
        }
      } else if (fr < f[d - 1]) {
        x[d] = xr;
        f[d] = fr;
      } else {
        const bool outside = fr < f[d];
        const auto xc = outside ? along(c, xr, 0.5) : along(c, worst, 0.5);
        const double fc = evaluate(xc);
        if (fc < std::min(fr, f[d])) {
          x[d] = xc;
          f[d] = fc;
        } else {
          for (std::size_t k = 1; k <= d; ++k) {
            x[k] = along(x[0], x[k], 0.5);
            f[k] = evaluate(x[k]);
          }
        }
      }
    }
  } catch (const BudgetExhausted&) {
    result.status = FitStatus::budget_exhausted;
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k] < f[best]) best = k;
  }
  result.loss = f[best];
  result.best_config = config_at(x[best]);
  for (std::size_t i = 0; i < d; ++i) result.best.push_back(co.from_unit(i, x[best][i]));
  return result;
}

std::string fit_report(const FitResult& result) {
  std::ostringstream os;
  os << "status: " << (result.status == FitStatus::converged ? "converged" : "budget_exhausted") << '\n';
  os << "loss: " << format_number(result.loss) << '\n';
  os << "initial_loss: " << format_number(result.initial_loss) << '\n';
  os << "evaluations: " << result.trace.size() << '\n';
  os << "parameters:\n";
  for (std::size_t i = 0; i < result.paths.size(); ++i) {
    os << "  " << result.paths[i] << ": " << format_number(result.best[i]) << '\n';
  }
  if (!result.diagnostics.empty()) {
    os << "diagnostics:\n";
    for (const auto& d : result.diagnostics) os << "  - \"" << d << "\"\n";
  }
  return os.str();
}

std::string fit_trace_csv(const FitResult& result) {
  std::ostringstream os;
  CsvWriter w(os);
  std::vector<std::string> header{"evaluation", "loss"};
  header.insert(header.end(), result.paths.begin(), result.paths.end());
  w.header(header);
  for (const auto& ev : result.trace) {
    w.field(static_cast<double>(ev.index)).field(ev.loss);
    for (double v : ev.values) w.field(v);
    w.end_row();
  }
  return os.str();
}

std::vector<SweepMember> sweep_parameter(const SimulationConfig& reference, const std::string& path,
                                         const std::vector<double>& values) {
  const auto p = parse_parameter_path(path, reference.capsule.strata.size());
  std::vector<SweepMember> members;
  for (double v : values) {
    SweepMember m;
    m.value = v;
    try {
      if (std::isinf(v) && p.field != Field::lambda) {
        throw ValidationError("only lambda accepts inf");
      }
      SimulationConfig c = reference;
      set_parameter(c, p, v);
      m.record = simulate(c).record;
    } catch (const std::exception& e) {
      m.error = e.what();
    }
    members.push_back(std::move(m));
  }
  return members;
}

std::string sweep_to_csv(const std::string& path, const std::vector<SweepMember>& members) {
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"series", "value", "t_s", "m_flux_ug", "m_eroded_ug", "m_total_ug", "fraction"});
  for (const auto& m : members) {
    if (!m.record) continue;
    const std::string label = path + "=" + format_number(m.value);
    for (const auto& s : m.record->samples) {
      w.field(std::string_view(label)).field(m.value).field(s.t).field(s.m_flux).field(s.m_eroded);
      w.field(s.m_total).field(s.fraction);
      w.end_row();
    }
  }
  return os.str();
}

std::string objective_name(ObjectiveKind kind) {
  return kind == ObjectiveKind::rmse_absolute ? "rmse_absolute" : "rmse_relative";
}

std::string unit_name(DataUnit unit) { return unit == DataUnit::microgram ? "ug" : "fraction"; }

}  // namespace capsim

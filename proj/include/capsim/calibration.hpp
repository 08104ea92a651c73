#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capsim/release.hpp"
#include "capsim/simulation.hpp"

namespace capsim {

/**
 * Addressable scalar of a configuration:
 *   lambda
 *   strata[i].field, strata[i-j].field, strata[i,j,...].field, strata[*].field
 * with field one of d_plus, alpha, beta, c_init and 0-based indices in configuration order.
 * Writing a physical stratum also writes the fictitious strata that inherit from it.
 */
struct ParameterPath {
  enum class Field { lambda, d_plus, alpha, beta, c_init };
  Field field{Field::lambda};
  std::vector<std::size_t> strata;  ///< empty for lambda
  std::string text;
};

/// Throws ValidationError for malformed paths or indices outside [0, n_strata).
ParameterPath parse_parameter_path(std::string_view text, std::size_t n_strata);

/// Value at the first addressed stratum.
double get_parameter(const SimulationConfig& config, const ParameterPath& path);
void set_parameter(SimulationConfig& config, const ParameterPath& path, double value);

struct FreeParameter {
  std::string path;
  double lower{0.0};
  double upper{0.0};
  bool log_scale{false};

  bool operator==(const FreeParameter&) const = default;
};

enum class ObjectiveKind { rmse_absolute, rmse_relative };
enum class DataUnit { microgram, fraction };

struct FitSettings {
  ObjectiveKind objective{ObjectiveKind::rmse_absolute};
  DataUnit unit{DataUnit::microgram};
  int max_evaluations{200};
  std::uint64_t seed{1};
  std::vector<FreeParameter> parameters;

  bool operator==(const FitSettings&) const = default;
};

struct DataPoint {
  double t{0.0};  ///< s
  double value{0.0};
};

/// `t_min,release` CSV; times are converted to seconds.
std::vector<DataPoint> parse_experimental_csv(const std::string& text);

/**
 * Root-mean-square deviation between the simulated cumulative release (linearly interpolated
 * between output samples) and the data. The relative kind skips zero-valued data points.
 * A simulation fault yields +inf and fills `diagnostic`. Throws std::invalid_argument("no data").
 */
double objective(const SimulationConfig& config, const std::vector<DataPoint>& data, ObjectiveKind kind,
                 DataUnit unit, std::string* diagnostic = nullptr);

enum class FitStatus { converged, budget_exhausted };

struct FitEvaluation {
  int index{0};
  std::vector<double> values;
  double loss{0.0};
};

struct FitResult {
  SimulationConfig best_config;
  std::vector<std::string> paths;
  std::vector<double> best;
  double loss{0.0};
  double initial_loss{0.0};
  FitStatus status{FitStatus::converged};
  std::vector<FitEvaluation> trace;
  std::vector<std::string> diagnostics;
};

/// Bounded Nelder-Mead in clipped, optionally log-scaled coordinates, started from the
/// configuration's current values. The initial simplex is perturbed with a seeded generator.
FitResult fit_parameters(const SimulationConfig& base, const std::vector<DataPoint>& data,
                         const FitSettings& settings);

std::string fit_report(const FitResult& result);
/// `evaluation,loss,<path>...`
std::string fit_trace_csv(const FitResult& result);

struct SweepMember {
  double value{0.0};
  std::optional<ReleaseRecord> record;
  std::string error;
};

/// One run per value with everything else fixed; failing members carry their error.
std::vector<SweepMember> sweep_parameter(const SimulationConfig& reference, const std::string& path,
                                         const std::vector<double>& values);

/// Long format: `series,value,t_s,m_flux_ug,m_eroded_ug,m_total_ug,fraction`.
std::string sweep_to_csv(const std::string& path, const std::vector<SweepMember>& members);

std::string objective_name(ObjectiveKind kind);
std::string unit_name(DataUnit unit);

}  // namespace capsim

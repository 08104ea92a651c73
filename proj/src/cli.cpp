#include "capsim/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "capsim/calibration.hpp"
#include "capsim/config.hpp"
#include "capsim/csv.hpp"
#include "capsim/errors.hpp"
#include "capsim/oracle.hpp"
#include "capsim/simulation.hpp"
#include "capsim/validation.hpp"

#ifndef CAPSIM_VERSION
#define CAPSIM_VERSION "0.0.0"
#endif

namespace capsim {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string scheme;
  bool clamp_cfl{false};
  std::string out{"out"};
  double output_every{0.0};
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scheme", c.scheme, "Discrete form: conservative (volume-exact) or paper")
      ->check(CLI::IsMember({"conservative", "paper"}));
  app->add_flag("--clamp-cfl", c.clamp_cfl, "Lower time steps that violate the CFL bound to 0.9 of it");
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--output-every", c.output_every, "Sampling interval [s], rounded to the smallest dt")
      ->check(CLI::PositiveNumber);
}

void apply_common(SimulationConfig& cfg, const Common& c) {
  if (c.scheme == "conservative") cfg.scheme = Scheme::conservative;
  if (c.scheme == "paper") cfg.scheme = Scheme::paper_form;
  if (c.clamp_cfl) cfg.clamp_cfl = true;
  if (c.output_every > 0.0) cfg.output_every = c.output_every;
}

nlohmann::json manifest(const std::vector<std::string>& args, const std::string& command, const std::string& config_path,
                        const fs::path& out, double wall_s, const RunConfig* rc) {
  nlohmann::json m;
  m["command"] = command;
  m["argv"] = args;
  m["config_path"] = config_path;
  m["output_directory"] = out.string();
  m["wall_clock_s"] = wall_s;
  m["versions"] = {{"capsim", CAPSIM_VERSION}, {"compiler", __VERSION__}, {"cxx_standard", __cplusplus}};
  if (rc) {
    m["config"] = emit_config(*rc);
    try {
      const auto capsule = prepare_capsule(rc->simulation);
      auto& strata = m["resolved_strata"];
      strata = nlohmann::json::array();
      for (std::size_t i = 0; i < capsule.size(); ++i) {
        const auto& s = capsule[i];
        strata.push_back({{"name", s.name},
                          {"r_inner_um", capsule.inner_radius(i)},
                          {"r_outer_um", capsule.radii[i]},
                          {"d_plus", s.d_plus},
                          {"alpha", s.alpha},
                          {"beta", s.beta},
                          {"c_init", s.c_init},
                          {"dr", s.dr},
                          {"dt", s.dt},
                          {"fictitious", s.fictitious},
                          {"physical_stratum", capsule.physical_index[i]}});
      }
    } catch (const ValidationError&) {
    }
  }
  return m;
}

void write_manifest(const fs::path& out, const nlohmann::json& m) {
  write_text_file(out / "manifest.json", m.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_number(item));
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--values", e.what());
    }
  }
  if (out.empty()) throw CLI::ValidationError("--values", "empty value list");
  return out;
}

}  // namespace

std::string release_svg(const ReleaseRecord& record) {
  if (record.samples.empty()) throw std::invalid_argument("empty release record");
  const double w = 640, h = 400, pad = 50;
  const double t_max = std::max(record.samples.back().t, 1e-300);
  double m_max = 0.0;
  for (const auto& s : record.samples) m_max = std::max(m_max, s.m_total);
  if (m_max <= 0.0) m_max = 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">t [s] (max "
     << format_number(t_max) << ")</text>\n";
  os << "<text x=\"15\" y=\"" << h / 2 << "\" transform=\"rotate(-90 15 " << h / 2
     << ")\" text-anchor=\"middle\">released mass [ug] (max " << format_number(m_max) << ")</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& s : record.samples) {
    const double x = pad + (w - 2 * pad) * s.t / t_max;
    const double y = h - pad - (h - 2 * pad) * s.m_total / m_max;
    os << format_number(x) << ',' << format_number(y) << ' ';
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"capsim: finite-volume release from multi-stratum spherical capsules"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CAPSIM_VERSION);
  app.footer(
      "Exit codes: 0 ok, 1 usage, 2 validation, 3 runtime fault.\n"
      "t_end and sampling intervals are rounded to the nearest multiple of the smallest dt.");

  Common common;
  std::string config_path, data_path, param, values;
  bool svg = false, paper_reference = false;
  std::vector<std::string> only;

  auto* sim = app.add_subcommand("simulate", "Run a configuration; writes release.csv, profiles.csv, manifest.json");
  sim->add_option("config", config_path, "Configuration file")->required();
  sim->add_flag("--svg", svg, "Also write release.svg");
  add_common(sim, common);

  auto* val = app.add_subcommand("validate", "Six-grid comparison on the homogeneous test sphere");
  val->add_flag("--paper-reference", paper_reference,
                "Compare against the dr = 0.01, dt = 1e-5 grid instead of the analytic series (very long)");
  val->add_option("--only", only, "Restrict to named grid configurations");
  add_common(val, common);

  auto* fit = app.add_subcommand("fit", "Estimate the parameters listed in the config's fit section");
  fit->add_option("config", config_path, "Configuration file with a fit section")->required();
  fit->add_option("data", data_path, "Experimental CSV with header t_min,release")->required();
  add_common(fit, common);

  auto* sweep = app.add_subcommand("sweep", "One run per value of a parameter");
  sweep->add_option("config", config_path, "Configuration file")->required();
  sweep->add_option("--param", param, "Parameter path, e.g. lambda or strata[1-2].d_plus")->required();
  sweep->add_option("--values", values, "Comma-separated values; inf selects a perfect sink for lambda")->required();
  add_common(sweep, common);

  auto* orc = app.add_subcommand("oracle", "Analytic series for a homogeneous sphere configuration");
  orc->add_option("config", config_path, "Configuration file")->required();
  add_common(orc, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << CAPSIM_VERSION << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_usage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const fs::path out_dir = common.out;
  try {
    if (sim->parsed()) {
      auto rc = load_config(config_path, [&](SimulationConfig& c) { apply_common(c, common); });
      auto cfg = rc.simulation;
      if (cfg.profile_every <= 0.0) cfg.profile_every = cfg.t_end;
      const auto result = simulate(cfg);
      write_text_file(out_dir / "release.csv", release_to_csv(result.record));
      write_text_file(out_dir / "profiles.csv", profiles_to_csv(result.profiles));
      if (svg) write_text_file(out_dir / "release.svg", release_svg(result.record));
      auto m = manifest(args, "simulate", config_path, out_dir, seconds_since(t0), &rc);
      m["status"] = result.status == RunStatus::completed ? "completed" : "capsule fully eroded";
      m["mass_audit"] = result.final_audit;
      write_manifest(out_dir, m);
      const auto& last = result.record.samples.back();
      out << "t = " << format_number(last.t) << " s, released " << format_number(last.m_total) << " ug (fraction "
          << format_number(last.fraction) << "), status " << m["status"].get<std::string>() << '\n';
      return exit_ok;
    }

    if (val->parsed()) {
      ValidationOptions opt;
      opt.reference = paper_reference ? Reference::paper_grid : Reference::oracle;
      if (common.scheme == "conservative") opt.schemes = {Scheme::conservative};
      if (common.scheme == "paper") opt.schemes = {Scheme::paper_form};
      opt.only = only;
      opt.progress = [&](const ValidationRow& r) {
        out << r.config << " [" << scheme_name(r.scheme) << "]: mean " << format_number(r.error.mean_rel_pct)
            << " %, runtime " << format_number(r.runtime_s) << " s\n";
        out.flush();
      };
      const auto rows = run_validation_suite(opt);
      write_text_file(out_dir / "validation.csv", validation_csv(rows));
      const auto table = validation_table(rows);
      write_text_file(out_dir / "validation.txt", table);
      out << table;
      auto m = manifest(args, "validate", "", out_dir, seconds_since(t0), nullptr);
      m["reference"] = paper_reference ? "grid dr=0.01 dt=1e-5" : "analytic series";
      write_manifest(out_dir, m);
      return exit_ok;
    }

    if (fit->parsed()) {
      auto rc = load_config(config_path, [&](SimulationConfig& c) { apply_common(c, common); });
      if (!rc.fit) throw ValidationError("configuration has no 'fit' section");
      const auto data = parse_experimental_csv(read_text_file(data_path));
      const auto result = fit_parameters(rc.simulation, data, *rc.fit);
      write_text_file(out_dir / "fit_report.txt", fit_report(result));
      write_text_file(out_dir / "fit_trace.csv", fit_trace_csv(result));
      RunConfig best{result.best_config, rc.fit};
      write_text_file(out_dir / "best_config.yaml", emit_config(best));
      write_text_file(out_dir / "release.csv", release_to_csv(simulate(result.best_config).record));
      auto m = manifest(args, "fit", config_path, out_dir, seconds_since(t0), &rc);
      m["data_path"] = data_path;
      write_manifest(out_dir, m);
      out << fit_report(result);
      return exit_ok;
    }

    if (sweep->parsed()) {
      auto rc = load_config(config_path, [&](SimulationConfig& c) { apply_common(c, common); });
      const auto members = sweep_parameter(rc.simulation, param, parse_values(values));
      write_text_file(out_dir / "sweep.csv", sweep_to_csv(param, members));
      auto m = manifest(args, "sweep", config_path, out_dir, seconds_since(t0), &rc);
      m["parameter"] = param;
      auto& fam = m["members"];
      fam = nlohmann::json::array();
      bool any_failed = false;
      for (const auto& mb : members) {
        fam.push_back({{"value", format_number(mb.value)}, {"error", mb.error}});
        if (mb.record) {
          out << param << " = " << format_number(mb.value) << ": final release "
              << format_number(mb.record->samples.back().m_total) << " ug\n";
        } else {
          err << param << " = " << format_number(mb.value) << ": " << mb.error << '\n';
          any_failed = true;
        }
      }
      write_manifest(out_dir, m);
      return any_failed ? exit_runtime : exit_ok;
    }

    if (orc->parsed()) {
      auto rc = load_config(config_path, [&](SimulationConfig& c) { apply_common(c, common); });
      const auto& cfg = rc.simulation;
      const auto capsule = prepare_capsule(cfg);
      std::vector<std::string> issues;
      for (const auto& s : capsule.spec.strata) {
        if (s.d_plus != capsule[0].d_plus || s.c_init != capsule[0].c_init || s.beta != 0.0) {
          issues.emplace_back("oracle needs uniform d_plus and c_init and beta = 0 in every stratum");
          break;
        }
      }
      if (cfg.erosion) issues.emplace_back("oracle does not model erosion");
      if (!issues.empty()) throw ValidationError(std::move(issues));
      const SphereOracle oracle(
          OracleSpec{capsule.outer_radius(), capsule[0].d_plus, capsule.spec.lambda, capsule[0].c_init, 400, 1e-15});
      std::ostringstream os;
      CsvWriter w(os);
      w.header({"t_s", "m_total_ug", "fraction", "truncation_bound"});
      const auto n = static_cast<long>(std::llround(cfg.t_end / cfg.output_every));
      for (long i = 0; i <= n; ++i) {
        const double t = std::min(cfg.t_end, static_cast<double>(i) * cfg.output_every);
        w.field(t).field(oracle.released_mass(t)).field(oracle.fraction(t)).field(oracle.truncation_bound(t));
        w.end_row();
      }
      write_text_file(out_dir / "oracle.csv", os.str());
      write_manifest(out_dir, manifest(args, "oracle", config_path, out_dir, seconds_since(t0), &rc));
      out << "Bi = " << format_number(oracle.biot()) << ", final fraction " << format_number(oracle.fraction(cfg.t_end))
          << '\n';
      return exit_ok;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ValidationError& e) {
    err << "validation failed:\n";
    for (const auto& issue : e.issues()) err << "  - " << issue << '\n';
    return exit_validation;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_validation;
  } catch (const StabilityFault& e) {
    err << "stability fault at tick " << e.tick() << ", stratum " << e.stratum() << ": " << e.what() << '\n';
    return exit_runtime;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return exit_runtime;
  }
  err << app.help();
  return exit_usage;
}

}  // namespace capsim

#include "capsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <set>
#include <sstream>

#include "capsim/csv.hpp"
#include "capsim/errors.hpp"

namespace capsim {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  throw ConfigError(message, line_of(node));
}

void require_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail(node, what + " must be a mapping");
}

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

double number(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a number");
  try {
    return parse_number(node.Scalar());
  } catch (const std::invalid_argument&) {
    fail(node, "'" + key + "' must be a number, got '" + node.Scalar() + "'");
  }
}

bool boolean(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be true or false");
  const auto& s = node.Scalar();
  if (s == "true") return true;
  if (s == "false") return false;
  fail(node, "'" + key + "' must be true or false, got '" + s + "'");
}

long integer(const YAML::Node& node, const std::string& key) {
  const double v = number(node, key);
  if (v != std::floor(v) || std::abs(v) > 9e15) fail(node, "'" + key + "' must be an integer");
  return static_cast<long>(v);
}

std::string text(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a string");
  return node.Scalar();
}

std::vector<std::vector<double>> rows(const YAML::Node& node, const std::string& key, std::size_t width) {
  if (!node.IsSequence()) fail(node, "'" + key + "' must be a list");
  std::vector<std::vector<double>> out;
  for (const auto& row : node) {
    if (!row.IsSequence() || row.size() != width) {
      fail(row, "each '" + key + "' entry must be a list of " + std::to_string(width) + " numbers");
    }
    std::vector<double> r;
    for (const auto& v : row) r.push_back(number(v, key));
    out.push_back(std::move(r));
  }
  return out;
}

ErosionSchedule parse_erosion(const YAML::Node& node, const std::filesystem::path& base_dir) {
  require_map(node, "erosion");
  check_keys(node, {"file", "samples", "phases"}, "erosion");
  if (node.size() != 1) fail(node, "erosion needs exactly one of 'file', 'samples', 'phases'");
  ErosionSchedule e;
  if (node["file"]) {
    std::filesystem::path p = text(node["file"], "file");
    if (p.is_relative()) p = base_dir / p;
    try {
      return load_erosion_csv(p);
    } catch (const std::runtime_error& err) {
      fail(node["file"], err.what());
    }
  }
  if (node["samples"]) {
    for (const auto& r : rows(node["samples"], "samples", 2)) e.samples.push_back({r[0], r[1]});
  } else {
    for (const auto& r : rows(node["phases"], "phases", 3)) e.phases.push_back({r[0], r[1], r[2]});
  }
  if (e.empty()) fail(node, "erosion schedule is empty");
  return e;
}

StratumSpec parse_stratum(const YAML::Node& node, const std::vector<StratumSpec>& earlier) {
  require_map(node, "stratum");
  check_keys(node, {"name", "thickness", "d_plus", "alpha", "beta", "c_init", "dr", "dt", "fictitious", "parent"},
             "stratum");
  StratumSpec s;
  if (node["fictitious"]) s.fictitious = boolean(node["fictitious"], "fictitious");
  if (node["parent"]) s.parent = static_cast<int>(integer(node["parent"], "parent"));
  if (node["name"]) s.name = text(node["name"], "name");
  for (const char* key : {"thickness", "dr", "dt"}) {
    if (!node[key]) fail(node, std::string("stratum is missing '") + key + "'");
  }
  s.thickness = number(node["thickness"], "thickness");
  s.dr = number(node["dr"], "dr");
  s.dt = number(node["dt"], "dt");

  if (s.fictitious) {
    int p = s.parent;
    if (p < 0) {
      for (std::size_t i = earlier.size(); i-- > 0;) {
        if (!earlier[i].fictitious) {
          p = static_cast<int>(i);
          break;
        }
      }
    }
    if (p >= 0 && static_cast<std::size_t>(p) < earlier.size()) {
      s.parent = p;
      const auto& parent = earlier[p];
      s.d_plus = parent.d_plus;
      s.alpha = parent.alpha;
      s.beta = parent.beta;
      s.c_init = parent.c_init;
    }
  } else if (!node["d_plus"]) {
    fail(node, "stratum is missing 'd_plus'");
  }
  if (node["d_plus"]) s.d_plus = number(node["d_plus"], "d_plus");
  if (node["alpha"]) s.alpha = number(node["alpha"], "alpha");
  if (node["beta"]) s.beta = number(node["beta"], "beta");
  if (node["c_init"]) s.c_init = number(node["c_init"], "c_init");
  return s;
}

FitSettings parse_fit(const YAML::Node& node) {
  require_map(node, "fit");
  check_keys(node, {"objective", "data_unit", "max_evaluations", "seed", "parameters"}, "fit");
  FitSettings f;
  if (node["objective"]) {
    const auto o = text(node["objective"], "objective");
    if (o == "rmse_absolute") f.objective = ObjectiveKind::rmse_absolute;
    else if (o == "rmse_relative") f.objective = ObjectiveKind::rmse_relative;
    else fail(node["objective"], "objective must be rmse_absolute or rmse_relative");
  }
  if (node["data_unit"]) {
    const auto u = text(node["data_unit"], "data_unit");
    if (u == "ug") f.unit = DataUnit::microgram;
    else if (u == "fraction") f.unit = DataUnit::fraction;
    else fail(node["data_unit"], "data_unit must be ug or fraction");
  }
  if (node["max_evaluations"]) f.max_evaluations = static_cast<int>(integer(node["max_evaluations"], "max_evaluations"));
  if (node["seed"]) f.seed = static_cast<std::uint64_t>(integer(node["seed"], "seed"));
  if (node["parameters"]) {
    if (!node["parameters"].IsSequence()) fail(node["parameters"], "'parameters' must be a list");
    for (const auto& p : node["parameters"]) {
      require_map(p, "fit parameter");
      check_keys(p, {"path", "lower", "upper", "log"}, "fit parameter");
      for (const char* key : {"path", "lower", "upper"}) {
        if (!p[key]) fail(p, std::string("fit parameter is missing '") + key + "'");
      }
      FreeParameter fp;
      fp.path = text(p["path"], "path");
      fp.lower = number(p["lower"], "lower");
      fp.upper = number(p["upper"], "upper");
      if (p["log"]) fp.log_scale = boolean(p["log"], "log");
      f.parameters.push_back(fp);
    }
  }
  return f;
}

}  // namespace

RunConfig parse_config(const std::string& source, const std::filesystem::path& base_dir, const ConfigAdjust& adjust) {
  YAML::Node root;
  try {
    root = YAML::Load(source);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root || root.IsNull()) throw ValidationError("missing capsule: the configuration is empty");
  require_map(root, "configuration");
  check_keys(root,
             {"lambda", "t_end", "output_every", "profile_every", "scheme", "fictitious_max_ratio", "auto_fictitious",
              "clamp_cfl", "erosion", "strata", "fit"},
             "configuration");
  if (!root["strata"]) throw ValidationError("missing capsule: no 'strata' list");

  RunConfig rc;
  auto& c = rc.simulation;
  if (!root["strata"].IsSequence() || root["strata"].size() == 0) fail(root["strata"], "missing capsule: 'strata' must be a non-empty list");
  for (const auto& s : root["strata"]) c.capsule.strata.push_back(parse_stratum(s, c.capsule.strata));
  for (const char* key : {"lambda", "t_end"}) {
    if (!root[key]) fail(root, std::string("missing '") + key + "'");
  }
  c.capsule.lambda = number(root["lambda"], "lambda");
  c.t_end = number(root["t_end"], "t_end");
  if (!(c.t_end > 0.0)) fail(root["t_end"], "t_end must be > 0");
  if (root["output_every"]) c.output_every = number(root["output_every"], "output_every");
  if (root["profile_every"]) c.profile_every = number(root["profile_every"], "profile_every");
  if (root["scheme"]) {
    const auto s = text(root["scheme"], "scheme");
    if (s == "conservative") c.scheme = Scheme::conservative;
    else if (s == "paper" || s == "paper_form") c.scheme = Scheme::paper_form;
    else fail(root["scheme"], "scheme must be conservative or paper");
  }
  if (root["fictitious_max_ratio"]) c.fictitious_max_ratio = number(root["fictitious_max_ratio"], "fictitious_max_ratio");
  if (root["auto_fictitious"]) c.auto_fictitious = boolean(root["auto_fictitious"], "auto_fictitious");
  if (root["clamp_cfl"]) c.clamp_cfl = boolean(root["clamp_cfl"], "clamp_cfl");
  if (root["erosion"]) c.erosion = parse_erosion(root["erosion"], base_dir);
  if (root["fit"]) rc.fit = parse_fit(root["fit"]);
  if (adjust) adjust(c);

  prepare_capsule(c);
  if (rc.fit) {
    std::vector<std::string> issues;
    for (const auto& p : rc.fit->parameters) {
      try {
        parse_parameter_path(p.path, c.capsule.strata.size());
      } catch (const ValidationError& e) {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
      }
      if (!(p.lower < p.upper)) issues.push_back("fit parameter '" + p.path + "': lower must be < upper");
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }
  return rc;
}

RunConfig load_config(const std::filesystem::path& path, const ConfigAdjust& adjust) {
  std::string source;
  try {
    source = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what(), 0);
  }
  try {
    return parse_config(source, path.parent_path(), adjust);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line());
  }
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return format_exact(v);
}

}  // namespace

std::string emit_config(const RunConfig& rc) {
  const auto& c = rc.simulation;
  std::ostringstream os;
  os << "lambda: " << num(c.capsule.lambda) << '\n';
  os << "t_end: " << num(c.t_end) << '\n';
  os << "output_every: " << num(c.output_every) << '\n';
  os << "profile_every: " << num(c.profile_every) << '\n';
  os << "scheme: " << (c.scheme == Scheme::conservative ? "conservative" : "paper") << '\n';
  os << "fictitious_max_ratio: " << num(c.fictitious_max_ratio) << '\n';
  os << "auto_fictitious: " << (c.auto_fictitious ? "true" : "false") << '\n';
  os << "clamp_cfl: " << (c.clamp_cfl ? "true" : "false") << '\n';
  if (c.erosion) {
    os << "erosion:\n";
    if (!c.erosion->samples.empty()) {
      os << "  samples:\n";
      for (const auto& s : c.erosion->samples) os << "    - [" << num(s.t) << ", " << num(s.radius) << "]\n";
    } else {
      os << "  phases:\n";
      for (const auto& p : c.erosion->phases) {
        os << "    - [" << num(p.t_start) << ", " << num(p.t_end) << ", " << num(p.speed) << "]\n";
      }
    }
  }
  os << "strata:\n";
  for (const auto& s : c.capsule.strata) {
    os << "  - name: " << quoted(s.name) << '\n';
    os << "    thickness: " << num(s.thickness) << '\n';
    os << "    d_plus: " << num(s.d_plus) << '\n';
    os << "    alpha: " << num(s.alpha) << '\n';
    os << "    beta: " << num(s.beta) << '\n';
    os << "    c_init: " << num(s.c_init) << '\n';
    os << "    dr: " << num(s.dr) << '\n';
    os << "    dt: " << num(s.dt) << '\n';
    if (s.fictitious) os << "    fictitious: true\n";
    if (s.parent >= 0) os << "    parent: " << s.parent << '\n';
  }
  if (rc.fit) {
    const auto& f = *rc.fit;
    os << "fit:\n";
    os << "  objective: " << objective_name(f.objective) << '\n';
    os << "  data_unit: " << unit_name(f.unit) << '\n';
    os << "  max_evaluations: " << f.max_evaluations << '\n';
    os << "  seed: " << f.seed << '\n';
    os << "  parameters:\n";
    for (const auto& p : f.parameters) {
      os << "    - path: " << quoted(p.path) << '\n';
      os << "      lower: " << num(p.lower) << '\n';
      os << "      upper: " << num(p.upper) << '\n';
      os << "      log: " << (p.log_scale ? "true" : "false") << '\n';
    }
  }
  return os.str();
}

}  // namespace capsim

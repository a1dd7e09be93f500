#include "semdot/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace semdot {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw ConfigError(msg.str());
}

double to_double(const std::string& origin, int line, const std::string& key,
                 const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(origin, line, "invalid number for '" + key + "': " + value);
  }
}

int to_int(const std::string& origin, int line, const std::string& key,
           const std::string& value) {
  try {
    size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(origin, line, "invalid integer for '" + key + "': " + value);
  }
}

bool to_bool(const std::string& origin, int line, const std::string& key,
             const std::string& value) {
  if (value == "true" || value == "True" || value == "on" || value == "1") return true;
  if (value == "false" || value == "False" || value == "off" || value == "0") return false;
  fail(origin, line, "invalid boolean for '" + key + "': " + value);
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                        (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  return v;
}

}  // namespace

void RunConfig::validate() const {
  if (!preset.empty()) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), preset) == names.end())
      throw ConfigError("config: unknown preset '" + preset + "'");
  }
  if (nx < 0 || ny < 0) throw ConfigError("config: nx/ny must be non-negative");
  if (volfrac >= 0.0 && (volfrac <= 0.0 || volfrac >= 1.0))
    throw ConfigError("config: volfrac must be in (0, 1)");
  if (rmin < 1.0) throw ConfigError("config: rmin must be >= 1");
  if (upsilon < 1.0) throw ConfigError("config: upsilon must be >= 1");
  if (grid < 2) throw ConfigError("config: grid must be >= 2");
  if (beta0 <= 0.0) throw ConfigError("config: beta0 must be positive");
  if (lambda < 0.0) throw ConfigError("config: lambda must be >= 0");
  if (penalty < 1.0) throw ConfigError("config: penalty must be >= 1");
  if (rho_min <= 0.0 || rho_min >= 1.0) throw ConfigError("config: rho_min must be in (0, 1)");
  if (young <= 0.0) throw ConfigError("config: young must be positive");
  if (poisson <= 0.0 || poisson >= 0.5) throw ConfigError("config: poisson must be in (0, 0.5)");
  if (tau <= 0.0) throw ConfigError("config: tau must be positive");
  if (epsilon <= 0.0) throw ConfigError("config: epsilon must be positive");
  if (max_iter < 1) throw ConfigError("config: max_iter must be >= 1");
  if (min_iter < 0) throw ConfigError("config: min_iter must be >= 0");
  if (mode != "step" && mode != "smooth")
    throw ConfigError("config: mode must be 'step' or 'smooth'");
  if (optimizer != "mma" && optimizer != "oc" && optimizer != "simp-d")
    throw ConfigError("config: optimizer must be 'mma', 'oc' or 'simp-d'");
}

ProblemDefinition RunConfig::problem() const {
  if (preset.empty()) throw ConfigError("config: no preset selected");
  ProblemDefinition p = preset_problem(preset, nx, ny);
  if (volfrac > 0.0) p.vstar = volfrac;
  p.validate();
  return p;
}

RunParams RunConfig::params() const {
  RunParams rp;
  rp.rmin = rmin;
  rp.upsilon = upsilon;
  rp.grid_n = grid;
  rp.beta0 = beta0;
  rp.lambda = lambda;
  // The baseline uses the classic penalty of 3 unless overridden.
  rp.penalty = (optimizer == "simp-d" && penalty == 1.5) ? 3.0 : penalty;
  rp.rho_min = rho_min;
  rp.young = young;
  rp.poisson = poisson;
  rp.tau = tau;
  rp.epsilon = epsilon;
  rp.max_iter = max_iter;
  rp.min_iter = min_iter;
  rp.mode = mode == "step" ? ProjectionMode::step : ProjectionMode::smooth;
  rp.optimizer = optimizer == "oc"
                     ? OptimizerChoice::oc
                     : (optimizer == "simp-d" ? OptimizerChoice::simp_d : OptimizerChoice::mma);
  rp.symmetry = symmetry;
  return rp;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream stream(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) fail(origin, lineno, "expected key = value");

    if (key == "preset") cfg.preset = value;
    else if (key == "nx") cfg.nx = to_int(origin, lineno, key, value);
    else if (key == "ny") cfg.ny = to_int(origin, lineno, key, value);
    else if (key == "volfrac") cfg.volfrac = to_double(origin, lineno, key, value);
    else if (key == "rmin") cfg.rmin = to_double(origin, lineno, key, value);
    else if (key == "upsilon") cfg.upsilon = to_double(origin, lineno, key, value);
    else if (key == "grid") cfg.grid = to_int(origin, lineno, key, value);
    else if (key == "beta0") cfg.beta0 = to_double(origin, lineno, key, value);
    else if (key == "lambda") cfg.lambda = to_double(origin, lineno, key, value);
    else if (key == "penalty") cfg.penalty = to_double(origin, lineno, key, value);
    else if (key == "rho_min") cfg.rho_min = to_double(origin, lineno, key, value);
    else if (key == "young") cfg.young = to_double(origin, lineno, key, value);
    else if (key == "poisson") cfg.poisson = to_double(origin, lineno, key, value);
    else if (key == "tau") cfg.tau = to_double(origin, lineno, key, value);
    else if (key == "epsilon") cfg.epsilon = to_double(origin, lineno, key, value);
    else if (key == "max_iter") cfg.max_iter = to_int(origin, lineno, key, value);
    else if (key == "min_iter") cfg.min_iter = to_int(origin, lineno, key, value);
    else if (key == "mode") cfg.mode = value;
    else if (key == "optimizer") cfg.optimizer = value;
    else if (key == "symmetry") cfg.symmetry = to_bool(origin, lineno, key, value);
    else if (key == "out") cfg.out_dir = value;
    else fail(origin, lineno, "unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace semdot

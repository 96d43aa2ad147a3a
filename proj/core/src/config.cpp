#include "pharmonic/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace pharmonic {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  if (used != value.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + value + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError(key, "expected true/false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list");
  return out;
}

bool known_sweep_axis(const std::string& axis) {
  static const char* axes[] = {"alpha0",   "p",        "n",
                               "source.m", "source.a", "source.c2",
                               "target.m", "target.a", "target.c2"};
  for (const char* a : axes)
    if (axis == a) return true;
  return false;
}

StartOverride& ensure_start(RunConfig& cfg) {
  if (!cfg.start) cfg.start = StartOverride{};
  return *cfg.start;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "n") cfg.n = parse_int(key, value);
  else if (key == "p") cfg.p = parse_double(key, value);
  else if (key == "alpha0") cfg.alpha0 = parse_double(key, value);
  else if (key == "rmax") cfg.rmax = parse_double(key, value);
  else if (key == "tol") cfg.tol = parse_double(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "jobs") cfg.jobs = parse_int(key, value);
  else if (key == "source") cfg.source = value;
  else if (key == "target") cfg.target = value;
  else if (key == "start.r") ensure_start(cfg).r = parse_double(key, value);
  else if (key == "start.alpha") ensure_start(cfg).alpha = parse_double(key, value);
  else if (key == "start.alpha_prime") ensure_start(cfg).alpha_prime = parse_double(key, value);
  else if (key.rfind("sweep.", 0) == 0) {
    const std::string axis = key.substr(6);
    if (!known_sweep_axis(axis)) throw ConfigError(key, "unknown sweep axis");
    cfg.sweep[axis] = parse_list(key, value);
  } else if (key == "verify.monotonicity") cfg.verify.monotonicity = parse_bool(key, value);
  else if (key == "verify.energy_slope") cfg.verify.energy_slope = parse_bool(key, value);
  else if (key == "verify.cone") cfg.verify.cone = parse_bool(key, value);
  else if (key == "verify.energy_floor") cfg.verify.energy_floor = parse_bool(key, value);
  else if (key == "verify.vanishing") cfg.verify.vanishing = parse_bool(key, value);
  else if (key == "verify.barrier") cfg.verify.barrier = parse_bool(key, value);
  else if (key == "verify.window_lo") cfg.verify.window_lo = parse_double(key, value);
  else if (key == "verify.window_hi") cfg.verify.window_hi = parse_double(key, value);
  else if (key == "verify.a") cfg.verify.a = parse_double(key, value);
  else if (key == "verify.b") cfg.verify.b = parse_double(key, value);
  else if (key == "verify.C2") cfg.verify.C2 = parse_double(key, value);
  else if (key == "verify.C") cfg.verify.C = parse_double(key, value);
  else if (key == "verify.cone_c") cfg.verify.cone_c = parse_double(key, value);
  else if (key == "verify.profile") cfg.verify.profile_path = value;
  else throw ConfigError(key, "unknown key");
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

void validate_config(const RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("n", "dimension must be at least 2");
  if (!(cfg.p >= 2.0)) throw ConfigError("p", "exponent must be at least 2");
  if (!(cfg.rmax > 0.0)) throw ConfigError("rmax", "must be positive");
  if (!(cfg.tol > 0.0) || cfg.tol > 1e-2)
    throw ConfigError("tol", "must lie in (0, 1e-2]");
  if (cfg.jobs < 1) throw ConfigError("jobs", "must be at least 1");
  if (cfg.alpha0 && !(*cfg.alpha0 > 0.0))
    throw ConfigError("alpha0", "must be positive");
  if (cfg.start) {
    if (!(cfg.start->r > 0.0)) throw ConfigError("start.r", "must be positive");
    if (!(cfg.start->r < cfg.rmax))
      throw ConfigError("start.r", "must be below rmax");
  }
  try {
    parse_warp(cfg.source);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("source", e.what());
  }
  try {
    parse_warp(cfg.target);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("target", e.what());
  }
}

ProblemSpec build_spec(const RunConfig& cfg) {
  validate_config(cfg);
  return ProblemSpec(cfg.n, cfg.p, parse_warp(cfg.source), parse_warp(cfg.target));
}

void validate_for_solve(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.alpha0.has_value() == cfg.start.has_value())
    throw ConfigError(cfg.alpha0 ? "start.r" : "alpha0",
                      "exactly one of alpha0 or start.* must be given");
  if (cfg.alpha0) {
    const ProblemSpec spec = build_spec(cfg);
    if (!spec.startup_admissible())
      throw ConfigError("alpha0",
                        "warp family does not admit the origin startup; "
                        "give interior start.* data instead");
  }
}

}  // namespace pharmonic

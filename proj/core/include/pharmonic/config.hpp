#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pharmonic/problem.hpp"

namespace pharmonic {

// Configuration failure that names the offending key.
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string key_, const std::string& what_)
      : std::runtime_error("config key '" + key_ + "': " + what_),
        key(std::move(key_)) {}
};

struct StartOverride {
  double r = 1.0;
  double alpha = 0.0;
  double alpha_prime = 0.0;
};

struct VerifySettings {
  bool monotonicity = true;
  bool energy_slope = true;
  bool cone = true;
  bool energy_floor = true;
  bool vanishing = true;
  bool barrier = true;
  std::optional<double> window_lo, window_hi;  // energy-slope window
  std::optional<double> a, b;                  // energy-slope derivative bounds
  std::optional<double> C2, C;                 // energy-floor constants
  std::optional<double> cone_c;
  std::optional<std::string> profile_path;  // analyze an existing profile csv
};

// One run (or sweep base point).  Warp strings use the flag syntax:
// "euclidean", "hyperbolic", "power:m=2", "exp:a=1.5", "perturbed:c2=-0.5".
struct RunConfig {
  int n = 3;
  double p = 3.0;
  std::string source = "hyperbolic";
  std::string target = "hyperbolic";
  std::optional<double> alpha0;
  std::optional<StartOverride> start;
  double rmax = 30.0;
  double tol = 1e-10;
  std::string out = "out";
  int jobs = 1;
  // Sweep axes: "alpha0", "p", "n", "source.m", "source.a", "source.c2",
  // and the target.* counterparts.
  std::map<std::string, std::vector<double>> sweep;
  VerifySettings verify;
};

// Line-oriented "key = value" format, '#' comments, blank lines ignored.
RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

// Applies one key/value pair (config file line or CLI flag).  Throws
// ConfigError naming the key on any unknown key or malformed value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Cross-field validation shared by all subcommands.
void validate_config(const RunConfig& cfg);

// Resolves the warp strings into a ProblemSpec.
ProblemSpec build_spec(const RunConfig& cfg);

// Additional requirements for a single solve: exactly one of alpha0/start,
// and startup-admissible warps when starting from the origin.
void validate_for_solve(const RunConfig& cfg);

}  // namespace pharmonic

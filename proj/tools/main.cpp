#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pharmonic/pharmonic.hpp"

namespace {

// All values are kept as raw strings and pushed through apply_setting so
// that flag errors are reported with the same key names as config files.
struct CommonFlags {
  std::string config, out, rmax, tol, alpha0, n, p, source, target, jobs;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "configuration file (key = value lines)");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--rmax", rmax, "integration endpoint");
    cmd->add_option("--tol", tol, "local error tolerance");
    cmd->add_option("--alpha0", alpha0, "origin slope of the startup solution");
    cmd->add_option("--n", n, "source dimension");
    cmd->add_option("--p", p, "energy exponent");
    cmd->add_option("--source", source, "source warp, e.g. hyperbolic or power:m=2");
    cmd->add_option("--target", target, "target warp");
    cmd->add_option("--jobs", jobs, "sweep worker count");
    cmd->add_option("--set", sets, "extra key=value setting (start.*, sweep.*, verify.*)");
  }

  pharmonic::RunConfig resolve() const {
    pharmonic::RunConfig cfg;
    if (!config.empty()) cfg = pharmonic::parse_config_file(config);
    auto apply = [&](const char* key, const std::string& value) {
      if (!value.empty()) pharmonic::apply_setting(cfg, key, value);
    };
    apply("out", out);
    apply("rmax", rmax);
    apply("tol", tol);
    apply("alpha0", alpha0);
    apply("n", n);
    apply("p", p);
    apply("source", source);
    apply("target", target);
    apply("jobs", jobs);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw pharmonic::ConfigError(kv, "expected key=value");
      pharmonic::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial p-harmonic map profiles between model manifolds"};
  app.require_subcommand(1);

  CommonFlags fs, fw, fv;
  CLI::App* solve = app.add_subcommand("solve", "solve one profile and classify its regime");
  fs.attach(solve);
  CLI::App* sweep = app.add_subcommand("sweep", "sweep parameters into a phase table");
  fw.attach(sweep);
  CLI::App* verify = app.add_subcommand("verify", "run structural checks on a profile");
  fv.attach(verify);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return pharmonic::run_solve(fs.resolve(), std::cout);
    if (sweep->parsed()) return pharmonic::run_sweep(fw.resolve(), std::cout);
    if (verify->parsed()) return pharmonic::run_verify(fv.resolve(), std::cout);
  } catch (const pharmonic::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pharmonic::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

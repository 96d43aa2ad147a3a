#include "pharmonic/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pharmonic/analysis.hpp"
#include "pharmonic/integrator.hpp"
#include "pharmonic/ode.hpp"

namespace pharmonic {
namespace {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

njson spec_json(const ProblemSpec& spec) {
  njson j;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["source"] = spec.f.display();
  j["target"] = spec.g.display();
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string sanitize_note(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ';';
  return s;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct SolveArtifacts {
  SolutionProfile profile;
  njson solution;
  RegimeReport report;
};

// Shared by run_solve and run_verify: produce the profile and its report.
SolveArtifacts perform_solve(const RunConfig& cfg) {
  const ProblemSpec spec = build_spec(cfg);
  SolveOptions opts;
  opts.integrate.tol = cfg.tol;

  SolveArtifacts art{SolutionProfile(spec), njson{}, RegimeReport{}};
  njson& sol = art.solution;
  sol["spec"] = spec_json(spec);

  if (cfg.alpha0) {
    SolveResult res = solve_full(spec, *cfg.alpha0, cfg.rmax, opts);
    art.profile = std::move(res.profile);
    sol["alpha0"] = *cfg.alpha0;
    sol["start"] = nullptr;
    njson su;
    su["epsilon"] = res.startup.epsilon;
    su["phi0"] = res.startup.phi0;
    su["z_prime0"] = res.startup.z_prime0;
    su["alpha_pp0"] = res.startup.alpha_pp0;
    su["iterations"] = res.startup.iterations;
    su["epsilon_halvings"] = res.startup.epsilon_halvings;
    su["worst_residual"] = res.startup.worst_residual;
    sol["startup"] = su;
  } else {
    const StatePoint start{cfg.start->r, cfg.start->alpha, cfg.start->alpha_prime};
    art.profile = solve_interior(spec, start, cfg.rmax, opts);
    sol["alpha0"] = nullptr;
    njson st;
    st["r"] = start.r;
    st["alpha"] = start.alpha;
    st["alpha_prime"] = start.alpha_prime;
    sol["start"] = st;
    sol["startup"] = nullptr;  // origin data undefined for interior starts
  }

  sol["rmax"] = cfg.rmax;
  sol["tol"] = cfg.tol;
  sol["handoff_r"] = art.profile.handoff_r;
  njson term;
  term["kind"] = to_string(art.profile.termination.kind);
  term["r"] = art.profile.termination.r;
  sol["termination"] = term;
  njson stats;
  stats["accepted"] = art.profile.stats.accepted;
  stats["rejected"] = art.profile.stats.rejected;
  stats["min_step"] = finite_or_zero(art.profile.stats.min_step);
  stats["nodes"] = art.profile.size();
  sol["stats"] = stats;

  try {
    art.report = classify_regime(art.profile);
  } catch (const AnalysisError& e) {
    art.report.regime = {RegimeKind::Undetermined, 0.0};
    art.report.notes = std::string("classification unavailable: ") + e.what();
  }
  return art;
}

}  // namespace

int run_solve(const RunConfig& cfg, std::ostream& log) {
  validate_for_solve(cfg);
  SolveArtifacts art{SolutionProfile(build_spec(cfg)), njson{}, RegimeReport{}};
  try {
    art = perform_solve(cfg);
  } catch (const NonContractionError& e) {
    log << "solve failed: " << e.what() << "\n";
    return exit_solver;
  } catch (const MonotonicityError& e) {
    log << "solve failed: " << e.what() << "\n";
    return exit_solver;
  } catch (const std::runtime_error& e) {
    log << "solve failed: " << e.what() << "\n";
    return exit_solver;
  }

  fs::create_directories(cfg.out);
  {
    std::ofstream csv(fs::path(cfg.out) / "profile.csv", std::ios::binary);
    write_profile_csv(art.profile, csv);
  }
  write_text(fs::path(cfg.out) / "solution.json", art.solution.dump(2) + "\n");
  write_text(fs::path(cfg.out) / "report.json", art.report.to_json() + "\n");

  log << "solved " << art.profile.spec.f.display() << " -> "
      << art.profile.spec.g.display() << " (n=" << cfg.n << ", p=" << fmtg(cfg.p)
      << "): " << to_string(art.report.regime) << ", "
      << to_string(art.profile.termination.kind) << " at r = "
      << fmtg(art.profile.termination.r) << ", " << art.profile.size()
      << " nodes\n";
  return exit_ok;
}

namespace {

struct SweepPoint {
  RunConfig cfg;      // resolved single-run config (no sweep axes)
  double n, p, alpha0;
};

// Applies one axis value to the point config.  Warp parameter axes require
// the matching family on the base warp.
void apply_axis(RunConfig& cfg, const std::string& axis, double value) {
  const std::string key = "sweep." + axis;
  if (axis == "n") {
    if (value != std::floor(value)) throw ConfigError(key, "n values must be integers");
    cfg.n = static_cast<int>(value);
  } else if (axis == "p") {
    cfg.p = value;
  } else if (axis == "alpha0") {
    cfg.alpha0 = value;
  } else {
    const bool on_source = axis.rfind("source.", 0) == 0;
    std::string& warp = on_source ? cfg.source : cfg.target;
    WarpProfile base;
    try {
      base = parse_warp(warp);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
    const char* expect = nullptr;
    switch (base.kind) {
      case WarpKind::Power: expect = "m"; break;
      case WarpKind::ExpGrowth: expect = "a"; break;
      case WarpKind::Perturbed: expect = "c2"; break;
      default: break;
    }
    const std::string pname = axis.substr(axis.find('.') + 1);
    if (!expect || pname != expect)
      throw ConfigError(key, "warp '" + warp + "' has no parameter '" + pname + "'");
    warp = base.name() + ":" + pname + "=" + fmt17(value);
  }
}

struct SweepRow {
  std::string text;
};

}  // namespace

int run_sweep(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  if (cfg.sweep.empty()) throw ConfigError("sweep", "no sweep axes given");

  // Fixed axis order keeps rows lexicographic in (n, p, alpha0, params).
  static const char* axis_order[] = {"n",        "p",        "alpha0",
                                     "source.m", "source.a", "source.c2",
                                     "target.m", "target.a", "target.c2"};
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const char* name : axis_order) {
    auto it = cfg.sweep.find(name);
    if (it == cfg.sweep.end()) continue;
    auto values = it->second;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    axes.emplace_back(name, std::move(values));
  }
  for (const auto& [name, values] : cfg.sweep)
    if (std::find_if(axes.begin(), axes.end(),
                     [&](const auto& a) { return a.first == name; }) == axes.end())
      throw ConfigError("sweep." + name, "unknown sweep axis");

  std::vector<RunConfig> points;
  {
    RunConfig base = cfg;
    base.sweep.clear();
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      RunConfig pt = base;
      for (std::size_t k = 0; k < axes.size(); ++k)
        apply_axis(pt, axes[k].first, axes[k].second[idx[k]]);
      points.push_back(std::move(pt));
      std::size_t k = axes.size();
      while (k > 0) {
        --k;
        if (++idx[k] < axes[k].second.size()) break;
        idx[k] = 0;
        if (k == 0) {
          k = SIZE_MAX;
          break;
        }
      }
      if (k == SIZE_MAX || axes.empty()) break;
    }
  }

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> cursor{0};
  std::atomic<long> failures{0};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      const RunConfig& pt = points[i];
      std::string regime = "Undetermined", exponent, termination, note;
      try {
        validate_for_solve(pt);
        const ProblemSpec spec = build_spec(pt);
        SolveOptions opts;
        opts.integrate.tol = pt.tol;
        SolutionProfile prof =
            pt.alpha0 ? solve(spec, *pt.alpha0, pt.rmax, opts)
                      : solve_interior(spec,
                                       {pt.start->r, pt.start->alpha,
                                        pt.start->alpha_prime},
                                       pt.rmax, opts);
        termination = to_string(prof.termination.kind);
        const RegimeReport rep = classify_regime(prof);
        regime = to_string(rep.regime.kind);
        switch (rep.regime.kind) {
          case RegimeKind::LinearGrowth:
          case RegimeKind::ExponentialGrowth:
          case RegimeKind::PowerSlopeDecay:
            exponent = fmt17(rep.regime.param);
            break;
          default: break;
        }
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        note = sanitize_note(e.what());
        if (termination.empty()) termination = "error";
      }
      const double a0 = pt.alpha0 ? *pt.alpha0 : std::numeric_limits<double>::quiet_NaN();
      auto display = [](const std::string& text) {
        try {
          return parse_warp(text).display();
        } catch (const std::exception&) {
          return text;  // row for a point whose warp failed validation
        }
      };
      std::ostringstream row;
      row << pt.n << ',' << fmt17(pt.p) << ',' << fmt17(a0) << ','
          << sanitize_note(display(pt.source)) << ','
          << sanitize_note(display(pt.target)) << ',' << regime << ','
          << exponent << ',' << termination << ',' << note << '\n';
      rows[i].text = row.str();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(cfg.jobs, 1), points.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  fs::create_directories(cfg.out);
  {
    std::ofstream csv(fs::path(cfg.out) / "phase.csv", std::ios::binary);
    csv << "n,p,alpha0,source,target,regime,exponent,termination,note\n";
    for (const auto& row : rows) csv << row.text;
  }
  log << "sweep: " << points.size() << " points, " << failures.load()
      << " failed, " << workers << " workers\n";
  return exit_ok;
}

namespace {

struct VerifyEntry {
  std::string name;
  bool pass = false;
  bool skipped = false;
  double margin = 0.0;
  double at_r = 0.0;
  std::string note;
};

VerifyEntry from_check(const CheckResult& c) {
  return {c.name, c.pass, false, finite_or_zero(c.margin), c.at_r, c.note};
}

VerifyEntry skipped(std::string name, std::string why) {
  return {std::move(name), false, true, 0.0, 0.0, std::move(why)};
}

}  // namespace

int run_verify(const RunConfig& cfg, std::ostream& log) {
  const ProblemSpec spec = build_spec(cfg);

  SolutionProfile profile(spec);
  if (cfg.verify.profile_path) {
    std::ifstream in(*cfg.verify.profile_path, std::ios::binary);
    if (!in)
      throw ConfigError("verify.profile",
                        "cannot open '" + *cfg.verify.profile_path + "'");
    profile = read_profile_csv(spec, in);
  } else {
    validate_for_solve(cfg);
    SolveOptions opts;
    opts.integrate.tol = cfg.tol;
    try {
      profile = cfg.alpha0
                    ? solve(spec, *cfg.alpha0, cfg.rmax, opts)
                    : solve_interior(spec,
                                     {cfg.start->r, cfg.start->alpha,
                                      cfg.start->alpha_prime},
                                     cfg.rmax, opts);
    } catch (const std::runtime_error& e) {
      log << "verify solve failed: " << e.what() << "\n";
      return exit_solver;
    }
  }

  std::vector<VerifyEntry> entries;
  const auto& vs = cfg.verify;

  if (vs.monotonicity) entries.push_back(from_check(check_monotonicity(profile)));

  if (vs.energy_slope) {
    const double lo = vs.window_lo.value_or(std::max(1.0, profile.r.front()));
    const double hi = vs.window_hi.value_or(std::min(10.0, profile.r_last()));
    if (!(hi > lo)) {
      entries.push_back(skipped("energy_slope_bounds", "window empty for this run"));
    } else {
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.r[i] < lo || profile.r[i] > hi) continue;
        a = std::max(a, std::abs(spec.f.deriv(profile.r[i])));
        b = std::max(b, std::abs(spec.g.deriv(profile.alpha[i])));
      }
      a = vs.a.value_or(a * 1.0001);
      b = vs.b.value_or(b * 1.0001);
      try {
        entries.push_back(from_check(check_energy_slope_bounds(profile, a, b, lo, hi)));
      } catch (const AnalysisError& e) {
        entries.push_back(skipped("energy_slope_bounds", e.what()));
      }
    }
  }

  if (vs.cone) {
    try {
      double c = 0.0;
      if (vs.cone_c) {
        c = *vs.cone_c;
      } else if (profile.size() > 0) {
        const double r0 = profile.r.front();
        c = 1.25 * std::max(profile.alpha.front() / r0, profile.alpha_prime.front());
      }
      entries.push_back(from_check(check_cone_bound(profile, c)));
      entries.push_back(
          from_check(check_cone_separation(profile, {0.6 * c, 0.8 * c, c})));
    } catch (const WrongFamilyError& e) {
      entries.push_back(skipped("cone_bound", e.what()));
    }
  }

  if (vs.energy_floor) {
    const auto env = spec.f.envelope();
    if (!env && !vs.C) {
      entries.push_back(
          skipped("energy_floor", "source warp has no exponential envelope"));
    } else {
      double C2 = 0.0;
      if (vs.C2) {
        C2 = *vs.C2;
      } else {
        for (std::size_t i = 0; i < profile.size(); ++i)
          if (profile.alpha[i] >= 1.0)
            C2 = std::max(C2, spec.g.deriv(profile.alpha[i]) /
                                  spec.g.eval(profile.alpha[i]));
        C2 *= 1.001;
      }
      try {
        if (!(C2 > 0.0))
          throw NotApplicableError("alpha never reaches 1");
        entries.push_back(from_check(
            check_energy_floor(profile, C2, vs.C.value_or(env ? env->C : 0.0))));
      } catch (const AnalysisError& e) {
        entries.push_back(skipped("energy_floor", e.what()));
      }
    }
  }

  if (vs.vanishing) {
    try {
      const VanishingOrder vo = vanishing_order(profile);
      VerifyEntry e{"vanishing_order", !vo.flagged, false,
                    2.0 * spec.n - 1.0 - vo.k, profile.r.front(),
                    "k = " + std::to_string(vo.k)};
      entries.push_back(e);
    } catch (const AnalysisError& e) {
      entries.push_back(skipped("vanishing_order", e.what()));
    }
  }

  if (vs.barrier) {
    try {
      entries.push_back(from_check(check_barrier_invariance(profile)));
      entries.push_back(from_check(check_no_recrossing(profile)));
    } catch (const WrongFamilyError& e) {
      entries.push_back(skipped("barrier_invariance", e.what()));
    }
  }

  bool all_pass = true;
  njson out;
  out["spec"] = spec_json(spec);
  out["checks"] = njson::array();
  for (const auto& e : entries) {
    njson je;
    je["name"] = e.name;
    je["status"] = e.skipped ? "skipped" : (e.pass ? "pass" : "fail");
    je["margin"] = e.margin;
    je["at_r"] = e.at_r;
    je["note"] = e.note;
    out["checks"].push_back(je);
    if (!e.skipped && !e.pass) all_pass = false;
    log << "  [" << (e.skipped ? "SKIP" : (e.pass ? "PASS" : "FAIL")) << "] "
        << e.name << (e.note.empty() ? "" : " (" + e.note + ")") << "\n";
  }
  out["all_pass"] = all_pass;

  fs::create_directories(cfg.out);
  write_text(fs::path(cfg.out) / "verify.json", out.dump(2) + "\n");
  return all_pass ? exit_ok : exit_verify;
}

}  // namespace pharmonic

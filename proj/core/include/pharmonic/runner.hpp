#pragma once

#include <iosfwd>

#include "pharmonic/config.hpp"

namespace pharmonic {

// Exit codes shared by the library entry points and the command line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_solver = 3;
inline constexpr int exit_verify = 4;

// Solves one profile and writes profile.csv, solution.json and report.json
// into cfg.out.  Termination events are reported in the artifacts and still
// count as success; solver failures return exit_solver.
int run_solve(const RunConfig& cfg, std::ostream& log);

// Expands the sweep axes over the base config in lexicographic order and
// writes phase.csv.  Individual failed points degrade to Undetermined rows
// with a note; the sweep itself still succeeds.  Points are distributed
// over cfg.jobs workers; the output is assembled in point order, so the
// artifact does not depend on scheduling.
int run_sweep(const RunConfig& cfg, std::ostream& log);

// Runs the toggled verification checks against a fresh solve (or a profile
// csv named by verify.profile) and writes verify.json.  Returns exit_verify
// when any applicable check fails.
int run_verify(const RunConfig& cfg, std::ostream& log);

}  // namespace pharmonic

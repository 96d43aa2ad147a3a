#pragma once

#include <stdexcept>

#include "pharmonic/local_solver.hpp"
#include "pharmonic/profile.hpp"

namespace pharmonic {

struct IntegrateOptions {
  double tol = 1e-10;          // relative error target per step
  double blowup_cap = 1e12;    // |alpha'| above this ends with DerivativeBlowUp
  double theta_min = 1e-300;   // theta below this ends with EnergyDegenerate
  double hmin_rel = 1e-14;     // step below hmin_rel * r ends with StepUnderflow
  int log_nodes_per_decade = 48;
  int tail_nodes = 160;        // extra uniform nodes on [r_max/2, r_max]
  double safety = 0.9;
  double min_shrink = 0.2;
  double max_growth = 5.0;
};

// Raised when an accepted step produces alpha' <= 0.  Startup solutions are
// strictly increasing, so this indicates an integration failure rather than
// a feature of the solution.
struct MonotonicityError : std::runtime_error {
  double r;
  explicit MonotonicityError(double r_)
      : std::runtime_error("monotonicity lost at r = " + std::to_string(r_)),
        r(r_) {}
};

// Adaptive embedded Runge-Kutta 5(4) continuation of the profile equation
// from an interior state with theta > 0.  Records every accepted step plus a
// deterministic set of forced output nodes (log-spaced across the range and
// uniform over the final factor of two).  Never steps past an event: the
// profile ends at r_max or at the first node triggering an event.
SolutionProfile integrate(const ProblemSpec& spec, const StatePoint& start,
                          double r_max, const IntegrateOptions& opts = {});

struct SolveOptions {
  PicardOptions picard;
  IntegrateOptions integrate;
};

struct SolveResult {
  SolutionProfile profile;
  LocalSolution startup;
};

// Full startup solve: Picard fixed point on (0, epsilon], then continuation
// to r_max.  The profile contains the local grid nodes followed by the
// continuation nodes; handoff_r is the matching radius epsilon.
SolveResult solve_full(const ProblemSpec& spec, double alpha0, double r_max,
                       const SolveOptions& opts = {});

SolutionProfile solve(const ProblemSpec& spec, double alpha0, double r_max,
                      const SolveOptions& opts = {});

// Continuation only, from explicit interior data.
SolutionProfile solve_interior(const ProblemSpec& spec, const StatePoint& start,
                               double r_max, const SolveOptions& opts = {});

}  // namespace pharmonic

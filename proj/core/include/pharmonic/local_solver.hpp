#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pharmonic/problem.hpp"

namespace pharmonic {

// The singular startup at r = 0 is solved in the blow-up variables
//   z(r) = alpha(r)/r,  v(r) = sqrt(r) z'(r),
// in which the profile equation becomes z'' + (n+1)/r z' = (n-1) Phi/r with
// Phi regular at the origin.  A Picard iteration applies the integral form
// of this equation on a geometric grid over (0, epsilon].
struct PicardOptions {
  double epsilon_hint = 0.05;  // starting epsilon, shrunk automatically
  double tol_fix = 1e-12;      // sup-norm fixed-point stopping tolerance
  int max_iter = 200;
  double tol_res = 1e-7;   // post-hoc finite-difference residual bound
  double eps_min = 1e-10;  // epsilon halving gives up below this
  double grid_ratio = 1.2;
  double grid_span = 1e-6;  // grid reaches down to epsilon * grid_span
  // Starting iterate (z, v) constants; defaults to (alpha0, 0).
  std::optional<std::pair<double, double>> initial_iterate;
};

struct LocalSolution {
  double epsilon = 0.0;
  std::vector<double> grid, z, v;
  double alpha0 = 0.0;
  double phi0 = 0.0;       // Phi at the origin
  double z_prime0 = 0.0;   // z'(0) = (n-1)/(n+1) phi0
  double alpha_pp0 = 0.0;  // alpha''(0) = 2 z'(0)
  int iterations = 0;
  int epsilon_halvings = 0;
  bool converged = false;
  double worst_residual = 0.0;  // measured on nodes >= epsilon/10

  double alpha(std::size_t i) const;
  double alpha_prime(std::size_t i) const;
};

// Thrown when epsilon halving reaches eps_min without producing a converged
// iterate inside the contraction set.
struct NonContractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Right-hand side Phi(s, v, z); s = 0 takes the closed-form limit.  Needs
// startup-admissible warps and z > 0.
double phi(const ProblemSpec& spec, double s, double v, double z);

struct StartupValues {
  double phi0;
  double z_prime0;
  double alpha_pp0;
};

// Origin data of the startup solution with slope alpha0:
//   phi0 = Phi(0, 0, alpha0), z'(0) = (n-1)/(n+1) phi0, alpha''(0) = 2 z'(0).
StartupValues initial_curvature(const ProblemSpec& spec, double alpha0);

// Runs the Picard iteration.  Epsilon starts at min(hint, alpha0^2/8) and is
// halved whenever the iterate escapes the contraction set
// {|z - alpha0| <= alpha0/2, |v| <= 1}, the iteration fails to converge, or
// the converged iterate fails the finite-difference residual bound.
LocalSolution picard_solve(const ProblemSpec& spec, double alpha0,
                           const PicardOptions& opts = {});

}  // namespace pharmonic

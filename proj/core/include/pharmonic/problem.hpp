#pragma once

#include <stdexcept>

#include "pharmonic/warp.hpp"

namespace pharmonic {

// Rotationally symmetric p-harmonic map problem between model manifolds with
// source warp f (dimension n) and target warp g.  The profile alpha(r)
// solves the Euler-Lagrange equation of the p-energy of r -> alpha(r); the
// pointwise energy density is
//   theta = alpha'^2 + (n-1) g(alpha)^2 / f(r)^2,
// and q = p/2 so that the density integrand is theta^q.
struct ProblemSpec {
  int n;
  double p;
  double q;
  WarpProfile f;
  WarpProfile g;

  ProblemSpec(int n_, double p_, WarpProfile f_, WarpProfile g_)
      : n(n_), p(p_), q(p_ / 2.0), f(f_), g(g_) {
    if (n < 2) throw std::invalid_argument("dimension n must be at least 2");
    if (!(p >= 2.0)) throw std::invalid_argument("exponent p must be at least 2");
  }

  // p = 2 makes the density weight theta^{q-1} identically 1.
  bool harmonic_case() const { return p == 2.0; }

  bool startup_admissible() const {
    return f.startup_admissible() && g.startup_admissible();
  }
};

struct StatePoint {
  double r;
  double alpha;
  double alpha_prime;
};

}  // namespace pharmonic

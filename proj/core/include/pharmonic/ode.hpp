#pragma once

#include <stdexcept>

#include "pharmonic/problem.hpp"
#include "pharmonic/profile.hpp"

namespace pharmonic {

// Raised when the energy density degenerates (theta below floor) or the
// denominator of the explicit second derivative vanishes, so the equation
// cannot be solved for alpha''.
struct DegenerateStateError : std::domain_error {
  using std::domain_error::domain_error;
};

inline constexpr double theta_floor = 1e-300;

double energy_density(const ProblemSpec& spec, const StatePoint& s);

// Solves the profile equation for alpha'' at an interior point r > 0:
//   theta^{q-1} alpha''
//     + [(n-1) theta^{q-1} f'/f + (theta^{q-1})'] alpha'
//     - (n-1) theta^{q-1} g(alpha) g'(alpha) / f^2 = 0.
// The chain rule turns (theta^{q-1})' alpha'' into part of the linear-in-
// alpha'' structure; the solved form divides by
//   D = (p-1) alpha'^2 + (n-1) g^2/f^2,
// which is theta-positive for nontrivial states.  Throws
// DegenerateStateError when theta < floor or D <= 0.
double second_derivative(const ProblemSpec& spec, const StatePoint& s);

// Left-hand side of the profile equation at the given state with the given
// alpha'' plugged in.  Affine in alpha_pp; residual(s, second_derivative(s))
// is zero up to roundoff.
double residual(const ProblemSpec& spec, const StatePoint& s, double alpha_pp);

// p-energy of the profile over [r0, r1] c [first node, last node]:
//   integral of theta^{p/2} f(r)^{n-1} dr
// with alpha interpolated by piecewise cubic Hermite between nodes and
// adaptive Simpson quadrature per cell.  Throws std::out_of_range when the
// interval leaves the sampled range.
double p_energy(const ProblemSpec& spec, const SolutionProfile& profile,
                double r0, double r1);

}  // namespace pharmonic

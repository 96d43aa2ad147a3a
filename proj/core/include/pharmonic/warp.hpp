#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pharmonic {

// Radial warp function of a rotationally symmetric model manifold.
// All kinds satisfy w(0) = 0 and w > 0 on (0, inf).  Kinds with w'(0) = 1
// and a finite quadratic Taylor coefficient admit the singular startup at
// the origin; Power with m > 1 does not (its first derivative vanishes).
enum class WarpKind { Euclidean, Hyperbolic, Power, ExpGrowth, Perturbed };

// Two-sided exponential envelope e^{ar}/C <= w(r) <= C e^{ar} (and the same
// for w') valid on r >= 1.  Available for the exponentially growing kinds.
struct ExponentialEnvelope {
  double a;
  double C;
};

struct WarpProfile {
  WarpKind kind = WarpKind::Euclidean;
  double m = 1.0;   // Power exponent, m >= 1
  double a = 1.0;   // ExpGrowth rate, a > 0
  double c2 = 0.0;  // Perturbed quadratic coefficient

  double eval(double r) const;
  double deriv(double r) const;

  // Coefficient of r^2 in the expansion w(r) = r + c2 r^2 + O(r^3).
  // Meaningful only when startup_admissible().
  double taylor_c2() const;

  bool startup_admissible() const;
  std::optional<ExponentialEnvelope> envelope() const;

  std::string name() const;     // family name, e.g. "power"
  std::string display() const;  // family plus parameters, e.g. "power(m=2)"
};

// Constructs a profile, validating the kind-specific parameter:
// m for Power (m >= 1), a for ExpGrowth (a > 0), c2 for Perturbed
// (1 + 2 c2 (3t^3 - 5t^2 + t + 1) must stay positive on the blend, which
// holds for |c2| <= 0.5).  The parameter is ignored for the other kinds.
WarpProfile make_profile(WarpKind kind, double param = 0.0);

// Parses "euclidean", "hyperbolic", "power:m=2", "exp:a=1.5",
// "perturbed:c2=-0.5".  Throws std::invalid_argument on anything else.
WarpProfile parse_warp(const std::string& text);

struct WarpCheck {
  std::string name;
  bool pass = false;
  double worst_error = 0.0;
  double worst_r = 0.0;
  std::string note;
};

struct WarpValidation {
  std::vector<WarpCheck> checks;
  bool all_pass() const;
};

// Numerical sanity checks on a profile: positivity away from 0, finite
// difference consistency of deriv with eval, origin behaviour, and a
// Richardson extrapolation of (w(r) - r)/r^2 against taylor_c2 for the
// startup-admissible kinds.
WarpValidation validate(const WarpProfile& w, const std::vector<double>& r_samples);

}  // namespace pharmonic

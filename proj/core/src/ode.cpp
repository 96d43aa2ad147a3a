#include "pharmonic/ode.hpp"

#include <cmath>

namespace pharmonic {
namespace {

struct Locals {
  double fr, fp, ga, gp, w;  // f(r), f'(r), g(alpha), g'(alpha), g^2/f^2
};

Locals eval_locals(const ProblemSpec& spec, const StatePoint& s) {
  Locals l;
  l.fr = spec.f.eval(s.r);
  l.fp = spec.f.deriv(s.r);
  l.ga = spec.g.eval(s.alpha);
  l.gp = spec.g.deriv(s.alpha);
  l.w = (l.ga / l.fr) * (l.ga / l.fr);
  return l;
}

}  // namespace

double energy_density(const ProblemSpec& spec, const StatePoint& s) {
  if (s.r < 0.0) throw std::domain_error("energy_density: negative radius");
  if (s.r == 0.0) {
    // Startup limit: g(alpha)/f(r) -> alpha'(0) for slope-1 warps.
    if (s.alpha != 0.0)
      throw std::domain_error("energy_density: r = 0 requires alpha = 0");
    return spec.n * s.alpha_prime * s.alpha_prime;
  }
  const Locals l = eval_locals(spec, s);
  return s.alpha_prime * s.alpha_prime + (spec.n - 1) * l.w;
}

double second_derivative(const ProblemSpec& spec, const StatePoint& s) {
  if (!(s.r > 0.0)) throw std::domain_error("second_derivative: requires r > 0");
  const Locals l = eval_locals(spec, s);
  const double v = s.alpha_prime;
  const double theta = v * v + (spec.n - 1) * l.w;
  if (theta < theta_floor)
    throw DegenerateStateError("second_derivative: energy density degenerate");
  // d/dr of g(alpha)^2 / f(r)^2 along the solution.
  const double wprime =
      2.0 * l.ga * (l.fr * l.gp * v - l.fp * l.ga) / (l.fr * l.fr * l.fr);
  const double denom = (spec.p - 1.0) * v * v + (spec.n - 1) * l.w;
  if (!(denom > 0.0))
    throw DegenerateStateError("second_derivative: degenerate denominator");
  const double num = theta * l.ga * l.gp / (l.fr * l.fr) -
                     theta * (l.fp / l.fr) * v -
                     (spec.q - 1.0) * wprime * v;
  return (spec.n - 1) * num / denom;
}

double residual(const ProblemSpec& spec, const StatePoint& s, double alpha_pp) {
  if (!(s.r > 0.0)) throw std::domain_error("residual: requires r > 0");
  const Locals l = eval_locals(spec, s);
  const double v = s.alpha_prime;
  const double theta = v * v + (spec.n - 1) * l.w;
  if (theta < theta_floor)
    throw DegenerateStateError("residual: energy density degenerate");
  const double Theta = std::pow(theta, spec.q - 1.0);
  const double wprime =
      2.0 * l.ga * (l.fr * l.gp * v - l.fp * l.ga) / (l.fr * l.fr * l.fr);
  const double theta_prime = 2.0 * v * alpha_pp + (spec.n - 1) * wprime;
  const double Theta_prime =
      spec.q == 1.0 ? 0.0
                    : (spec.q - 1.0) * std::pow(theta, spec.q - 2.0) * theta_prime;
  return Theta * alpha_pp +
         ((spec.n - 1) * Theta * l.fp / l.fr + Theta_prime) * v -
         (spec.n - 1) * Theta * l.ga * l.gp / (l.fr * l.fr);
}

namespace {

// Cubic Hermite value and slope on [ra, rb] from endpoint data.
struct Hermite {
  double ra, h, ya, yb, da, db;
  void at(double r, double& y, double& dy) const {
    const double t = (r - ra) / h;
    const double t2 = t * t, t3 = t2 * t;
    y = (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * da +
        (-2 * t3 + 3 * t2) * yb + (t3 - t2) * h * db;
    dy = ((6 * t2 - 6 * t) * ya / h + (3 * t2 - 4 * t + 1) * da +
          (-6 * t2 + 6 * t) * yb / h + (3 * t2 - 2 * t) * db);
  }
};

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate_cell(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 18);
}

}  // namespace

double p_energy(const ProblemSpec& spec, const SolutionProfile& profile,
                double r0, double r1) {
  if (profile.size() < 2) throw std::out_of_range("p_energy: profile too short");
  const double lo = profile.r.front(), hi = profile.r.back();
  const double slack = 1e-12 * (1.0 + std::abs(hi));
  if (r0 < lo - slack || r1 > hi + slack || r1 < r0)
    throw std::out_of_range("p_energy: range outside sampled profile");
  r0 = std::max(r0, lo);
  r1 = std::min(r1, hi);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const double a = profile.r[i], b = profile.r[i + 1];
    if (b <= r0 || a >= r1) continue;
    const Hermite herm{a, b - a, profile.alpha[i], profile.alpha[i + 1],
                       profile.alpha_prime[i], profile.alpha_prime[i + 1]};
    auto integrand = [&](double r) {
      double y, dy;
      herm.at(r, y, dy);
      const double th = energy_density(spec, {r, y, dy});
      return std::pow(th, spec.q) * std::pow(spec.f.eval(r), spec.n - 1);
    };
    const double ca = std::max(a, r0), cb = std::min(b, r1);
    total += integrate_cell(integrand, ca, cb, 1e-12 * (cb - ca + 1.0));
  }
  return total;
}

}  // namespace pharmonic

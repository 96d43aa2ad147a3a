#include "pharmonic/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "pharmonic/ode.hpp"

namespace pharmonic {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Dormand-Prince 5(4) tableau.  The 5th-order weights b5 propagate the
// solution; b4 gives the embedded estimate.  First-same-as-last: the 7th
// stage is the derivative at the accepted point.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4c = 125.0 / 192,
                 b5c = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

struct Vec2 {
  double a, b;
};

std::vector<double> forced_targets(double r0, double r_max,
                                   const IntegrateOptions& opts) {
  std::vector<double> t;
  const double decades = std::log10(r_max / r0);
  const long k_max = static_cast<long>(std::ceil(decades * opts.log_nodes_per_decade));
  for (long k = 1; k <= k_max; ++k)
    t.push_back(r0 * std::pow(10.0, static_cast<double>(k) / opts.log_nodes_per_decade));
  const double tail_lo = 0.5 * r_max;
  if (tail_lo > r0)
    for (int j = 0; j <= opts.tail_nodes; ++j)
      t.push_back(tail_lo + (r_max - tail_lo) * j / opts.tail_nodes);
  t.push_back(r_max);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double x : t) {
    if (x <= r0 * (1.0 + 1e-14) || x > r_max * (1.0 + 1e-14)) continue;
    if (!out.empty() && x <= out.back() * (1.0 + 1e-12)) continue;
    out.push_back(std::min(x, r_max));
  }
  if (out.empty() || out.back() != r_max) out.push_back(r_max);
  return out;
}

}  // namespace

SolutionProfile integrate(const ProblemSpec& spec, const StatePoint& start,
                          double r_max, const IntegrateOptions& opts) {
  if (!(start.r > 0.0) || !(r_max > start.r))
    throw std::invalid_argument("integrate: need 0 < start.r < r_max");
  const double theta0 = energy_density(spec, start);
  if (!(theta0 > opts.theta_min))
    throw std::invalid_argument("integrate: start state has degenerate energy density");
  if (start.alpha_prime <= 0.0) throw MonotonicityError(start.r);

  SolutionProfile out(spec);
  auto push = [&](double r, const Vec2& y) {
    out.r.push_back(r);
    out.alpha.push_back(y.a);
    out.alpha_prime.push_back(y.b);
    out.theta.push_back(energy_density(spec, {r, y.a, y.b}));
  };

  const std::vector<double> targets = forced_targets(start.r, r_max, opts);
  std::size_t next_target = 0;

  auto rhs = [&](double r, const Vec2& y, Vec2& dy) -> bool {
    try {
      dy.a = y.b;
      dy.b = second_derivative(spec, {r, y.a, y.b});
    } catch (const DegenerateStateError&) {
      return false;
    }
    return std::isfinite(dy.a) && std::isfinite(dy.b);
  };

  double r = start.r;
  Vec2 y{start.alpha, start.alpha_prime};
  push(r, y);

  Vec2 k1;
  if (!rhs(r, y, k1))
    throw std::invalid_argument("integrate: start state not integrable");

  double h = std::min(0.1 * r, 0.5 * (r_max - r));
  out.termination = {Termination::ReachedRMax, r_max};
  constexpr long step_budget = 10'000'000;

  while (r < r_max) {
    // Land exactly on the next forced node.
    bool landing = false;
    double h_step = h;
    if (next_target < targets.size() && r + h_step >= targets[next_target] - 1e-15 * r) {
      h_step = targets[next_target] - r;
      landing = true;
    }

    Vec2 k2, k3, k4, k5, k6, k7, y5;
    double err = inf;
    bool ok = true;
    const double hs = h_step;
    Vec2 tmp;

    tmp = {y.a + hs * a21 * k1.a, y.b + hs * a21 * k1.b};
    ok = rhs(r + c2 * hs, tmp, k2);
    if (ok) {
      tmp = {y.a + hs * (a31 * k1.a + a32 * k2.a), y.b + hs * (a31 * k1.b + a32 * k2.b)};
      ok = rhs(r + c3 * hs, tmp, k3);
    }
    if (ok) {
      tmp = {y.a + hs * (a41 * k1.a + a42 * k2.a + a43 * k3.a),
             y.b + hs * (a41 * k1.b + a42 * k2.b + a43 * k3.b)};
      ok = rhs(r + c4 * hs, tmp, k4);
    }
    if (ok) {
      tmp = {y.a + hs * (a51 * k1.a + a52 * k2.a + a53 * k3.a + a54 * k4.a),
             y.b + hs * (a51 * k1.b + a52 * k2.b + a53 * k3.b + a54 * k4.b)};
      ok = rhs(r + c5 * hs, tmp, k5);
    }
    if (ok) {
      tmp = {y.a + hs * (a61 * k1.a + a62 * k2.a + a63 * k3.a + a64 * k4.a + a65 * k5.a),
             y.b + hs * (a61 * k1.b + a62 * k2.b + a63 * k3.b + a64 * k4.b + a65 * k5.b)};
      ok = rhs(r + hs, tmp, k6);
    }
    if (ok) {
      y5 = {y.a + hs * (b1 * k1.a + b3 * k3.a + b4c * k4.a + b5c * k5.a + b6 * k6.a),
            y.b + hs * (b1 * k1.b + b3 * k3.b + b4c * k4.b + b5c * k5.b + b6 * k6.b)};
      ok = rhs(r + hs, y5, k7) && std::isfinite(y5.a) && std::isfinite(y5.b);
    }
    if (ok) {
      const Vec2 y4{
          y.a + hs * (e1 * k1.a + e3 * k3.a + e4 * k4.a + e5 * k5.a + e6 * k6.a + e7 * k7.a),
          y.b + hs * (e1 * k1.b + e3 * k3.b + e4 * k4.b + e5 * k5.b + e6 * k6.b + e7 * k7.b)};
      const double sa = opts.tol * (1.0 + std::max(std::abs(y.a), std::abs(y5.a)));
      const double sb = opts.tol * (1.0 + std::max(std::abs(y.b), std::abs(y5.b)));
      const double ea = (y5.a - y4.a) / sa, eb = (y5.b - y4.b) / sb;
      err = std::sqrt(0.5 * (ea * ea + eb * eb));
      if (!std::isfinite(err)) err = inf;
    }

    if (err <= 1.0) {
      const double r_new = landing ? targets[next_target] : r + hs;
      if (landing) ++next_target;
      r = r_new;
      y = y5;
      k1 = k7;
      ++out.stats.accepted;
      out.stats.min_step = std::min(out.stats.min_step, hs);
      push(r, y);

      if (y.b <= 0.0) throw MonotonicityError(r);
      if (std::abs(y.b) >= opts.blowup_cap) {
        out.termination = {Termination::DerivativeBlowUp, r};
        break;
      }
      if (out.theta.back() < opts.theta_min) {
        out.termination = {Termination::EnergyDegenerate, r};
        break;
      }
      if (out.stats.accepted >= step_budget)
        throw std::runtime_error("integrate: step budget exceeded");

      const double grow = err == 0.0 ? opts.max_growth
                                     : std::clamp(opts.safety * std::pow(err, -0.2),
                                                  opts.min_shrink, opts.max_growth);
      // A landing step was truncated to hit the node; resume the controller
      // step rather than inheriting the truncation.
      h = landing ? std::max(h, hs * grow) : hs * grow;
    } else {
      ++out.stats.rejected;
      const double shrink = err == inf ? opts.min_shrink
                                       : std::clamp(opts.safety * std::pow(err, -0.2),
                                                    opts.min_shrink, 1.0);
      h = hs * shrink;
      if (h < opts.hmin_rel * r) {
        out.termination = {Termination::StepUnderflow, r};
        break;
      }
    }
  }
  return out;
}

SolveResult solve_full(const ProblemSpec& spec, double alpha0, double r_max,
                       const SolveOptions& opts) {
  LocalSolution local = picard_solve(spec, alpha0, opts.picard);
  if (!(r_max > local.epsilon))
    throw std::invalid_argument("solve: r_max must exceed the startup radius");

  SolutionProfile prof(spec);
  prof.handoff_r = local.epsilon;
  for (std::size_t i = 0; i < local.grid.size(); ++i) {
    const double r = local.grid[i];
    const double al = local.alpha(i);
    const double ap = local.alpha_prime(i);
    prof.r.push_back(r);
    prof.alpha.push_back(al);
    prof.alpha_prime.push_back(ap);
    prof.theta.push_back(energy_density(spec, {r, al, ap}));
  }

  const StatePoint handoff{local.epsilon, prof.alpha.back(), prof.alpha_prime.back()};
  SolutionProfile tail = integrate(spec, handoff, r_max, opts.integrate);
  for (std::size_t i = 1; i < tail.size(); ++i) {
    prof.r.push_back(tail.r[i]);
    prof.alpha.push_back(tail.alpha[i]);
    prof.alpha_prime.push_back(tail.alpha_prime[i]);
    prof.theta.push_back(tail.theta[i]);
  }
  prof.termination = tail.termination;
  prof.stats = tail.stats;
  return {std::move(prof), std::move(local)};
}

SolutionProfile solve(const ProblemSpec& spec, double alpha0, double r_max,
                      const SolveOptions& opts) {
  return solve_full(spec, alpha0, r_max, opts).profile;
}

SolutionProfile solve_interior(const ProblemSpec& spec, const StatePoint& start,
                               double r_max, const SolveOptions& opts) {
  return integrate(spec, start, r_max, opts.integrate);
}

}  // namespace pharmonic

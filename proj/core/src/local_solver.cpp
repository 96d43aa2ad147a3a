#include "pharmonic/local_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "pharmonic/numerics.hpp"
#include "pharmonic/ode.hpp"

namespace pharmonic {
namespace {

// Logarithmic-derivative ratio A = (ln Theta)' * r in the blow-up variables,
// written as a single quotient so the s -> 0 limit is finite:
//   A = 2(q-1)(n-1) [2 g g' a'/f^2 - f' a'^2/f - g^2 f'/f^3]
//       / [(2q-1) a'^2 + (n-1) g^2/f^2],
// with a' = sqrt(s) v + z evaluated at alpha = s z.
double log_density_ratio(const ProblemSpec& spec, double s, double v, double z) {
  const int n = spec.n;
  const double q = spec.q;
  if (s == 0.0) {
    const double f1 = spec.f.taylor_c2();
    const double g1 = spec.g.taylor_c2();
    const double num = -v * v + 4.0 * g1 * z * z * z - 4.0 * f1 * z * z;
    return 2.0 * (q - 1.0) * (n - 1) * num / ((2.0 * q + n - 2.0) * z * z);
  }
  const double ap = std::sqrt(s) * v + z;
  const double fr = spec.f.eval(s);
  const double fp = spec.f.deriv(s);
  const double ga = spec.g.eval(s * z);
  const double gp = spec.g.deriv(s * z);
  const double num = 2.0 * ga * gp * ap / (fr * fr) - fp * ap * ap / fr -
                     ga * ga * fp / (fr * fr * fr);
  const double den = (2.0 * q - 1.0) * ap * ap + (n - 1) * ga * ga / (fr * fr);
  return 2.0 * (q - 1.0) * (n - 1) * num / den;
}

}  // namespace

double phi(const ProblemSpec& spec, double s, double v, double z) {
  if (!spec.startup_admissible())
    throw std::invalid_argument("phi: warps do not admit the singular startup");
  if (!(z > 0.0)) throw std::domain_error("phi: requires z > 0");
  const int n = spec.n;
  const double A = log_density_ratio(spec, s, v, z);
  if (s == 0.0) {
    const double f1 = spec.f.taylor_c2();
    const double g1 = spec.g.taylor_c2();
    return -3.0 * f1 * z + 3.0 * g1 * z * z - A * z / (n - 1);
  }
  const double ap = std::sqrt(s) * v + z;
  const double fr = spec.f.eval(s);
  const double fp = spec.f.deriv(s);
  const double ga = spec.g.eval(s * z);
  const double gp = spec.g.deriv(s * z);
  return (1.0 / s - fp / fr) * ap - A / (n - 1) * ap +
         (ga * gp / (fr * fr) - z / s);
}

StartupValues initial_curvature(const ProblemSpec& spec, double alpha0) {
  if (!(alpha0 > 0.0))
    throw std::invalid_argument("initial_curvature: requires alpha0 > 0");
  StartupValues sv;
  sv.phi0 = phi(spec, 0.0, 0.0, alpha0);
  sv.z_prime0 = (spec.n - 1.0) / (spec.n + 1.0) * sv.phi0;
  sv.alpha_pp0 = 2.0 * sv.z_prime0;
  return sv;
}

double LocalSolution::alpha(std::size_t i) const { return grid[i] * z[i]; }

double LocalSolution::alpha_prime(std::size_t i) const {
  return std::sqrt(grid[i]) * v[i] + z[i];
}

namespace {

struct Grid {
  std::vector<double> s;
};

Grid build_grid(double eps, double ratio, double span) {
  Grid g;
  for (double s = eps; s >= eps * span * (1.0 - 1e-12); s /= ratio)
    g.s.push_back(s);
  std::reverse(g.s.begin(), g.s.end());
  return g;
}

// Cubic Lagrange interpolation in x = ln s through 4 consecutive grid nodes.
struct LogInterp {
  const std::vector<double>* s;
  const std::vector<double>* y;

  double at(double sq, std::size_t cell_hi) const {
    const std::size_t n = s->size();
    std::size_t j0 = cell_hi >= 2 ? cell_hi - 2 : 0;
    j0 = std::min(j0, n - 4);
    const double x = std::log(sq);
    double acc = 0.0;
    for (std::size_t i = j0; i < j0 + 4; ++i) {
      double term = (*y)[i];
      const double xi = std::log((*s)[i]);
      for (std::size_t j = j0; j < j0 + 4; ++j) {
        if (j == i) continue;
        const double xj = std::log((*s)[j]);
        term *= (x - xj) / (xi - xj);
      }
      acc += term;
    }
    return acc;
  }
};

struct IterationResult {
  bool in_set = true;
  double change = 0.0;
};

// One sweep of the integral operators
//   z_new(r) = alpha0 + (n-1)/n * int_0^r (1 - s^n/r^n) Phi ds
//   v_new(r) = (n-1) r^{-(n+1/2)} * int_0^r s^n Phi ds,
// accumulating both prefix integrals cell by cell with Gauss-Legendre
// quadrature.  The iterate is interpolated in ln s; on the head cell
// [0, s_0], z is linear from z(0) = alpha0 and vt = v/sqrt(s) is frozen.
IterationResult sweep(const ProblemSpec& spec, double alpha0, const Grid& grid,
                      std::vector<double>& z, std::vector<double>& v) {
  const int n = spec.n;
  const std::size_t N = grid.s.size();
  std::vector<double> vt(N);
  for (std::size_t i = 0; i < N; ++i) vt[i] = v[i] / std::sqrt(grid.s[i]);

  const LogInterp iz{&grid.s, &z};
  const LogInterp ivt{&grid.s, &vt};

  std::vector<double> z_new(N), v_new(N);
  double P0 = 0.0, Pn = 0.0;

  for (std::size_t i = 0; i < N; ++i) {
    const double lo = i == 0 ? 0.0 : grid.s[i - 1];
    const double hi = grid.s[i];
    const double hc = 0.5 * (hi - lo), mc = 0.5 * (hi + lo);
    for (int k = 0; k < 4; ++k) {
      const double sq = mc + hc * gl4_nodes[k];
      double zq, vq;
      if (i == 0) {
        zq = alpha0 + (z[0] - alpha0) * (sq / hi);
        vq = vt[0] * std::sqrt(sq);
      } else {
        zq = iz.at(sq, i);
        vq = ivt.at(sq, i) * std::sqrt(sq);
      }
      const double ph = phi(spec, sq, vq, zq);
      const double wgt = hc * gl4_weights[k];
      P0 += wgt * ph;
      Pn += wgt * std::pow(sq, n) * ph;
    }
    const double r = grid.s[i];
    z_new[i] = alpha0 + (n - 1.0) / n * (P0 - Pn / std::pow(r, n));
    v_new[i] = (n - 1.0) * Pn / std::pow(r, n + 0.5);
  }

  IterationResult res;
  for (std::size_t i = 0; i < N; ++i) {
    res.change = std::max(res.change, std::abs(z_new[i] - z[i]));
    res.change = std::max(res.change, std::abs(v_new[i] - v[i]));
    if (std::abs(z_new[i] - alpha0) > 0.5 * alpha0 || std::abs(v_new[i]) > 1.0)
      res.in_set = false;
  }
  z = std::move(z_new);
  v = std::move(v_new);
  return res;
}

// Worst profile-equation residual over nodes with s >= eps/10, with alpha''
// taken from the degree-4 interpolant through the 5 nearest nodes.
double measure_residual(const ProblemSpec& spec, const LocalSolution& sol) {
  const std::size_t N = sol.grid.size();
  if (N < 5) return std::numeric_limits<double>::infinity();
  std::vector<double> al(N);
  for (std::size_t i = 0; i < N; ++i) al[i] = sol.alpha(i);

  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (sol.grid[i] < sol.epsilon / 10.0) continue;
    std::size_t j0 = i >= 2 ? i - 2 : 0;
    j0 = std::min(j0, N - 5);
    std::array<double, 5> xs, ys;
    for (std::size_t k = 0; k < 5; ++k) {
      xs[k] = sol.grid[j0 + k];
      ys[k] = al[j0 + k];
    }
    const double app = poly5_second_derivative(xs, ys, sol.grid[i]);
    const double res = residual(
        spec, {sol.grid[i], al[i], sol.alpha_prime(i)}, app);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace

LocalSolution picard_solve(const ProblemSpec& spec, double alpha0,
                           const PicardOptions& opts) {
  if (!spec.startup_admissible())
    throw std::invalid_argument("picard_solve: warps do not admit the singular startup");
  if (!(alpha0 > 0.0))
    throw std::invalid_argument("picard_solve: requires alpha0 > 0");

  const StartupValues sv = initial_curvature(spec, alpha0);
  double eps = std::min(opts.epsilon_hint, alpha0 * alpha0 / 8.0);

  int halvings = 0;
  std::string last_failure = "not attempted";
  for (; eps >= opts.eps_min; eps *= 0.5, ++halvings) {
    const Grid grid = build_grid(eps, opts.grid_ratio, opts.grid_span);
    const double z0 = opts.initial_iterate ? opts.initial_iterate->first : alpha0;
    const double v0 = opts.initial_iterate ? opts.initial_iterate->second : 0.0;
    std::vector<double> z(grid.s.size(), z0), v(grid.s.size(), v0);

    bool escaped = false, converged = false;
    int iters = 0;
    for (; iters < opts.max_iter; ++iters) {
      const IterationResult it = sweep(spec, alpha0, grid, z, v);
      if (!it.in_set) {
        escaped = true;
        break;
      }
      if (it.change < opts.tol_fix) {
        converged = true;
        ++iters;
        break;
      }
    }
    if (escaped) {
      last_failure = "iterate escaped the contraction set";
      continue;
    }
    if (!converged) {
      last_failure = "fixed-point iteration did not converge";
      continue;
    }

    LocalSolution sol;
    sol.epsilon = eps;
    sol.grid = grid.s;
    sol.z = std::move(z);
    sol.v = std::move(v);
    sol.alpha0 = alpha0;
    sol.phi0 = sv.phi0;
    sol.z_prime0 = sv.z_prime0;
    sol.alpha_pp0 = sv.alpha_pp0;
    sol.iterations = iters;
    sol.epsilon_halvings = halvings;
    sol.converged = true;
    sol.worst_residual = measure_residual(spec, sol);
    if (sol.worst_residual < opts.tol_res) return sol;
    last_failure = "finite-difference residual above bound";
  }
  throw NonContractionError("picard_solve: epsilon reached " +
                            std::to_string(eps) + " without success (" +
                            last_failure + ")");
}

}  // namespace pharmonic

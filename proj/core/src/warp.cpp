#include "pharmonic/warp.hpp"

#include <cmath>
#include <cstdio>

namespace pharmonic {
namespace {

// Perturbed warp: r + c2 r^2 below 1, unit slope beyond 2, and a quintic
// smooth-step blend of the slope in between.  With t = r - 1 the slope is
//   w'(1+t) = 1 + 2 c2 (3t^3 - 5t^2 + t + 1),
// which matches value and slope of both pieces at t = 0 and t = 1, and its
// antiderivative gives the value on the blend.
double perturbed_eval(double c2, double r) {
  if (r <= 1.0) return r + c2 * r * r;
  if (r >= 2.0) {
    const double f2 = 2.0 + (13.0 / 6.0) * c2;
    return f2 + (r - 2.0);
  }
  const double t = r - 1.0;
  const double poly = 0.75 * t * t * t * t - (5.0 / 3.0) * t * t * t + 0.5 * t * t + t;
  return (1.0 + c2) + t + 2.0 * c2 * poly;
}

double perturbed_deriv(double c2, double r) {
  if (r <= 1.0) return 1.0 + 2.0 * c2 * r;
  if (r >= 2.0) return 1.0;
  const double t = r - 1.0;
  return 1.0 + 2.0 * c2 * (3.0 * t * t * t - 5.0 * t * t + t + 1.0);
}

// The quadratic piece has slope 1 + 2 c2 r, positive on [0, 1) exactly when
// c2 >= -1/2; below that the warp turns back before the blend starts.  At the
// boundary the blend dips a few percent negative mid-interval (the C^2 cubic
// necessarily overshoots its endpoint value), which leaves the warp positive:
// f(1) = 1 + c2 >= 1/2 and f(2) = 2 + (13/6) c2 > 0.
bool perturbed_slope_positive(double c2) { return c2 >= -0.5; }

}  // namespace

double WarpProfile::eval(double r) const {
  switch (kind) {
    case WarpKind::Euclidean: return r;
    case WarpKind::Hyperbolic: return std::sinh(r);
    case WarpKind::Power: return std::pow(r, m);
    case WarpKind::ExpGrowth: return std::sinh(a * r) / a;
    case WarpKind::Perturbed: return perturbed_eval(c2, r);
  }
  return r;
}

double WarpProfile::deriv(double r) const {
  switch (kind) {
    case WarpKind::Euclidean: return 1.0;
    case WarpKind::Hyperbolic: return std::cosh(r);
    case WarpKind::Power: return m == 1.0 ? 1.0 : m * std::pow(r, m - 1.0);
    case WarpKind::ExpGrowth: return std::cosh(a * r);
    case WarpKind::Perturbed: return perturbed_deriv(c2, r);
  }
  return 1.0;
}

double WarpProfile::taylor_c2() const {
  // sinh(ar)/a = r + 0 r^2 + ...; only Perturbed has a quadratic term.
  return kind == WarpKind::Perturbed ? c2 : 0.0;
}

bool WarpProfile::startup_admissible() const {
  if (kind == WarpKind::Power) return m == 1.0;
  return true;
}

std::optional<ExponentialEnvelope> WarpProfile::envelope() const {
  switch (kind) {
    case WarpKind::Hyperbolic:
      // sinh r = e^r (1 - e^{-2r})/2 >= e^r/2.5 for r >= 1; cosh <= 0.57 e^r.
      return ExponentialEnvelope{1.0, 2.5};
    case WarpKind::ExpGrowth: {
      const double C = 1.25 * std::max({2.0 * a, 1.0 / (2.0 * a), 1.0});
      return ExponentialEnvelope{a, C};
    }
    default: return std::nullopt;
  }
}

std::string WarpProfile::name() const {
  switch (kind) {
    case WarpKind::Euclidean: return "euclidean";
    case WarpKind::Hyperbolic: return "hyperbolic";
    case WarpKind::Power: return "power";
    case WarpKind::ExpGrowth: return "exp";
    case WarpKind::Perturbed: return "perturbed";
  }
  return "euclidean";
}

std::string WarpProfile::display() const {
  char buf[64];
  switch (kind) {
    case WarpKind::Power:
      std::snprintf(buf, sizeof buf, "power(m=%g)", m);
      return buf;
    case WarpKind::ExpGrowth:
      std::snprintf(buf, sizeof buf, "exp(a=%g)", a);
      return buf;
    case WarpKind::Perturbed:
      std::snprintf(buf, sizeof buf, "perturbed(c2=%g)", c2);
      return buf;
    default: return name();
  }
}

WarpProfile make_profile(WarpKind kind, double param) {
  WarpProfile w;
  w.kind = kind;
  switch (kind) {
    case WarpKind::Power:
      if (!(param >= 1.0))
        throw std::invalid_argument("power warp requires exponent m >= 1");
      w.m = param;
      break;
    case WarpKind::ExpGrowth:
      if (!(param > 0.0))
        throw std::invalid_argument("exp warp requires rate a > 0");
      w.a = param;
      break;
    case WarpKind::Perturbed:
      if (!std::isfinite(param) || !perturbed_slope_positive(param))
        throw std::invalid_argument("perturbed warp coefficient c2 makes the slope vanish");
      w.c2 = param;
      break;
    default:
      break;
  }
  return w;
}

WarpProfile parse_warp(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  std::string param_part = colon == std::string::npos ? "" : text.substr(colon + 1);

  auto need_param = [&](const char* key) -> double {
    const std::string prefix = std::string(key) + "=";
    if (param_part.rfind(prefix, 0) != 0)
      throw std::invalid_argument("warp '" + text + "': expected parameter " + prefix + "<value>");
    const std::string value = param_part.substr(prefix.size());
    std::size_t used = 0;
    double parsed = 0.0;
    try {
      parsed = std::stod(value, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("warp '" + text + "': bad numeric value '" + value + "'");
    }
    if (used != value.size())
      throw std::invalid_argument("warp '" + text + "': bad numeric value '" + value + "'");
    return parsed;
  };

  if (family == "euclidean" || family == "hyperbolic") {
    if (!param_part.empty())
      throw std::invalid_argument("warp '" + text + "': family takes no parameter");
    return make_profile(family == "euclidean" ? WarpKind::Euclidean : WarpKind::Hyperbolic);
  }
  if (family == "power") return make_profile(WarpKind::Power, need_param("m"));
  if (family == "exp") return make_profile(WarpKind::ExpGrowth, need_param("a"));
  if (family == "perturbed") return make_profile(WarpKind::Perturbed, need_param("c2"));
  throw std::invalid_argument("unknown warp family '" + family + "'");
}

bool WarpValidation::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

WarpValidation validate(const WarpProfile& w, const std::vector<double>& r_samples) {
  WarpValidation out;

  {
    WarpCheck c{"positivity", true, 0.0, 0.0, ""};
    for (double r : r_samples) {
      if (r <= 0.0) continue;
      const double v = w.eval(r);
      if (!(v > 0.0) || !std::isfinite(v)) {
        c.pass = false;
        c.worst_r = r;
        c.worst_error = v;
        break;
      }
    }
    out.checks.push_back(c);
  }

  {
    // Central difference with cube-root-of-eps step; relative error.
    WarpCheck c{"derivative_consistency", true, 0.0, 0.0, ""};
    for (double r : r_samples) {
      if (r <= 0.0) continue;
      const double h = 6e-6 * std::max(r, 1e-3);
      const double fd = (w.eval(r + h) - w.eval(r - h)) / (2.0 * h);
      const double d = w.deriv(r);
      const double err = std::abs(fd - d) / (1.0 + std::abs(d));
      if (err > c.worst_error) {
        c.worst_error = err;
        c.worst_r = r;
      }
    }
    c.pass = c.worst_error < 1e-6;
    out.checks.push_back(c);
  }

  {
    WarpCheck c{"origin", true, 0.0, 0.0, ""};
    const double v0 = w.eval(0.0);
    c.worst_error = std::abs(v0);
    c.pass = c.worst_error == 0.0;
    if (w.startup_admissible()) {
      const double d0 = w.deriv(0.0);
      const double derr = std::abs(d0 - 1.0);
      if (derr > c.worst_error) c.worst_error = derr;
      c.pass = c.pass && derr < 1e-15;
    } else {
      c.note = "slope-1 condition not required for this family";
    }
    out.checks.push_back(c);
  }

  if (w.startup_admissible()) {
    // Fit (w(r)-r)/r^2 = c2 + c3 r + c4 r^2 through three sample radii and
    // compare the extrapolated constant with the exact coefficient.
    WarpCheck c{"taylor_c2", true, 0.0, 0.0, ""};
    const double rs[3] = {1e-2, 1e-3, 1e-4};
    double L[3];
    for (int i = 0; i < 3; ++i) L[i] = (w.eval(rs[i]) - rs[i]) / (rs[i] * rs[i]);
    // Solve the 3x3 Vandermonde system for the constant term by Lagrange
    // evaluation at r = 0.
    double c2_est = 0.0;
    for (int i = 0; i < 3; ++i) {
      double term = L[i];
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        term *= (0.0 - rs[j]) / (rs[i] - rs[j]);
      }
      c2_est += term;
    }
    c.worst_error = std::abs(c2_est - w.taylor_c2());
    c.pass = c.worst_error < 1e-6;
    out.checks.push_back(c);
  }

  return out;
}

}  // namespace pharmonic

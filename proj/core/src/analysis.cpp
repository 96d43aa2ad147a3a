#include "pharmonic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>

#include <json.hpp>

#include "pharmonic/numerics.hpp"
#include "pharmonic/ode.hpp"

namespace pharmonic {
namespace {

constexpr double barrier_r = 0.5493061443340549;  // ln(3)/2
constexpr double decisive_margin = 1e-4;
constexpr double flat_slope = 1e-4;
constexpr double flat_increase = 1e-3;
constexpr double identity_band = 1e-2;
constexpr double super_ladder[4] = {1.0, 2.0, 4.0, 8.0};

struct Tail {
  std::size_t i0;
  double lo, hi;
  std::size_t count;
};

Tail tail_window(const SolutionProfile& P) {
  const double R = P.r.back();
  Tail t;
  t.hi = R;
  t.lo = 0.5 * R;
  t.i0 = P.index_at_or_above(t.lo);
  t.count = P.size() - t.i0;
  if (t.count < 50)
    throw WindowError("classify_regime: tail window [" + std::to_string(t.lo) +
                      ", " + std::to_string(R) + "] has only " +
                      std::to_string(t.count) + " nodes");
  return t;
}

double power_degree(const WarpProfile& w) {
  if (w.kind == WarpKind::Euclidean) return 1.0;
  if (w.kind == WarpKind::Power) return w.m;
  return 0.0;  // not a power family
}

bool bounded_slope_target(const WarpProfile& g) {
  switch (g.kind) {
    case WarpKind::Euclidean:
    case WarpKind::Perturbed: return true;
    case WarpKind::Power: return g.m == 1.0;
    default: return false;
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::Trivial: return "Trivial";
    case RegimeKind::Bounded: return "Bounded";
    case RegimeKind::LinearGrowth: return "LinearGrowth";
    case RegimeKind::AsymptoticIdentity: return "AsymptoticIdentity";
    case RegimeKind::SuperIdentity: return "SuperIdentity";
    case RegimeKind::ExponentialGrowth: return "ExponentialGrowth";
    case RegimeKind::PowerSlopeDecay: return "PowerSlopeDecay";
    case RegimeKind::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string to_string(const Regime& r) {
  switch (r.kind) {
    case RegimeKind::LinearGrowth: return "LinearGrowth(c=" + fmt(r.param) + ")";
    case RegimeKind::ExponentialGrowth:
      return "ExponentialGrowth(rate=" + fmt(r.param) + ")";
    case RegimeKind::PowerSlopeDecay:
      return "PowerSlopeDecay(s=" + fmt(r.param) + ")";
    default: return to_string(r.kind);
  }
}

std::string RegimeReport::to_json() const {
  nlohmann::ordered_json j;
  j["regime"] = pharmonic::to_string(regime.kind);
  j["param"] = regime.param;
  j["label"] = pharmonic::to_string(regime);
  j["evidence"] = nlohmann::ordered_json::array();
  for (const auto& e : evidence) {
    nlohmann::ordered_json je;
    je["check"] = e.check;
    je["window"] = {e.window_lo, e.window_hi};
    je["measured"] = e.measured;
    je["threshold"] = e.threshold;
    if (!e.note.empty()) je["note"] = e.note;
    j["evidence"].push_back(je);
  }
  j["notes"] = notes;
  return j.dump(2);
}

ExponentFit fit_asymptotic_exponent(const SolutionProfile& P, double r_lo,
                                    double r_hi) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P.r[i] < r_lo || P.r[i] > r_hi) continue;
    if (!(P.alpha_prime[i] > 0.0))
      throw HypothesisError("fit_asymptotic_exponent: alpha' not positive on window");
    lx.push_back(std::log(P.r[i]));
    ly.push_back(std::log(P.alpha_prime[i]));
  }
  if (lx.size() < 30)
    throw WindowError("fit_asymptotic_exponent: fewer than 30 nodes in window");
  const LineFit fit = least_squares_line(lx, ly);
  ExponentFit out;
  out.exponent = fit.slope;
  out.amplitude = std::exp(fit.intercept);
  out.fit_residual = fit.rms_residual;
  return out;
}

RegimeReport classify_regime(const SolutionProfile& P) {
  RegimeReport rep;

  if (P.trivial) {
    rep.regime = {RegimeKind::Trivial, 0.0};
    rep.evidence.push_back({"declared_trivial", 0, 0, 0, 0, "identically zero solution"});
    rep.evidence.push_back({"node_count", 0, 0, double(P.size()), 0, ""});
    rep.notes = "trivial solution";
    return rep;
  }
  if (P.size() == 0) throw NotApplicableError("classify_regime: empty profile");
  if (P.termination.kind == Termination::EnergyDegenerate ||
      P.termination.kind == Termination::StepUnderflow)
    throw NotApplicableError("classify_regime: profile ended in " +
                             to_string(P.termination.kind));

  double a_max = 0.0;
  for (double a : P.alpha) a_max = std::max(a_max, std::abs(a));
  if (a_max < 1e-12) {
    rep.regime = {RegimeKind::Trivial, 0.0};
    rep.evidence.push_back({"max_alpha", P.r.front(), P.r.back(), a_max, 1e-12, ""});
    rep.evidence.push_back({"node_count", P.r.front(), P.r.back(), double(P.size()), 0, ""});
    rep.notes = "profile vanishes to working precision";
    return rep;
  }

  const Tail t = tail_window(P);
  const double R = t.hi;

  // (a) Flat tail: the solution has already saturated.
  const double end_slope = P.alpha_prime.back();
  const double tail_rise = P.alpha.back() - P.alpha[t.i0];
  if (end_slope < flat_slope && tail_rise < flat_increase) {
    rep.regime = {RegimeKind::Bounded, 0.0};
    rep.evidence.push_back({"final_slope", t.lo, R, end_slope, flat_slope, ""});
    rep.evidence.push_back({"tail_increase", t.lo, R, tail_rise, flat_increase,
                            "limit approximately " + fmt(P.alpha.back())});
    rep.notes = "slope and increment both negligible over the tail";
    return rep;
  }

  // (b) Hyperbolic source and target: identity trichotomy.
  if (P.spec.f.kind == WarpKind::Hyperbolic && P.spec.g.kind == WarpKind::Hyperbolic) {
    // Excess ladder: alpha - r reaching 1, 2, 4, 8 at increasing radii.
    std::vector<double> crossings;
    for (double C : super_ladder) {
      double rc = -1.0;
      for (std::size_t i = 0; i < P.size(); ++i)
        if (P.alpha[i] - P.r[i] >= C) {
          rc = P.r[i];
          break;
        }
      if (rc < 0.0) break;
      crossings.push_back(rc);
    }
    if (crossings.size() == 4) {
      rep.regime = {RegimeKind::SuperIdentity, P.alpha.back() - R};
      for (std::size_t k = 0; k < 4; ++k)
        rep.evidence.push_back({"excess_crossing", crossings[k], R, super_ladder[k],
                                super_ladder[k],
                                "alpha - r reaches " + fmt(super_ladder[k]) +
                                    " at r = " + fmt(crossings[k])});
      rep.notes = "identity excess climbs the full ladder";
      return rep;
    }

    // Identity band test on tail probes past the barrier radius.
    std::size_t probes = 0;
    double dev = 0.0, sdev = 0.0;
    for (std::size_t i = t.i0; i < P.size(); ++i) {
      if (P.r[i] <= barrier_r) continue;
      ++probes;
      dev = std::max(dev, std::abs(P.alpha[i] - P.r[i]));
      sdev = std::max(sdev, std::abs(P.alpha_prime[i] - 1.0));
    }
    if (probes >= 10 && dev < identity_band && sdev < identity_band) {
      rep.regime = {RegimeKind::AsymptoticIdentity, 0.0};
      rep.evidence.push_back({"identity_deviation", t.lo, R, dev, identity_band, ""});
      rep.evidence.push_back({"slope_deviation", t.lo, R, sdev, identity_band, ""});
      rep.notes = "profile tracks alpha = r within the identity band";
      return rep;
    }
    rep.regime = {RegimeKind::Undetermined, 0.0};
    rep.evidence.push_back({"identity_deviation", t.lo, R, dev, identity_band,
                            probes < 10 ? "too few probes past the barrier radius" : ""});
    rep.notes = "neither ladder nor identity band decisive";
    return rep;
  }

  // (c) Exponential source, polynomial target of degree > 1: growth-rate probe.
  if (const auto env = P.spec.f.envelope();
      env && P.spec.g.kind == WarpKind::Power && P.spec.g.m > 1.0) {
    const double probe = env->a / (2.0 * (P.spec.g.m - 1.0));
    std::vector<double> xs, ls;
    for (std::size_t i = t.i0; i < P.size(); ++i) {
      if (!(P.alpha[i] > 0.0)) continue;
      xs.push_back(P.r[i]);
      ls.push_back(std::log(P.alpha[i]));
    }
    const double slope = theil_sen_slope(xs, ls);
    if (slope >= probe) {
      rep.regime = {RegimeKind::ExponentialGrowth, slope};
      rep.evidence.push_back({"log_alpha_slope", t.lo, R, slope, probe, ""});
      rep.evidence.push_back({"end_slope", t.lo, R, end_slope, flat_slope,
                              "derivative still growing at the end of the run"});
      rep.notes = "logarithmic growth rate clears the family probe";
      return rep;
    }
    rep.regime = {RegimeKind::Undetermined, 0.0};
    rep.evidence.push_back({"log_alpha_slope", t.lo, R, slope, probe,
                            "growth rate below the family probe"});
    rep.notes = "growth too slow for the exponential statement";
    return rep;
  }

  // (d) Power-law route: fit the derivative exponent on the tail.
  ExponentFit fit;
  try {
    fit = fit_asymptotic_exponent(P, t.lo, R);
  } catch (const AnalysisError&) {
    rep.regime = {RegimeKind::Undetermined, 0.0};
    rep.evidence.push_back({"exponent_fit", t.lo, R, 0, 0, "fit unavailable"});
    rep.notes = "derivative exponent not measurable on the tail";
    return rep;
  }
  const double s = fit.exponent;
  const bool clean = fit.fit_residual < 0.05;
  if (clean && s <= -1.1) {
    // Integrable decay: alpha' ~ A r^s with s < -1 caps the remaining rise
    // by A R^{s+1}/(-s-1).
    const double rise_bound =
        fit.amplitude * std::pow(R, s + 1.0) / (-s - 1.0);
    rep.regime = {RegimeKind::Bounded, 0.0};
    rep.evidence.push_back({"decay_exponent", t.lo, R, s, -1.1,
                            "rms residual " + fmt(fit.fit_residual)});
    rep.evidence.push_back({"remaining_rise", t.lo, R, rise_bound, 0,
                            "limit approximately " + fmt(P.alpha.back() + rise_bound)});
    rep.notes = "derivative decays integrably";
    return rep;
  }
  if (clean && s >= -0.9) {
    if (std::abs(s) <= 0.05) {
      std::vector<double> rs(P.r.begin() + t.i0, P.r.end());
      std::vector<double> as(P.alpha.begin() + t.i0, P.alpha.end());
      const LineFit lin = least_squares_line(rs, as);
      rep.regime = {RegimeKind::LinearGrowth, lin.slope};
      rep.evidence.push_back({"exponent_fit", t.lo, R, s, 0.05,
                              "derivative asymptotically constant"});
      rep.evidence.push_back({"linear_slope", t.lo, R, lin.slope, 0,
                              "rms residual " + fmt(lin.rms_residual)});
      rep.notes = "linear growth with limit slope " + fmt(lin.slope);
      return rep;
    }
    if (s < 0.0) {
      rep.regime = {RegimeKind::PowerSlopeDecay, s};
      rep.evidence.push_back({"exponent_fit", t.lo, R, s, -0.9,
                              "rms residual " + fmt(fit.fit_residual)});
      rep.evidence.push_back({"end_slope", t.lo, R, end_slope, flat_slope,
                              "derivative decays subintegrably"});
      rep.notes = "derivative follows a non-integrable power law";
      return rep;
    }
  }
  rep.regime = {RegimeKind::Undetermined, 0.0};
  rep.evidence.push_back({"exponent_fit", t.lo, R, s, 0,
                          "rms residual " + fmt(fit.fit_residual)});
  rep.notes = clean ? "exponent in the undecidable band near -1"
                    : "tail does not follow a clean power law";
  return rep;
}

Regime predict_regime(const ProblemSpec& spec, double alpha0,
                      const std::optional<StatePoint>& observed) {
  const WarpProfile& f = spec.f;
  const WarpProfile& g = spec.g;

  // Equal power warps on both sides.
  const double mf = power_degree(f), mg = power_degree(g);
  if (mf > 0.0 && mg > 0.0 && mf == mg) {
    if (mf == 1.0) return {RegimeKind::LinearGrowth, alpha0};
    return {RegimeKind::Undetermined, 0.0};  // only cone bounds available
  }

  // Power source against a bounded-slope target.
  if (mf > 0.0 && bounded_slope_target(g)) {
    const double delta = mf;
    const double crit = 2.0 * spec.q - 1.0;
    if ((spec.n - 1) * delta > crit) return {RegimeKind::Bounded, 0.0};
    return {RegimeKind::PowerSlopeDecay, -(spec.n - 1) * delta / crit};
  }

  // Hyperbolic against hyperbolic: barrier comparison at one observed radius.
  if (f.kind == WarpKind::Hyperbolic && g.kind == WarpKind::Hyperbolic) {
    if (observed && observed->r > barrier_r) {
      const double da = observed->alpha - observed->r;
      const double ds = observed->alpha_prime - 1.0;
      if (da > decisive_margin && ds > decisive_margin)
        return {RegimeKind::SuperIdentity, 0.0};
      if (da < -decisive_margin && ds < -decisive_margin)
        return {RegimeKind::Bounded, 0.0};
    }
    return {RegimeKind::Undetermined, 0.0};
  }

  // Exponentially growing source, bounded-slope target: bounded image for p > 2.
  if (f.envelope() && bounded_slope_target(g)) {
    if (spec.p > 2.0) return {RegimeKind::Bounded, 0.0};
    return {RegimeKind::Undetermined, 0.0};
  }

  throw WrongFamilyError("predict_regime: no covering statement for " +
                         f.display() + " -> " + g.display());
}

CheckResult check_monotonicity(const SolutionProfile& P) {
  CheckResult res{"monotonicity", true, std::numeric_limits<double>::infinity(),
                  0.0, ""};
  if (P.trivial) {
    res.note = "trivial solution, vacuous";
    return res;
  }
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double m = std::min(P.alpha_prime[i], P.theta[i]);
    if (m < res.margin) {
      res.margin = m;
      res.at_r = P.r[i];
    }
  }
  res.pass = res.margin > 0.0;
  if (!res.pass) res.note = "alpha' or theta not positive";
  return res;
}

CheckResult check_energy_slope_bounds(const SolutionProfile& P, double a,
                                      double b, double r_lo, double r_hi) {
  const std::size_t i0 = P.index_at_or_above(r_lo);
  std::size_t i1 = P.index_at_or_above(r_hi);
  if (i1 < P.size() && P.r[i1] <= r_hi) ++i1;
  if (i1 - i0 < 3)
    throw WindowError("check_energy_slope_bounds: window has fewer than 3 nodes");

  for (std::size_t i = i0; i < i1; ++i) {
    if (std::abs(P.spec.f.deriv(P.r[i])) > a)
      throw HypothesisError("check_energy_slope_bounds: |f'| exceeds a on the window");
    if (std::abs(P.spec.g.deriv(P.alpha[i])) > b)
      throw HypothesisError("check_energy_slope_bounds: |g'| exceeds b on the window");
  }

  const int n = P.spec.n;
  const double p = P.spec.p;
  const double cfac = (n - 1) * (p - 2.0) * (a + b);
  const double c_lo = cfac / (p - 1.0);
  const double c_hi = cfac / std::min(p - 1.0, double(n - 1));

  CheckResult res{"energy_slope_bounds", true,
                  std::numeric_limits<double>::infinity(), 0.0, ""};
  for (std::size_t i = i0 + 1; i + 1 < i1; ++i) {
    const double dr = P.r[i + 1] - P.r[i - 1];
    const double slope = (P.spec.q - 1.0) *
                         (std::log(P.theta[i + 1]) - std::log(P.theta[i - 1])) / dr;
    // Mean-value form: the interval slope equals the pointwise slope
    // somewhere in [r_{i-1}, r_{i+1}], where f is at least f(r_{i-1}).
    const double f_min = P.spec.f.eval(P.r[i - 1]);
    const double lo = -c_lo / f_min, hi = c_hi / f_min;
    const double slack = 1e-3 * std::max(std::abs(lo), std::abs(hi));
    if (slope < lo - slack || slope > hi + slack) {
      res.pass = false;
      res.margin = 0.0;
      res.at_r = P.r[i];
      res.note = "slope " + fmt(slope) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]";
      return res;
    }
    const double width = hi - lo;
    const double margin =
        width > 0.0 ? std::min(slope - lo, hi - slope) / width : 1.0;
    if (margin < res.margin) {
      res.margin = margin;
      res.at_r = P.r[i];
    }
  }
  return res;
}

namespace {

void require_power_pair(const SolutionProfile& P, const char* who) {
  const double mf = power_degree(P.spec.f), mg = power_degree(P.spec.g);
  if (!(mf > 0.0 && mg > 0.0 && mf == mg))
    throw WrongFamilyError(std::string(who) + ": needs equal power warps on both sides");
}

}  // namespace

CheckResult check_cone_bound(const SolutionProfile& P, double c) {
  require_power_pair(P, "check_cone_bound");
  if (!(c > 0.0)) throw std::invalid_argument("check_cone_bound: c must be positive");
  CheckResult res{"cone_bound", true, std::numeric_limits<double>::infinity(),
                  0.0, "c = " + fmt(c)};
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double lim = c * P.r[i];
    const double margin = (lim - P.alpha[i]) / (lim > 0.0 ? lim : 1.0);
    if (margin < res.margin) {
      res.margin = margin;
      res.at_r = P.r[i];
    }
  }
  res.pass = res.margin > -1e-9;
  if (!res.pass) res.note += ", cone exceeded";
  return res;
}

CheckResult check_cone_separation(const SolutionProfile& P,
                                  const std::vector<double>& cs) {
  require_power_pair(P, "check_cone_separation");
  CheckResult res{"cone_separation", true, 0.0, 0.0, ""};
  for (double c : cs) {
    int side = 0;
    double cross_r = -1.0;
    bool recrossed = false;
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double d = P.alpha[i] - c * P.r[i];
      const double band = 1e-12 * (1.0 + std::abs(c * P.r[i]));
      const int s = d > band ? 1 : (d < -band ? -1 : 0);
      if (s == 0) continue;
      if (side == 0) {
        side = s;
        cross_r = P.r[i];
      } else if (s != side) {
        recrossed = true;
        res.at_r = P.r[i];
        break;
      }
    }
    if (recrossed) {
      res.pass = false;
      res.note += "c=" + fmt(c) + ": re-crossed; ";
    } else {
      res.note += "c=" + fmt(c) +
                  (side == 0 ? ": on the line; "
                             : (side > 0 ? ": above from r=" + fmt(cross_r) + "; "
                                         : ": below from r=" + fmt(cross_r) + "; "));
    }
  }
  return res;
}

CheckResult check_energy_floor(const SolutionProfile& P, double C2, double C) {
  if (!(C2 > 0.0) || !(C > 0.0))
    throw std::invalid_argument("check_energy_floor: constants must be positive");
  const RegimeReport rep = classify_regime(P);
  switch (rep.regime.kind) {
    case RegimeKind::Trivial:
    case RegimeKind::Bounded:
    case RegimeKind::Undetermined:
      throw NotApplicableError("check_energy_floor: profile not unbounded (" +
                               to_string(rep.regime.kind) + ")");
    default: break;
  }
  for (std::size_t i = 0; i < P.size(); ++i)
    if (P.alpha[i] >= 1.0 &&
        P.spec.g.deriv(P.alpha[i]) > C2 * P.spec.g.eval(P.alpha[i]) * (1.0 + 1e-12))
      throw HypothesisError("check_energy_floor: g' <= C2 g fails at alpha = " +
                            fmt(P.alpha[i]));

  std::size_t ibar = P.size();
  for (std::size_t i = 0; i < P.size(); ++i)
    if (P.alpha[i] >= 1.0) {
      ibar = i;
      break;
    }
  if (ibar == P.size())
    throw NotApplicableError("check_energy_floor: alpha never reaches 1");

  const double delta = std::pow(1.0 / (8.0 * (P.spec.n - 1) * C2 * C * C), 2);
  CheckResult res{"energy_floor", true, std::numeric_limits<double>::infinity(),
                  0.0, "delta = " + fmt(delta) + ", from r = " + fmt(P.r[ibar])};
  for (std::size_t i = ibar; i < P.size(); ++i) {
    const double ratio = P.theta[i] / delta;
    if (ratio < res.margin) {
      res.margin = ratio;
      res.at_r = P.r[i];
    }
  }
  res.pass = res.margin >= 1.0 - 1e-9;
  return res;
}

VanishingOrder vanishing_order(const SolutionProfile& P) {
  if (P.trivial || P.size() == 0)
    throw NotApplicableError("vanishing_order: no nodes to fit");
  const double r0 = P.r.front();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < P.size() && P.r[i] <= 10.0 * r0; ++i) {
    if (!(P.alpha[i] > 0.0))
      throw NotApplicableError("vanishing_order: alpha not positive near the origin");
    lx.push_back(std::log(P.r[i]));
    ly.push_back(std::log(P.alpha[i]));
  }
  if (lx.size() < 8)
    throw WindowError("vanishing_order: fewer than 8 nodes in the first decade");
  const LineFit fit = least_squares_line(lx, ly);
  VanishingOrder out;
  out.k = fit.slope;
  out.flagged = out.k > 2.0 * P.spec.n - 1.0;
  return out;
}

namespace {

void require_hyperbolic_pair(const SolutionProfile& P, const char* who) {
  if (P.spec.f.kind != WarpKind::Hyperbolic || P.spec.g.kind != WarpKind::Hyperbolic)
    throw WrongFamilyError(std::string(who) + ": needs hyperbolic warps on both sides");
}

}  // namespace

CheckResult check_barrier_invariance(const SolutionProfile& P) {
  require_hyperbolic_pair(P, "check_barrier_invariance");
  CheckResult res{"barrier_invariance", true,
                  std::numeric_limits<double>::infinity(), 0.0, ""};
  int side = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P.r[i] <= barrier_r) continue;
    const double da = P.alpha[i] - P.r[i];
    const double ds = P.alpha_prime[i] - 1.0;
    if (da > decisive_margin && ds > decisive_margin) {
      side = 1;
      start = i;
      break;
    }
    if (da < -decisive_margin && ds < -decisive_margin) {
      side = -1;
      start = i;
      break;
    }
  }
  if (side == 0) {
    res.note = "no decisive node past the barrier radius";
    res.margin = 0.0;
    return res;
  }
  res.note = std::string(side > 0 ? "above" : "below") +
             " the identity from r = " + fmt(P.r[start]);
  for (std::size_t i = start + 1; i < P.size(); ++i) {
    const double da = (P.alpha[i] - P.r[i]) * side;
    const double ds = (P.alpha_prime[i] - 1.0) * side;
    const double m = std::min(da - decisive_margin * (1.0 - 1e-6), ds);
    if (m < res.margin) {
      res.margin = m;
      res.at_r = P.r[i];
    }
    if (da < decisive_margin * (1.0 - 1e-6) || ds < 0.0) {
      res.pass = false;
      res.note += "; invariance lost at r = " + fmt(P.r[i]);
      return res;
    }
  }
  return res;
}

CheckResult check_no_recrossing(const SolutionProfile& P) {
  require_hyperbolic_pair(P, "check_no_recrossing");
  CheckResult res{"no_recrossing", true, 0.0, 0.0, ""};
  int side = 0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P.r[i] <= barrier_r) continue;
    const double d = P.alpha[i] - P.r[i];
    if (std::abs(d) <= decisive_margin) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (side == 0) {
      side = s;
      res.note = std::string(s > 0 ? "above" : "below") +
                 " from r = " + fmt(P.r[i]);
    } else if (s != side) {
      res.pass = false;
      res.at_r = P.r[i];
      res.note += "; sign flipped at r = " + fmt(P.r[i]);
      return res;
    }
  }
  if (side == 0) res.note = "never leaves the identity band";
  return res;
}

}  // namespace pharmonic

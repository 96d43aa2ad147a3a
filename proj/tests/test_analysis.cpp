#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "pharmonic/analysis.hpp"
#include "pharmonic/integrator.hpp"
#include "pharmonic/ode.hpp"

using namespace pharmonic;

namespace {

ProblemSpec pair_of(WarpKind fk, WarpKind gk, int n = 3, double p = 4.0,
                    double fparam = 0.0, double gparam = 0.0) {
  return ProblemSpec(n, p, make_profile(fk, fparam), make_profile(gk, gparam));
}

// Log head plus a dense uniform tail, mimicking integrator output.
std::vector<double> node_set(double r0, double R) {
  std::vector<double> rs;
  const double mid = 0.5 * R;
  for (double r = r0; r < mid; r *= 1.04) rs.push_back(r);
  for (int j = 0; j <= 160; ++j) rs.push_back(mid + (R - mid) * j / 160.0);
  return rs;
}

using Fn = std::function<double(double)>;

SolutionProfile synth(const ProblemSpec& spec, const std::vector<double>& rs,
                      const Fn& alpha, const Fn& alpha_prime,
                      Termination kind = Termination::ReachedRMax) {
  SolutionProfile P(spec);
  for (double r : rs) {
    const double a = alpha(r), ap = alpha_prime(r);
    P.r.push_back(r);
    P.alpha.push_back(a);
    P.alpha_prime.push_back(ap);
    P.theta.push_back(energy_density(spec, {r, a, ap}));
  }
  P.termination = {kind, P.r.back()};
  return P;
}

}  // namespace

TEST_CASE("trivial profiles are recognized") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic);

  SolutionProfile declared(spec);
  declared.trivial = true;
  CHECK(classify_regime(declared).regime.kind == RegimeKind::Trivial);

  const auto P = synth(spec, node_set(0.1, 16.0), [](double) { return 0.0; },
                       [](double) { return 0.0; });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::Trivial);
  CHECK(rep.evidence.size() >= 2);
}

TEST_CASE("saturated tails classify as bounded") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Euclidean);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return 1.0 - std::exp(-r); },
                       [](double r) { return std::exp(-r); });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::Bounded);
  REQUIRE(rep.evidence.size() >= 2);
  CHECK(rep.evidence[0].check == "final_slope");
}

TEST_CASE("hyperbolic pair near the identity classifies as asymptotic identity") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic);
  const auto P = synth(
      spec, node_set(0.1, 16.0),
      [](double r) { return r + 5e-3 * (1.0 - std::exp(-r)); },
      [](double r) { return 1.0 + 5e-3 * std::exp(-r); });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::AsymptoticIdentity);
  CHECK(rep.evidence.size() >= 2);
}

TEST_CASE("hyperbolic pair climbing the excess ladder is super-identity") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic);
  const auto excess = [](double r) { return std::exp(0.8 * (r - 2.0)); };
  const auto P = synth(
      spec, node_set(0.1, 10.0), [&](double r) { return r + excess(r); },
      [&](double r) { return 1.0 + 0.8 * excess(r); });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::SuperIdentity);
  CHECK(rep.regime.param == doctest::Approx(excess(10.0)).epsilon(1e-12));
  CHECK(rep.evidence.size() == 4);
}

TEST_CASE("a blow-up ended profile can still be classified") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic);
  const auto excess = [](double r) { return std::exp(5.0 * (r - 0.5)); };
  const auto P = synth(
      spec, node_set(0.05, 2.0), [&](double r) { return r + excess(r); },
      [&](double r) { return 1.0 + 5.0 * excess(r); },
      Termination::DerivativeBlowUp);
  CHECK(classify_regime(P).regime.kind == RegimeKind::SuperIdentity);
}

TEST_CASE("exponential source against a superlinear polynomial target") {
  const auto spec =
      pair_of(WarpKind::ExpGrowth, WarpKind::Power, 3, 4.0, 1.2, 2.0);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return std::exp(0.8 * r); },
                       [](double r) { return 0.8 * std::exp(0.8 * r); });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::ExponentialGrowth);
  CHECK(rep.regime.param == doctest::Approx(0.8).epsilon(1e-6));

  // Too slow for the family probe (rate 0.3 < 0.6): no decision.
  const auto Q = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return std::exp(0.3 * r); },
                       [](double r) { return 0.3 * std::exp(0.3 * r); });
  CHECK(classify_regime(Q).regime.kind == RegimeKind::Undetermined);
}

TEST_CASE("subintegrable derivative decay is detected with its exponent") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return 3.0 * std::cbrt(r); },
                       [](double r) { return std::pow(r, -2.0 / 3.0); });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::PowerSlopeDecay);
  CHECK(rep.regime.param == doctest::Approx(-2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("integrable derivative decay is bounded with a remaining-rise bound") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Euclidean);
  const auto P = synth(
      spec, node_set(0.1, 16.0),
      [](double r) { return 2.0 - 0.9 * std::pow(r, -1.0 / 3.0); },
      [](double r) { return 0.3 * std::pow(r, -4.0 / 3.0); });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::Bounded);
  REQUIRE(rep.evidence.size() >= 2);
  CHECK(rep.evidence[0].check == "decay_exponent");
}

TEST_CASE("asymptotically constant derivative classifies as linear growth") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return 2.0 * r; },
                       [](double) { return 2.0; });
  const RegimeReport rep = classify_regime(P);
  CHECK(rep.regime.kind == RegimeKind::LinearGrowth);
  CHECK(rep.regime.param == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("the undecidable exponent band stays undetermined") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return 2.0 + std::log(r); },
                       [](double r) { return 1.0 / r; });
  CHECK(classify_regime(P).regime.kind == RegimeKind::Undetermined);
}

TEST_CASE("classification demands a populated tail window") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  std::vector<double> rs;
  for (int i = 1; i <= 30; ++i) rs.push_back(0.3 * i);
  const auto P = synth(spec, rs, [](double r) { return 2.0 * r; },
                       [](double) { return 2.0; });
  CHECK_THROWS_AS(classify_regime(P), WindowError);
}

TEST_CASE("degenerate terminations are not classified") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return 0.9 * r; },
                       [](double) { return 0.9; },
                       Termination::EnergyDegenerate);
  CHECK_THROWS_AS(classify_regime(P), NotApplicableError);

  SolutionProfile empty(spec);
  CHECK_THROWS_AS(classify_regime(empty), NotApplicableError);
}

TEST_CASE("exponent fitting recovers a planted power law") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto P = synth(spec, node_set(0.5, 20.0),
                       [](double r) { return 5.0 - 5.0 / std::sqrt(r); },
                       [](double r) { return 2.5 * std::pow(r, -1.5); });
  const ExponentFit fit = fit_asymptotic_exponent(P, 2.0, 20.0);
  CHECK(fit.exponent == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(fit.amplitude == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(fit.fit_residual < 1e-10);

  CHECK_THROWS_AS(fit_asymptotic_exponent(P, 19.9, 19.95), WindowError);
  const auto neg = synth(spec, node_set(0.5, 20.0),
                         [](double r) { return 10.0 - r; },
                         [](double) { return -1.0; });
  CHECK_THROWS_AS(fit_asymptotic_exponent(neg, 2.0, 20.0), HypothesisError);
}

TEST_CASE("structural predictions cover the stated families") {
  // Equal power warps.
  const auto cone = pair_of(WarpKind::Euclidean, WarpKind::Euclidean, 3, 4.0);
  const Regime lin = predict_regime(cone, 0.7);
  CHECK(lin.kind == RegimeKind::LinearGrowth);
  CHECK(lin.param == 0.7);
  const auto quad =
      pair_of(WarpKind::Power, WarpKind::Power, 3, 4.0, 2.0, 2.0);
  CHECK(predict_regime(quad, 1.0).kind == RegimeKind::Undetermined);

  // Power source, bounded-slope target: threshold (n-1) delta vs 2q - 1.
  const auto p3 = pair_of(WarpKind::Power, WarpKind::Euclidean, 3, 4.0, 2.0);
  CHECK(predict_regime(p3, 1.0).kind == RegimeKind::Bounded);
  const auto p2 = pair_of(WarpKind::Power, WarpKind::Euclidean, 2, 4.0, 2.0);
  const Regime dec = predict_regime(p2, 1.0);
  CHECK(dec.kind == RegimeKind::PowerSlopeDecay);
  CHECK(dec.param == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));

  // Hyperbolic pair: decided only by an observed state past the barrier.
  const auto hyp = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic, 3, 3.0);
  CHECK(predict_regime(hyp, 2.0).kind == RegimeKind::Undetermined);
  CHECK(predict_regime(hyp, 2.0, StatePoint{1.0, 1.2, 1.3}).kind ==
        RegimeKind::SuperIdentity);
  CHECK(predict_regime(hyp, 0.5, StatePoint{1.0, 0.8, 0.7}).kind ==
        RegimeKind::Bounded);
  CHECK(predict_regime(hyp, 1.0, StatePoint{1.0, 1.00005, 1.2}).kind ==
        RegimeKind::Undetermined);
  CHECK(predict_regime(hyp, 2.0, StatePoint{0.3, 0.4, 1.3}).kind ==
        RegimeKind::Undetermined);

  // Exponential envelope source, bounded-slope target.
  const auto h2e = pair_of(WarpKind::Hyperbolic, WarpKind::Euclidean, 3, 3.0);
  CHECK(predict_regime(h2e, 1.0).kind == RegimeKind::Bounded);
  const auto h2e_harmonic =
      pair_of(WarpKind::Hyperbolic, WarpKind::Euclidean, 3, 2.0);
  CHECK(predict_regime(h2e_harmonic, 1.0).kind == RegimeKind::Undetermined);

  // Growing target with no covering statement.
  const auto e2h = pair_of(WarpKind::Euclidean, WarpKind::Hyperbolic, 3, 4.0);
  CHECK_THROWS_AS(predict_regime(e2h, 1.0), WrongFamilyError);
}

TEST_CASE("monotonicity check flags a nonpositive slope") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  auto P = synth(spec, node_set(0.5, 10.0), [](double r) { return r; },
                 [](double) { return 1.0; });
  CHECK(check_monotonicity(P).pass);

  P.alpha_prime[20] = -1e-3;
  P.theta[20] = energy_density(spec, {P.r[20], P.alpha[20], P.alpha_prime[20]});
  const CheckResult res = check_monotonicity(P);
  CHECK_FALSE(res.pass);
  CHECK(res.at_r == P.r[20]);
}

TEST_CASE("energy slope bounds hold on a genuine profile") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic, 3, 3.0);
  const SolutionProfile P = solve_interior(spec, {0.5, 0.2, 0.3}, 10.0);
  const double a = std::cosh(10.0);
  const double amax = *std::max_element(P.alpha.begin(), P.alpha.end());
  const double b = std::cosh(amax) * 1.0001;
  const CheckResult res = check_energy_slope_bounds(P, a, b, 1.0, 8.0);
  CHECK(res.pass);
  CHECK(res.margin > 0.0);

  // Understated derivative bound: the hypothesis fails on the data.
  CHECK_THROWS_AS(check_energy_slope_bounds(P, 1.0, b, 1.0, 8.0),
                  HypothesisError);
  CHECK_THROWS_AS(check_energy_slope_bounds(P, a, b, 20.0, 30.0), WindowError);
}

TEST_CASE("energy slope bounds catch a fabricated violation") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean, 3, 4.0);
  std::vector<double> rs = {0.9, 0.95, 1.0, 1.05, 1.1};
  SolutionProfile P(spec);
  for (double r : rs) {
    const double ap = (r == 1.0) ? 50.0 : 0.5;
    P.r.push_back(r);
    P.alpha.push_back(0.5 * r);
    P.alpha_prime.push_back(ap);
    P.theta.push_back(energy_density(spec, {r, 0.5 * r, ap}));
  }
  P.termination = {Termination::ReachedRMax, rs.back()};
  const CheckResult res = check_energy_slope_bounds(P, 1.0, 1.0, 0.9, 1.1);
  CHECK_FALSE(res.pass);
}

TEST_CASE("energy slope bounds degenerate cleanly in the harmonic case") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean, 3, 2.0);
  const auto P = synth(spec, node_set(1.0, 3.0), [](double r) { return 0.7 * r; },
                       [](double) { return 0.7; });
  CHECK(check_energy_slope_bounds(P, 1.0, 1.0, 1.0, 3.0).pass);
}

TEST_CASE("cone bound and separation act only on power pairs") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto below = synth(spec, node_set(0.5, 10.0),
                           [](double r) { return 0.8 * r; },
                           [](double) { return 0.8; });
  const CheckResult ok = check_cone_bound(below, 1.0);
  CHECK(ok.pass);
  CHECK(ok.margin == doctest::Approx(0.2).epsilon(1e-12));

  const auto above = synth(spec, node_set(0.5, 10.0),
                           [](double r) { return 1.2 * r; },
                           [](double) { return 1.2; });
  CHECK_FALSE(check_cone_bound(above, 1.0).pass);
  CHECK_THROWS_AS(check_cone_bound(above, -1.0), std::invalid_argument);

  const auto hyp = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic);
  const auto wrong = synth(hyp, node_set(0.5, 10.0),
                           [](double r) { return 0.8 * r; },
                           [](double) { return 0.8; });
  CHECK_THROWS_AS(check_cone_bound(wrong, 1.0), WrongFamilyError);
  CHECK_THROWS_AS(check_cone_separation(wrong, {1.0}), WrongFamilyError);
}

TEST_CASE("cone separation notices a crossing ratio") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  // alpha / r climbs from about 0.8 to 1.5: lines outside that ratio range
  // are never crossed, a line inside it is.
  const auto P = synth(
      spec, node_set(0.5, 10.0),
      [](double r) { return r * (1.15 + 0.35 * std::tanh(r - 5.0)); },
      [](double r) {
        const double t = std::tanh(r - 5.0);
        return 1.15 + 0.35 * t + r * 0.35 * (1.0 - t * t);
      });
  const CheckResult apart = check_cone_separation(P, {0.5, 2.0});
  CHECK(apart.pass);
  CHECK(apart.note.find("above") != std::string::npos);
  CHECK(apart.note.find("below") != std::string::npos);

  CHECK_FALSE(check_cone_separation(P, {1.2}).pass);

  const auto exact = synth(spec, node_set(0.5, 10.0),
                           [](double r) { return r; }, [](double) { return 1.0; });
  const CheckResult on = check_cone_separation(exact, {1.0});
  CHECK(on.pass);
  CHECK(on.note.find("on the line") != std::string::npos);
}

TEST_CASE("energy floor applies to unbounded profiles only") {
  const auto hyp = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic, 3, 3.0);
  const auto excess = [](double r) { return std::exp(0.8 * (r - 2.0)); };
  const auto grow = synth(
      hyp, node_set(0.1, 10.0), [&](double r) { return r + excess(r); },
      [&](double r) { return 1.0 + 0.8 * excess(r); });
  const CheckResult res = check_energy_floor(grow, 1.35, 2.5);
  CHECK(res.pass);
  CHECK(res.margin > 1.0);

  const auto flat = synth(hyp, node_set(0.1, 16.0),
                          [](double r) { return 1.0 - std::exp(-r); },
                          [](double r) { return std::exp(-r); });
  CHECK_THROWS_AS(check_energy_floor(flat, 1.35, 2.5), NotApplicableError);
  // coth(1) > 0.9: the slope hypothesis g' <= C2 g fails on the data.
  CHECK_THROWS_AS(check_energy_floor(grow, 0.9, 2.5), HypothesisError);
  CHECK_THROWS_AS(check_energy_floor(grow, -1.0, 2.5), std::invalid_argument);
}

TEST_CASE("vanishing order distinguishes startup solutions from spurious ones") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic, 3, 3.0);
  const SolutionProfile P = solve(spec, 0.5, 5.0);
  const VanishingOrder v = vanishing_order(P);
  CHECK(v.k == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_FALSE(v.flagged);

  std::vector<double> rs;
  for (double r = 1e-3; r <= 1.0; r *= 1.3) rs.push_back(r);
  const auto spurious = synth(spec, rs,
                              [](double r) { return std::pow(r, 6.0); },
                              [](double r) { return 6.0 * std::pow(r, 5.0); });
  const VanishingOrder s = vanishing_order(spurious);
  CHECK(s.k == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(s.flagged);

  SolutionProfile declared(spec);
  declared.trivial = true;
  CHECK_THROWS_AS(vanishing_order(declared), NotApplicableError);

  const auto sparse = synth(spec, {1.0, 3.0, 5.0, 7.0, 9.0},
                            [](double r) { return r; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(vanishing_order(sparse), WindowError);
}

TEST_CASE("barrier invariance and no-recrossing") {
  const auto hyp = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic, 3, 3.0);
  const auto excess = [](double r) { return std::exp(0.8 * (r - 2.0)); };
  const auto above = synth(
      hyp, node_set(0.1, 10.0), [&](double r) { return r + excess(r); },
      [&](double r) { return 1.0 + 0.8 * excess(r); });
  const CheckResult inv = check_barrier_invariance(above);
  CHECK(inv.pass);
  CHECK(inv.note.find("above") != std::string::npos);
  CHECK(check_no_recrossing(above).pass);

  const auto below = synth(hyp, node_set(0.1, 16.0),
                           [](double r) { return 1.0 - std::exp(-r); },
                           [](double r) { return std::exp(-r); });
  const CheckResult binv = check_barrier_invariance(below);
  CHECK(binv.pass);
  CHECK(binv.note.find("below") != std::string::npos);

  // Decisively above on [1, 3], dipping back after: both checks must fail.
  const auto bump = [](double r) {
    return 2e-3 * std::sin(0.25 * 3.14159265358979324 * (r - 0.6));
  };
  const auto flip = synth(hyp, node_set(0.1, 16.0),
                          [&](double r) { return r + bump(r); },
                          [&](double r) {
                            return 1.0 + 2e-3 * 0.25 * 3.14159265358979324 *
                                             std::cos(0.25 * 3.14159265358979324 *
                                                      (r - 0.6));
                          });
  CHECK_FALSE(check_barrier_invariance(flip).pass);
  CHECK_FALSE(check_no_recrossing(flip).pass);

  const auto banded = synth(hyp, node_set(0.1, 16.0),
                            [](double r) { return r + 1e-5; },
                            [](double) { return 1.0; });
  const CheckResult none = check_barrier_invariance(banded);
  CHECK(none.pass);
  CHECK(none.note.find("no decisive node") != std::string::npos);
  CHECK(check_no_recrossing(banded).note.find("never leaves") != std::string::npos);

  const auto cone = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto wrong = synth(cone, node_set(0.1, 16.0),
                           [](double r) { return r; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(check_barrier_invariance(wrong), WrongFamilyError);
  CHECK_THROWS_AS(check_no_recrossing(wrong), WrongFamilyError);
}

TEST_CASE("report serialization carries the decision and its evidence") {
  const auto spec = pair_of(WarpKind::Euclidean, WarpKind::Euclidean);
  const auto P = synth(spec, node_set(0.1, 16.0),
                       [](double r) { return 3.0 * std::cbrt(r); },
                       [](double r) { return std::pow(r, -2.0 / 3.0); });
  const RegimeReport rep = classify_regime(P);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j.at("regime") == "PowerSlopeDecay");
  CHECK(j.at("label").get<std::string>().find("PowerSlopeDecay(s=") == 0);
  CHECK(j.at("evidence").size() >= 2);
  CHECK(j.at("evidence")[0].contains("measured"));
}

TEST_CASE("classification is stable across a CSV round-trip") {
  const auto spec = pair_of(WarpKind::Hyperbolic, WarpKind::Hyperbolic, 3, 3.0);
  const SolutionProfile P = solve_interior(spec, {0.5, 0.2, 0.3}, 12.0);
  const std::string direct = classify_regime(P).to_json();

  std::ostringstream os;
  write_profile_csv(P, os);
  std::istringstream is(os.str());
  SolutionProfile back = read_profile_csv(spec, is);
  back.termination = P.termination;
  const std::string reread = classify_regime(back).to_json();
  CHECK(direct == reread);
}

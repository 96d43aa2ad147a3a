#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pharmonic/profile.hpp"

namespace pharmonic {

enum class RegimeKind {
  Trivial,
  Bounded,
  LinearGrowth,
  AsymptoticIdentity,
  SuperIdentity,
  ExponentialGrowth,
  PowerSlopeDecay,
  Undetermined,
};

struct Regime {
  RegimeKind kind = RegimeKind::Undetermined;
  // LinearGrowth: limit slope; ExponentialGrowth: fitted rate of ln alpha;
  // PowerSlopeDecay: fitted exponent of alpha'.  Unused otherwise.
  double param = 0.0;
};

std::string to_string(RegimeKind k);
std::string to_string(const Regime& r);

struct Evidence {
  std::string check;
  double window_lo = 0.0, window_hi = 0.0;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct RegimeReport {
  Regime regime;
  std::vector<Evidence> evidence;
  std::string notes;
  std::string to_json() const;
};

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Tail window holds too few nodes for a decision.
struct WindowError : AnalysisError {
  using AnalysisError::AnalysisError;
};
// Check applied to a spec outside its warp family.
struct WrongFamilyError : AnalysisError {
  using AnalysisError::AnalysisError;
};
// Quantitative hypothesis of a check fails on the data.
struct HypothesisError : AnalysisError {
  using AnalysisError::AnalysisError;
};
// Check's premise (e.g. unboundedness) does not hold for this profile.
struct NotApplicableError : AnalysisError {
  using AnalysisError::AnalysisError;
};

// Classifies the asymptotic regime from the tail window [R/2, R] of a
// profile that ended by reaching r_max or by derivative blow-up.  Every
// decided regime is justified by at least two evidence entries.
RegimeReport classify_regime(const SolutionProfile& profile);

// Regime predicted by the structural results for the warp family of the
// spec, independent of any computed profile.  For the hyperbolic-to-
// hyperbolic family the prediction may use observed data at one radius
// beyond the barrier threshold ln(3)/2.  Throws WrongFamilyError for
// families without a covering statement.
Regime predict_regime(const ProblemSpec& spec, double alpha0,
                      const std::optional<StatePoint>& observed = {});

struct ExponentFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double fit_residual = 0.0;  // rms residual of the log-log line fit
};

// Least-squares fit alpha'(r) ~ amplitude * r^exponent over [r_lo, r_hi].
// Requires alpha' > 0 on the window and at least 30 nodes.
ExponentFit fit_asymptotic_exponent(const SolutionProfile& profile,
                                    double r_lo, double r_hi);

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  double at_r = 0.0;
  std::string note;
};

// alpha' > 0 and theta > 0 at every node.
CheckResult check_monotonicity(const SolutionProfile& profile);

// Two-sided bound on (ln Theta)', Theta = theta^{(p-2)/2}, from the
// derivative bounds |f'| <= a on the window and |g'| <= b on the traversed
// range of alpha:
//   -(n-1)(p-2)(a+b)/((p-1) f) <= (ln Theta)' <= (n-1)(p-2)(a+b)/(min(p-1,n-1) f).
// The slope is measured by centered differences over node triples inside
// [r_lo, r_hi]; 1e-3 relative slack absorbs the discretization error.
// Throws HypothesisError when the supplied a, b fail on the data.
CheckResult check_energy_slope_bounds(const SolutionProfile& profile, double a,
                                      double b, double r_lo, double r_hi);

// Power-family cone bound alpha <= c r, and non-recrossing of cone lines:
// once the profile leaves the line alpha = c r it stays on that side.
CheckResult check_cone_bound(const SolutionProfile& profile, double c);
CheckResult check_cone_separation(const SolutionProfile& profile,
                                  const std::vector<double>& cs);

// Energy density floor theta >= delta, delta = (1/(8(n-1) C2 C^2))^2, past
// the first radius with alpha >= 1.  Requires an exponential envelope
// (constant C) on the source warp and g' <= C2 g on the traversed range;
// the profile must be unbounded per classify_regime.
CheckResult check_energy_floor(const SolutionProfile& profile, double C2,
                               double C);

struct VanishingOrder {
  double k = 0.0;      // fitted order of alpha ~ r^k near the origin
  bool flagged = false;  // k above the admissible ceiling 2n - 1
};

// Log-log slope of alpha over the smallest sampled decade.  Startup
// solutions must give k close to 1; k > 2n - 1 is flagged as spurious.
VanishingOrder vanishing_order(const SolutionProfile& profile);

// Hyperbolic-to-hyperbolic barrier: past r = ln(3)/2, once a node is
// decisively above the identity (alpha - r and alpha' - 1 both beyond
// 1e-4), all later nodes must stay above; symmetrically below.
CheckResult check_barrier_invariance(const SolutionProfile& profile);

// The sign of alpha - r never flips back after the first decisive
// departure from the identity.
CheckResult check_no_recrossing(const SolutionProfile& profile);

}  // namespace pharmonic

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "pharmonic/problem.hpp"

namespace pharmonic {

enum class Termination { ReachedRMax, DerivativeBlowUp, EnergyDegenerate, StepUnderflow };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct TerminationEvent {
  Termination kind = Termination::ReachedRMax;
  double r = 0.0;  // radius at which integration stopped
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  double min_step = std::numeric_limits<double>::infinity();
};

// Sampled solution profile.  Nodes are strictly increasing; theta is the
// energy density recomputed from (r, alpha, alpha') at each node.  For
// profiles produced by the singular startup, nodes at r <= handoff_r come
// from the local fixed-point grid and the rest from the continuation;
// handoff_r = 0 means the profile started at an interior point.
struct SolutionProfile {
  ProblemSpec spec;
  double handoff_r = 0.0;
  std::vector<double> r, alpha, alpha_prime, theta;
  TerminationEvent termination;
  IntegrationStats stats;
  bool trivial = false;  // identically-zero solution, stored without nodes

  explicit SolutionProfile(ProblemSpec s) : spec(std::move(s)) {}

  std::size_t size() const { return r.size(); }
  double r_last() const { return r.empty() ? 0.0 : r.back(); }

  // First index with r[i] >= x (== size() when past the end).
  std::size_t index_at_or_above(double x) const;
};

// CSV with header "r,alpha,alpha_prime,theta", one node per row, 17
// significant digits, '\n' line ends, C locale formatting.
void write_profile_csv(const SolutionProfile& profile, std::ostream& os);
SolutionProfile read_profile_csv(const ProblemSpec& spec, std::istream& is);

}  // namespace pharmonic

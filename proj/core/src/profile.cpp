#include "pharmonic/profile.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pharmonic {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ReachedRMax: return "ReachedRMax";
    case Termination::DerivativeBlowUp: return "DerivativeBlowUp";
    case Termination::EnergyDegenerate: return "EnergyDegenerate";
    case Termination::StepUnderflow: return "StepUnderflow";
  }
  return "ReachedRMax";
}

Termination termination_from_string(const std::string& s) {
  if (s == "ReachedRMax") return Termination::ReachedRMax;
  if (s == "DerivativeBlowUp") return Termination::DerivativeBlowUp;
  if (s == "EnergyDegenerate") return Termination::EnergyDegenerate;
  if (s == "StepUnderflow") return Termination::StepUnderflow;
  throw std::invalid_argument("unknown termination kind '" + s + "'");
}

std::size_t SolutionProfile::index_at_or_above(double x) const {
  return static_cast<std::size_t>(
      std::lower_bound(r.begin(), r.end(), x) - r.begin());
}

void write_profile_csv(const SolutionProfile& profile, std::ostream& os) {
  os << "r,alpha,alpha_prime,theta\n";
  char line[160];
  for (std::size_t i = 0; i < profile.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n",
                  profile.r[i], profile.alpha[i], profile.alpha_prime[i],
                  profile.theta[i]);
    os << line;
  }
}

SolutionProfile read_profile_csv(const ProblemSpec& spec, std::istream& is) {
  SolutionProfile out(spec);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("profile csv: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,alpha,alpha_prime,theta")
    throw std::runtime_error("profile csv: unexpected header '" + line + "'");

  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double vals[4];
    const char* s = line.c_str();
    char* end = nullptr;
    for (int k = 0; k < 4; ++k) {
      vals[k] = std::strtod(s, &end);
      if (end == s)
        throw std::runtime_error("profile csv: bad number at line " + std::to_string(lineno));
      s = end;
      if (k < 3) {
        if (*s != ',')
          throw std::runtime_error("profile csv: expected ',' at line " + std::to_string(lineno));
        ++s;
      }
    }
    if (*s != '\0')
      throw std::runtime_error("profile csv: trailing characters at line " + std::to_string(lineno));
    out.r.push_back(vals[0]);
    out.alpha.push_back(vals[1]);
    out.alpha_prime.push_back(vals[2]);
    out.theta.push_back(vals[3]);
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out.r[i] > out.r[i - 1]))
      throw std::runtime_error("profile csv: radii not strictly increasing");
  if (!out.r.empty()) out.termination = {Termination::ReachedRMax, out.r.back()};
  return out;
}

}  // namespace pharmonic

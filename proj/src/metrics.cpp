#include "polarlr/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace polarlr {

ProbPartition prob_partition(const LRDistribution& d) {
  const RegionMasses r = region_masses(d);
  ProbPartition p;
  p.p_less = r.less;
  p.p_eq = r.eq;
  p.p_greater = r.greater;
  p.p_geq_half = r.greater + 0.5 * r.eq;
  p.p_leq_half = r.less + 0.5 * r.eq;
  return p;
}

double q_param(const LRDistribution& d) {
  const RegionMasses r = region_masses(d);
  return r.less - r.greater;
}

double bhattacharyya(const LRDistribution& d) {
  double z = 0.0;
  for (const auto& a : d.atoms) z += a.mass * std::sqrt(a.lr);
  return z;
}

double sym_capacity(const LRDistribution& d) {
  double i = 0.0;
  for (const auto& a : d.atoms) i += a.mass * (1.0 - std::log2(1.0 + a.lr));
  return i;
}

ChannelMetrics channel_metrics(const LRDistribution& d) {
  ChannelMetrics m;
  const ProbPartition p = prob_partition(d);
  m.p_less = p.p_less;
  m.p_eq = p.p_eq;
  m.p_greater = p.p_greater;
  m.p_geq_half = p.p_geq_half;
  m.p_leq_half = p.p_leq_half;
  m.q = p.p_less - p.p_greater;
  m.pe = p.p_geq_half;
  m.z = bhattacharyya(d);
  m.i = sym_capacity(d);
  return m;
}

LimitClass classify_limit(const LRDistribution& d, double delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::domain_error("classify_limit: delta must lie in (0, 0.5)");
  const RegionMasses r = region_masses(d);
  const double q = r.less - r.greater;
  if (q >= 1.0 - delta) return LimitClass::kPerfect;
  if (r.eq >= 1.0 - delta) return LimitClass::kNoisy;
  if (q <= delta && r.eq <= delta) return LimitClass::kModerate;
  return LimitClass::kUndecided;
}

std::string to_string(LimitClass c) {
  switch (c) {
    case LimitClass::kPerfect:
      return "perfect";
    case LimitClass::kNoisy:
      return "noisy";
    case LimitClass::kModerate:
      return "moderate";
    case LimitClass::kUndecided:
      return "undecided";
  }
  return "undecided";
}

}  // namespace polarlr

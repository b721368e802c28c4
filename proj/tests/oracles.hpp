#pragma once

// Test-only oracles. Nothing here goes through the affectance code path:
// feasibility is evaluated from raw coordinates with the SINR ratio in long
// double, and maximality by enumerating subsets.

#include <cmath>
#include <cstdint>
#include <vector>

#include "sinrsim/geometry.hpp"
#include "sinrsim/sinr.hpp"

namespace oracle {

using sinrsim::LinkId;

inline long double dist(const sinrsim::Point2d& a, const sinrsim::Point2d& b) {
  const long double dx = static_cast<long double>(a.x()) - b.x();
  const long double dy = static_cast<long double>(a.y()) - b.y();
  return std::sqrt(dx * dx + dy * dy);
}

/// SINR of receiver u when `mask` (bit i = link i) transmits.
inline bool sinr_ok(const sinrsim::Topologyd& t, const sinrsim::PowerAssignmentd& p, std::uint32_t mask, LinkId u) {
  const auto& lu = t.link(u);
  const long double alpha = t.alpha();
  const long double signal = p[u] / std::pow(dist(lu.sender, lu.receiver), alpha);
  long double interference = t.noise();
  for (LinkId v = 0; v < t.size(); ++v) {
    if (v == u || !(mask >> v & 1u)) continue;
    interference += p[v] / std::pow(dist(t.link(v).sender, lu.receiver), alpha);
  }
  if (interference == 0) return true;
  // Same 1e-9 slack the library applies on affectance sums, expressed on the
  // SINR ratio.
  return signal / interference >= t.beta() * (1 - 1e-9L);
}

inline bool feasible(const sinrsim::Topologyd& t, const sinrsim::PowerAssignmentd& p, std::uint32_t mask) {
  for (LinkId u = 0; u < t.size(); ++u) {
    if ((mask >> u & 1u) && !sinr_ok(t, p, mask, u)) return false;
  }
  return true;
}

inline std::uint32_t to_mask(const sinrsim::LinkSet& s) {
  std::uint32_t m = 0;
  for (auto id : s) m |= 1u << id;
  return m;
}

/// Maximal among all subsets of `universe`: feasible, and no feasible
/// strict superset within `universe`. Exhaustive over 2^n subsets.
inline bool maximal_by_enumeration(const sinrsim::Topologyd& t, const sinrsim::PowerAssignmentd& p,
                                   std::uint32_t set, std::uint32_t universe) {
  if (!feasible(t, p, set)) return false;
  const std::uint32_t full = (1u << t.size()) - 1;
  for (std::uint32_t m = 0; m <= full; ++m) {
    if ((m & ~universe) != 0) continue;
    if ((m & set) == set && m != set && feasible(t, p, m)) return false;
  }
  return true;
}

/// Wald-Wolfowitz runs test statistic (standard normal under i.i.d.).
inline double runs_test_z(const std::vector<bool>& xs) {
  double n1 = 0, n2 = 0, runs = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    (xs[i] ? n1 : n2) += 1;
    if (i == 0 || xs[i] != xs[i - 1]) runs += 1;
  }
  const double n = n1 + n2;
  const double mean = 2 * n1 * n2 / n + 1;
  const double var = 2 * n1 * n2 * (2 * n1 * n2 - n) / (n * n * (n - 1));
  return (runs - mean) / std::sqrt(var);
}

/// Half-width of the 3-sigma band of a Bernoulli(p) sample mean over n draws.
inline double three_sigma(double p, double n) { return 3 * std::sqrt(p * (1 - p) / n); }

}  // namespace oracle

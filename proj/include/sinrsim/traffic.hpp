#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sinrsim/geometry.hpp"
#include "sinrsim/rng.hpp"
#include "sinrsim/sinr.hpp"

namespace sinrsim {

/// Weighted pool of maximal feasible sets used in place of the full (and
/// exponentially large) set of maximal schedules.
struct FeasibleSetPool {
  std::vector<LinkSet> sets;
  std::vector<double> weights;
};

/// Scans `order` and keeps each link whose addition leaves the set feasible.
/// The result is maximal over all links of the topology.
LinkSet greedy_maximal_feasible(const AffectanceMatrixd& m, std::span<const LinkId> order);
LinkSet greedy_maximal_feasible(const Topologyd& t, const PowerAssignmentd& p, std::span<const LinkId> order);

/// Same scan with the admission threshold 1/delta: yields a delta-signal
/// set that no further link of `order` can join.
LinkSet greedy_signal_set(const AffectanceMatrixd& m, std::span<const LinkId> order, double delta);

/// k random-permutation greedy sets, deduplicated, uniform weights.
FeasibleSetPool build_pool(const AffectanceMatrixd& m, std::size_t k, std::uint64_t seed);
FeasibleSetPool build_pool(const Topologyd& t, const PowerAssignmentd& p, std::size_t k, std::uint64_t seed);

/// Per-link arrival rates m_u = rho * sum of weights of pooled sets holding u.
Eigen::VectorXd link_rates(const FeasibleSetPool& pool, double rho, std::size_t n);

/// Load below which Reflect is guaranteed stable: 1/(6 kappa Delta^alpha),
/// or 1/(6 kappa) under linear power.
double proven_stable_rho(const Topologyd& t, const PowerAssignmentd& p);

/// How a slot's arrivals are drawn. Both give link u one packet with
/// probability m_u per slot, i.i.d. across slots.
///  pooled_set:  one pooled set drawn by weight, each member kept with
///               probability rho (arrivals are jointly feasible).
///  independent: every link flips its own Bernoulli(m_u) coin.
enum class ArrivalMode { pooled_set, independent };

const char* to_string(ArrivalMode m);
std::optional<ArrivalMode> parse_arrival_mode(std::string_view name);

class TrafficModel {
 public:
  TrafficModel(FeasibleSetPool pool, double rho, std::size_t n, ArrivalMode mode = ArrivalMode::pooled_set);

  const FeasibleSetPool& pool() const { return pool_; }
  double rho() const { return rho_; }
  ArrivalMode mode() const { return mode_; }
  const Eigen::VectorXd& rates() const { return rates_; }

  /// Links receiving a packet this slot, in increasing id order. `out` is
  /// cleared first.
  void sample_arrivals(Engine& rng, std::vector<LinkId>& out) const;
  std::vector<LinkId> sample_arrivals(Engine& rng) const;

 private:
  FeasibleSetPool pool_;
  double rho_;
  ArrivalMode mode_;
  Eigen::VectorXd rates_;
  std::vector<double> cumulative_;
};

}  // namespace sinrsim

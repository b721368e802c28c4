#include "sinrsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sinrsim/detail/greedy.hpp"

namespace sinrsim {

LinkSet greedy_maximal_feasible(const AffectanceMatrixd& m, std::span<const LinkId> order) {
  if (order.size() != m.size()) {
    throw Error(ErrorCode::invalid_parameter, "order must be a permutation of all link ids");
  }
  detail::GreedyFeasibleBuilder builder(m);
  for (auto x : order) {
    if (x >= m.size()) throw Error(ErrorCode::invalid_parameter, "link id out of range");
    builder.try_add(x);
  }
  return LinkSet(builder.chosen());
}

LinkSet greedy_maximal_feasible(const Topologyd& t, const PowerAssignmentd& p, std::span<const LinkId> order) {
  return greedy_maximal_feasible(AffectanceMatrixd(t, p), order);
}

LinkSet greedy_signal_set(const AffectanceMatrixd& m, std::span<const LinkId> order, double delta) {
  if (!(delta >= 1.0)) throw Error(ErrorCode::invalid_parameter, "delta must be >= 1");
  detail::GreedyFeasibleBuilder builder(m, delta);
  for (auto x : order) {
    if (x >= m.size()) throw Error(ErrorCode::invalid_parameter, "link id out of range");
    builder.try_add(x);
  }
  return LinkSet(builder.chosen());
}

FeasibleSetPool build_pool(const AffectanceMatrixd& m, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::invalid_parameter, "pool size must be >= 1");
  Engine rng = derive_stream(seed, {static_cast<std::uint64_t>(StreamTag::pool)});
  std::vector<LinkId> order(m.size());
  std::vector<LinkSet> sets;
  sets.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::iota(order.begin(), order.end(), LinkId{0});
    std::shuffle(order.begin(), order.end(), rng);
    sets.push_back(greedy_maximal_feasible(m, order));
  }
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());

  FeasibleSetPool pool;
  pool.weights.assign(sets.size(), 1.0 / static_cast<double>(sets.size()));
  pool.sets = std::move(sets);
  return pool;
}

FeasibleSetPool build_pool(const Topologyd& t, const PowerAssignmentd& p, std::size_t k, std::uint64_t seed) {
  return build_pool(AffectanceMatrixd(t, p), k, seed);
}

Eigen::VectorXd link_rates(const FeasibleSetPool& pool, double rho, std::size_t n) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorCode::invalid_parameter, "rho must lie in [0, 1]");
  Eigen::VectorXd rates = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < pool.sets.size(); ++i) {
    for (auto u : pool.sets[i]) {
      if (u >= n) throw Error(ErrorCode::invalid_parameter, "pooled link id out of range");
      rates[static_cast<Eigen::Index>(u)] += rho * pool.weights[i];
    }
  }
  return rates;
}

double proven_stable_rho(const Topologyd& t, const PowerAssignmentd& p) {
  return 1.0 / (6.0 * max_set_affectance_bound(t, p));
}

const char* to_string(ArrivalMode m) { return m == ArrivalMode::pooled_set ? "pooled-set" : "independent"; }

std::optional<ArrivalMode> parse_arrival_mode(std::string_view name) {
  if (name == "pooled-set") return ArrivalMode::pooled_set;
  if (name == "independent") return ArrivalMode::independent;
  return std::nullopt;
}

TrafficModel::TrafficModel(FeasibleSetPool pool, double rho, std::size_t n, ArrivalMode mode)
    : pool_(std::move(pool)), rho_(rho), mode_(mode), rates_(link_rates(pool_, rho, n)) {
  if (pool_.sets.size() != pool_.weights.size()) {
    throw Error(ErrorCode::invalid_parameter, "pool sets and weights differ in length");
  }
  cumulative_.resize(pool_.weights.size());
  std::partial_sum(pool_.weights.begin(), pool_.weights.end(), cumulative_.begin());
}

void TrafficModel::sample_arrivals(Engine& rng, std::vector<LinkId>& out) const {
  out.clear();
  if (rho_ <= 0.0 || pool_.sets.empty()) return;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (mode_ == ArrivalMode::independent) {
    for (Eigen::Index u = 0; u < rates_.size(); ++u) {
      if (rates_[u] > 0.0 && unit(rng) < rates_[u]) out.push_back(static_cast<LinkId>(u));
    }
    return;
  }
  const double pick = unit(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pick);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         pool_.sets.size() - 1);
  for (auto u : pool_.sets[idx]) {
    if (unit(rng) < rho_) out.push_back(u);
  }
}

std::vector<LinkId> TrafficModel::sample_arrivals(Engine& rng) const {
  std::vector<LinkId> out;
  sample_arrivals(rng, out);
  return out;
}

}  // namespace sinrsim

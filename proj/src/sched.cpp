#include "sinrsim/sched.hpp"

#include <algorithm>
#include <cmath>

#include "sinrsim/detail/greedy.hpp"

namespace sinrsim {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::reflect: return "reflect";
    case Algorithm::reflect_estimated: return "reflect-estimated";
    case Algorithm::reflect_partitioned: return "reflect-partitioned";
    case Algorithm::lqf: return "lqf";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "reflect") return Algorithm::reflect;
  if (name == "reflect-estimated") return Algorithm::reflect_estimated;
  if (name == "reflect-partitioned") return Algorithm::reflect_partitioned;
  if (name == "lqf") return Algorithm::lqf;
  return std::nullopt;
}

DecisionStreams::DecisionStreams(std::uint64_t seed, std::uint64_t run, std::size_t n) {
  engines_.reserve(n);
  for (std::size_t u = 0; u < n; ++u) {
    engines_.push_back(derive_stream(seed, {static_cast<std::uint64_t>(StreamTag::decisions), run, u}));
  }
}

void reflect_decide(const QueueState& q, const Eigen::VectorXd& rates, DecisionStreams& rng,
                    std::vector<LinkId>& out) {
  out.clear();
  for (LinkId u = 0; u < q.size(); ++u) {
    if (!q.backlogged(u)) continue;
    if (rng.draw(u) < transmit_probability(rates[static_cast<Eigen::Index>(u)])) out.push_back(u);
  }
}

double estimate_rate(const QueueState& q, LinkId u, std::int64_t t) {
  if (t < 1) throw Error(ErrorCode::invalid_parameter, "rate estimate needs t >= 1");
  return std::min(1.0, static_cast<double>(q.arrivals[u]) / static_cast<double>(t));
}

void lqf_schedule(const QueueState& q, const AffectanceMatrixd& m, std::vector<LinkId>& out) {
  std::vector<LinkId> order;
  for (LinkId u = 0; u < q.size(); ++u) {
    if (q.backlogged(u)) order.push_back(u);
  }
  std::sort(order.begin(), order.end(), [&q](LinkId a, LinkId b) {
    return q.queue[a] != q.queue[b] ? q.queue[a] > q.queue[b] : a < b;
  });
  detail::GreedyFeasibleBuilder builder(m);
  for (auto u : order) builder.try_add(u);
  out = builder.chosen();
  std::sort(out.begin(), out.end());
}

LinkSet lqf_schedule(const QueueState& q, const Topologyd& t, const PowerAssignmentd& p) {
  std::vector<LinkId> out;
  lqf_schedule(q, AffectanceMatrixd(t, p), out);
  return LinkSet(std::move(out));
}

void resolve_successes(const std::vector<LinkId>& transmitters, const AffectanceMatrixd& m,
                       std::vector<LinkId>& out) {
  out.clear();
  constexpr double limit = 1.0 + kAffectanceEps;
  for (auto u : transmitters) {
    if (m.raw_load(transmitters, u) <= limit) out.push_back(u);
  }
}

LinkSet resolve_successes(const LinkSet& transmitters, const Topologyd& t, const PowerAssignmentd& p) {
  std::vector<LinkId> out;
  resolve_successes(transmitters.ids(), AffectanceMatrixd(t, p), out);
  return LinkSet(std::move(out));
}

LengthClasses build_length_classes(const Topologyd& t) {
  const double lmin = t.min_length();
  LengthClasses classes;
  classes.count = static_cast<std::size_t>(std::floor(std::log2(length_diversity(t)))) + 1;
  classes.class_of.resize(t.size());
  for (LinkId u = 0; u < t.size(); ++u) {
    const auto r = static_cast<std::size_t>(std::floor(std::log2(t.length(u) / lmin))) + 1;
    classes.class_of[u] = std::clamp<std::size_t>(r, 1, classes.count);
  }
  return classes;
}

std::size_t slot_class(std::int64_t slot, std::size_t count) {
  if (slot < 1 || count < 1) throw Error(ErrorCode::invalid_parameter, "slot and class count must be >= 1");
  return static_cast<std::size_t>((slot - 1) % static_cast<std::int64_t>(count)) + 1;
}

void partitioned_reflect_decide(const QueueState& q, const Eigen::VectorXd& rates, const LengthClasses& classes,
                                std::int64_t slot, DecisionStreams& rng, std::vector<LinkId>& out) {
  out.clear();
  const std::size_t active = slot_class(slot, classes.count);
  const auto scale = static_cast<double>(classes.count);
  for (LinkId u = 0; u < q.size(); ++u) {
    if (classes.class_of[u] != active || !q.backlogged(u)) continue;
    if (rng.draw(u) < transmit_probability(scale * rates[static_cast<Eigen::Index>(u)])) out.push_back(u);
  }
}

}  // namespace sinrsim

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sinrsim/geometry.hpp"
#include "sinrsim/rng.hpp"
#include "sinrsim/sinr.hpp"

namespace sinrsim {

/// Multiplier on the arrival rate giving Reflect's transmit probability.
inline constexpr double kReflectGain = 2.5;

enum class Algorithm { reflect, reflect_estimated, reflect_partitioned, lqf };

const char* to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct QueueState {
  explicit QueueState(std::size_t n) : queue(n, 0), arrivals(n, 0), departures(n, 0) {}

  std::size_t size() const { return queue.size(); }
  bool backlogged(LinkId u) const { return queue[u] > 0; }

  void arrive(LinkId u) {
    ++queue[u];
    ++arrivals[u];
  }
  void depart(LinkId u) {
    --queue[u];
    ++departures[u];
  }

  std::vector<std::int64_t> queue;
  std::vector<std::int64_t> arrivals;    // cumulative A_u(t)
  std::vector<std::int64_t> departures;  // cumulative
};

/// One independent engine per link. A link's decisions consume only its own
/// stream, so any subset of links replays identically in isolation.
class DecisionStreams {
 public:
  DecisionStreams(std::uint64_t seed, std::uint64_t run, std::size_t n);

  double draw(LinkId u) { return unit_(engines_[u]); }
  std::size_t size() const { return engines_.size(); }

 private:
  std::vector<Engine> engines_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

inline double transmit_probability(double rate) { return std::min(1.0, kReflectGain * rate); }

/// Every backlogged link transmits independently with probability
/// min(1, 2.5 m_u). `out` is cleared first and filled in increasing id order.
void reflect_decide(const QueueState& q, const Eigen::VectorXd& rates, DecisionStreams& rng,
                    std::vector<LinkId>& out);

/// min(1, A_u(t) / t) for t >= 1.
double estimate_rate(const QueueState& q, LinkId u, std::int64_t t);

/// Longest-queue-first greedy over backlogged links (ties by lower id).
void lqf_schedule(const QueueState& q, const AffectanceMatrixd& m, std::vector<LinkId>& out);
LinkSet lqf_schedule(const QueueState& q, const Topologyd& t, const PowerAssignmentd& p);

/// Transmitters whose received affectance from the other transmitters is
/// within the SINR threshold.
void resolve_successes(const std::vector<LinkId>& transmitters, const AffectanceMatrixd& m,
                       std::vector<LinkId>& out);
LinkSet resolve_successes(const LinkSet& transmitters, const Topologyd& t, const PowerAssignmentd& p);

/// Dyadic length classes: class r (1-based) holds lengths in
/// [2^(r-1) l_min, 2^r l_min); the top class also takes l_max.
struct LengthClasses {
  std::size_t count = 1;
  std::vector<std::size_t> class_of;
};

LengthClasses build_length_classes(const Topologyd& t);

/// Class served in `slot` (1-based): ((slot - 1) mod count) + 1.
std::size_t slot_class(std::int64_t slot, std::size_t count);

/// Only links of the slot's class may transmit, with probability
/// min(1, 2.5 m_u C) where C is the class count.
void partitioned_reflect_decide(const QueueState& q, const Eigen::VectorXd& rates, const LengthClasses& classes,
                                std::int64_t slot, DecisionStreams& rng, std::vector<LinkId>& out);

}  // namespace sinrsim

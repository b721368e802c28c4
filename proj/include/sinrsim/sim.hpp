#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sinrsim/geometry.hpp"
#include "sinrsim/sched.hpp"
#include "sinrsim/sinr.hpp"
#include "sinrsim/traffic.hpp"

namespace sinrsim {

enum class RateMode { known, estimated };

const char* to_string(RateMode m);
std::optional<RateMode> parse_rate_mode(std::string_view name);

struct SimSeeds {
  std::uint64_t topology = 1;
  std::uint64_t traffic = 2;
  std::uint64_t decisions = 3;
};

struct SimConfig {
  TopologyParamsd topology;
  PowerKind power = PowerKind::uniform;
  Algorithm algorithm = Algorithm::reflect_estimated;
  RateMode rate_mode = RateMode::known;
  ArrivalMode arrivals = ArrivalMode::independent;
  double rho = 0.0;
  std::int64_t slots = 100000;
  std::int64_t checkpoint = 10000;
  std::size_t pool_size = 64;
  SimSeeds seeds;

  /// Throws config_invalid.
  void validate() const;
};

/// Everything shared by the runs of one experiment: the links, the power
/// assignment, the affectance cache, the feasible-set pool, and the length
/// classes. Immutable and safe to share across sweep workers.
struct Scenario {
  Scenario(Topologyd t, PowerAssignmentd p, FeasibleSetPool pool_);
  Scenario(Topologyd t, PowerKind kind, std::size_t pool_size, std::uint64_t pool_seed);

  Topologyd topology;
  PowerAssignmentd power;
  AffectanceMatrixd matrix;
  FeasibleSetPool pool;
  LengthClasses classes;
};

Scenario make_scenario(const SimConfig& cfg);

/// Parameters of one closed-loop run over a fixed scenario.
struct RunSpec {
  Algorithm algorithm = Algorithm::reflect;
  RateMode rate_mode = RateMode::known;
  ArrivalMode arrivals = ArrivalMode::independent;
  double rho = 0.0;
  std::int64_t slots = 100000;
  std::int64_t checkpoint = 10000;
  std::uint64_t traffic_seed = 2;
  std::uint64_t decision_seed = 3;
  std::uint64_t run = 0;

  /// Rate mode actually used: reflect-estimated always estimates.
  RateMode effective_rate_mode() const;
};

RunSpec make_run_spec(const SimConfig& cfg, std::uint64_t run = 0);

struct Checkpoint {
  std::int64_t slot = 0;
  std::int64_t max_queue = 0;
  double mean_queue = 0.0;
  std::int64_t departures = 0;
  std::int64_t running_max_queue = 0;  // over every slot so far, not only checkpoints

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct MetricsSeries {
  std::vector<Checkpoint> checkpoints;
  std::vector<std::int64_t> final_queues;

  std::int64_t final_max_queue() const { return checkpoints.empty() ? 0 : checkpoints.back().max_queue; }

  friend bool operator==(const MetricsSeries&, const MetricsSeries&) = default;
};

/// Per-slot hook, called after departures with the transmitter and success
/// sets of the slot.
using SlotObserver = std::function<void(std::int64_t slot, const QueueState& q,
                                        const std::vector<LinkId>& transmitters,
                                        const std::vector<LinkId>& successes)>;

/// Slot loop: arrivals, decisions, success resolution, departures.
MetricsSeries run_simulation(const Scenario& s, const RunSpec& spec, const SlotObserver& observer = {});
MetricsSeries run_simulation(const SimConfig& cfg);

struct StabilityThresholds {
  double slope = 1e-3;      // packets per slot
  double final_queue = 50;  // packets
};

struct StabilityVerdict {
  bool stable = true;
  double slope = 0.0;
};

/// Least-squares slope of max queue against slot over the trailing half of
/// the checkpoints; unstable iff the slope and the final max queue both
/// exceed their thresholds.
StabilityVerdict classify_stability(const MetricsSeries& ms, const StabilityThresholds& th = {});

struct SweepPoint {
  double rho = 0.0;
  std::vector<MetricsSeries> runs;
  std::vector<StabilityVerdict> verdicts;
  double mean_final_max_queue = 0.0;
  double unstable_fraction = 0.0;
};

struct SweepResult {
  Algorithm algorithm = Algorithm::reflect;
  std::vector<SweepPoint> points;
  std::optional<double> threshold;  // first grid rho unstable in a strict majority of runs
};

/// Runs |grid| x runs independent simulations over a shared scenario. Run r
/// uses streams derived from (seed, r) at every grid point, so results do not
/// depend on `jobs`.
SweepResult sweep_rho(const Scenario& s, const RunSpec& tmpl, std::span<const double> grid, std::size_t runs,
                      std::size_t jobs = 1, const StabilityThresholds& th = {});

/// Recomputes verdicts, fractions and threshold under other thresholds.
void reclassify(SweepResult& result, const StabilityThresholds& th);

/// Inclusive grid start, start+step, ..., stop, rounded to 1e-9.
std::vector<double> make_grid(double start, double stop, double step);

struct AffectanceProbe {
  Eigen::VectorXd mean;                   // per-link mean realized affectance over the window
  Eigen::VectorXd mean_when_backlogged;   // conditioned on the link holding a packet at decision time
  std::vector<std::int64_t> backlogged_slots;
};

/// Runs `window` slots of `spec` and averages, for every link u, the capped
/// affectance that the slot's transmitters (other than u) put on u.
AffectanceProbe mean_affectance_probe(const Scenario& s, RunSpec spec, std::int64_t window);

}  // namespace sinrsim

#include "sinrsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

namespace sinrsim {

const char* to_string(RateMode m) { return m == RateMode::known ? "known" : "estimated"; }

std::optional<RateMode> parse_rate_mode(std::string_view name) {
  if (name == "known") return RateMode::known;
  if (name == "estimated") return RateMode::estimated;
  return std::nullopt;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::config_invalid, what); };
  if (!(rho >= 0.0 && rho <= 1.0)) fail("rho must lie in [0, 1]");
  if (checkpoint < 1) fail("checkpoint interval must be >= 1");
  if (slots < checkpoint) fail("slots must be >= checkpoint interval");
  if (pool_size < 1) fail("pool_size must be >= 1");
  if (topology.n < 1) fail("n must be >= 1");
  if (!(topology.side > 0)) fail("side must be positive");
  if (!(topology.lmin > 0 && topology.lmin <= topology.lmax)) fail("require 0 < lmin <= lmax");
  if (!(topology.alpha > 0) || !(topology.beta > 0) || !(topology.noise >= 0)) {
    fail("alpha and beta must be positive, noise non-negative");
  }
  if (power == PowerKind::custom) fail("custom power cannot be generated from a config");
}

Scenario::Scenario(Topologyd t, PowerAssignmentd p, FeasibleSetPool pool_)
    : topology(std::move(t)),
      power(std::move(p)),
      matrix(topology, power),
      pool(std::move(pool_)),
      classes(topology.empty() ? LengthClasses{} : build_length_classes(topology)) {}

Scenario::Scenario(Topologyd t, PowerKind kind, std::size_t pool_size, std::uint64_t pool_seed)
    : topology(std::move(t)),
      power(PowerAssignmentd::make(kind, topology)),
      matrix(topology, power),
      pool(build_pool(matrix, pool_size, pool_seed)),
      classes(topology.empty() ? LengthClasses{} : build_length_classes(topology)) {}

Scenario make_scenario(const SimConfig& cfg) {
  cfg.validate();
  return Scenario(generate_random_topology(cfg.topology, cfg.seeds.topology), cfg.power, cfg.pool_size,
                  cfg.seeds.traffic);
}

RateMode RunSpec::effective_rate_mode() const {
  if (algorithm == Algorithm::reflect_estimated) return RateMode::estimated;
  if (algorithm == Algorithm::reflect) return RateMode::known;
  return rate_mode;
}

RunSpec make_run_spec(const SimConfig& cfg, std::uint64_t run) {
  RunSpec spec;
  spec.algorithm = cfg.algorithm;
  spec.rate_mode = cfg.rate_mode;
  spec.arrivals = cfg.arrivals;
  spec.rho = cfg.rho;
  spec.slots = cfg.slots;
  spec.checkpoint = cfg.checkpoint;
  spec.traffic_seed = cfg.seeds.traffic;
  spec.decision_seed = cfg.seeds.decisions;
  spec.run = run;
  return spec;
}

MetricsSeries run_simulation(const Scenario& s, const RunSpec& spec, const SlotObserver& observer) {
  if (spec.checkpoint < 1 || spec.slots < spec.checkpoint) {
    throw Error(ErrorCode::config_invalid, "require slots >= checkpoint >= 1");
  }
  const std::size_t n = s.topology.size();
  const TrafficModel traffic(s.pool, spec.rho, n, spec.arrivals);
  Engine arrival_rng = derive_stream(spec.traffic_seed, {static_cast<std::uint64_t>(StreamTag::arrivals), spec.run});
  DecisionStreams decision_rng(spec.decision_seed, spec.run, n);

  const bool estimated = spec.effective_rate_mode() == RateMode::estimated;
  Eigen::VectorXd rates = traffic.rates();

  QueueState q(n);
  std::vector<LinkId> arrivals;
  std::vector<LinkId> transmitters;
  std::vector<LinkId> successes;
  std::int64_t total_departures = 0;
  std::int64_t running_max = 0;

  MetricsSeries ms;
  ms.checkpoints.reserve(static_cast<std::size_t>(spec.slots / spec.checkpoint) + 1);

  for (std::int64_t t = 1; t <= spec.slots; ++t) {
    traffic.sample_arrivals(arrival_rng, arrivals);
    for (auto u : arrivals) {
      q.arrive(u);
      running_max = std::max(running_max, q.queue[u]);
    }

    if (estimated && spec.algorithm != Algorithm::lqf) {
      for (LinkId u = 0; u < n; ++u) rates[static_cast<Eigen::Index>(u)] = estimate_rate(q, u, t);
    }

    switch (spec.algorithm) {
      case Algorithm::reflect:
      case Algorithm::reflect_estimated:
        reflect_decide(q, rates, decision_rng, transmitters);
        break;
      case Algorithm::reflect_partitioned:
        partitioned_reflect_decide(q, rates, s.classes, t, decision_rng, transmitters);
        break;
      case Algorithm::lqf:
        lqf_schedule(q, s.matrix, transmitters);
        break;
    }

    resolve_successes(transmitters, s.matrix, successes);
    for (auto u : successes) q.depart(u);
    total_departures += static_cast<std::int64_t>(successes.size());

    if (observer) observer(t, q, transmitters, successes);

    if (t % spec.checkpoint == 0 || t == spec.slots) {
      Checkpoint cp;
      cp.slot = t;
      cp.max_queue = n == 0 ? 0 : *std::max_element(q.queue.begin(), q.queue.end());
      cp.mean_queue = n == 0 ? 0.0
                             : static_cast<double>(std::accumulate(q.queue.begin(), q.queue.end(), std::int64_t{0})) /
                                   static_cast<double>(n);
      cp.departures = total_departures;
      cp.running_max_queue = running_max;
      ms.checkpoints.push_back(cp);
    }
  }
  ms.final_queues = q.queue;
  return ms;
}

MetricsSeries run_simulation(const SimConfig& cfg) {
  const Scenario s = make_scenario(cfg);
  return run_simulation(s, make_run_spec(cfg));
}

StabilityVerdict classify_stability(const MetricsSeries& ms, const StabilityThresholds& th) {
  const auto& cps = ms.checkpoints;
  if (cps.size() < 4) throw Error(ErrorCode::too_few_checkpoints, "need at least 4 checkpoints");
  const std::size_t tail = (cps.size() + 1) / 2;
  const std::size_t first = cps.size() - tail;

  Eigen::VectorXd x(static_cast<Eigen::Index>(tail));
  Eigen::VectorXd y(static_cast<Eigen::Index>(tail));
  for (std::size_t i = 0; i < tail; ++i) {
    x[static_cast<Eigen::Index>(i)] = static_cast<double>(cps[first + i].slot);
    y[static_cast<Eigen::Index>(i)] = static_cast<double>(cps[first + i].max_queue);
  }
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double sxx = dx.squaredNorm();

  StabilityVerdict v;
  v.slope = sxx > 0 ? dx.dot(dy) / sxx : 0.0;
  v.stable = !(v.slope > th.slope && static_cast<double>(cps.back().max_queue) > th.final_queue);
  return v;
}

void reclassify(SweepResult& result, const StabilityThresholds& th) {
  result.threshold.reset();
  for (auto& point : result.points) {
    std::size_t unstable = 0;
    for (std::size_t r = 0; r < point.runs.size(); ++r) {
      point.verdicts[r] = classify_stability(point.runs[r], th);
      if (!point.verdicts[r].stable) ++unstable;
    }
    point.unstable_fraction =
        point.runs.empty() ? 0.0 : static_cast<double>(unstable) / static_cast<double>(point.runs.size());
    if (!result.threshold && 2 * unstable > point.runs.size()) result.threshold = point.rho;
  }
}

SweepResult sweep_rho(const Scenario& s, const RunSpec& tmpl, std::span<const double> grid, std::size_t runs,
                      std::size_t jobs, const StabilityThresholds& th) {
  if (grid.empty() || runs < 1) throw Error(ErrorCode::config_invalid, "sweep needs a non-empty grid and runs >= 1");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw Error(ErrorCode::config_invalid, "grid rho must lie in [0, 1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::config_invalid, "rho grid must be increasing");
  }

  SweepResult result;
  result.algorithm = tmpl.algorithm;
  result.points.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.points[i].rho = grid[i];
    result.points[i].runs.resize(runs);
    result.points[i].verdicts.resize(runs);
  }

  const std::size_t total = grid.size() * runs;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t gi = job / runs;
      const std::size_t r = job % runs;
      RunSpec spec = tmpl;
      spec.rho = grid[gi];
      spec.run = r;
      result.points[gi].runs[r] = run_simulation(s, spec);
    }
  };

  jobs = std::clamp<std::size_t>(jobs, 1, total);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (auto& point : result.points) {
    double sum = 0;
    for (const auto& ms : point.runs) sum += static_cast<double>(ms.final_max_queue());
    point.mean_final_max_queue = sum / static_cast<double>(runs);
  }
  reclassify(result, th);
  return result;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0) || !(stop >= start)) throw Error(ErrorCode::config_invalid, "grid needs step > 0 and stop >= start");
  std::vector<double> grid;
  const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  grid.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    grid.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return grid;
}

AffectanceProbe mean_affectance_probe(const Scenario& s, RunSpec spec, std::int64_t window) {
  if (window < 1) throw Error(ErrorCode::invalid_parameter, "probe window must be >= 1");
  spec.slots = window;
  spec.checkpoint = window;
  const auto n = static_cast<Eigen::Index>(s.topology.size());

  AffectanceProbe probe;
  probe.mean = Eigen::VectorXd::Zero(n);
  probe.mean_when_backlogged = Eigen::VectorXd::Zero(n);
  probe.backlogged_slots.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd slot_affectance(n);
  std::vector<char> succeeded(static_cast<std::size_t>(n), 0);

  run_simulation(s, spec, [&](std::int64_t, const QueueState& q, const std::vector<LinkId>& tx,
                              const std::vector<LinkId>& ok) {
    slot_affectance.setZero();
    for (auto v : tx) slot_affectance += s.matrix.capped().row(static_cast<Eigen::Index>(v)).transpose();
    probe.mean += slot_affectance;
    for (auto u : ok) succeeded[u] = 1;
    for (Eigen::Index u = 0; u < n; ++u) {
      const auto uu = static_cast<std::size_t>(u);
      if (q.queue[uu] > 0 || succeeded[uu]) {
        probe.mean_when_backlogged[u] += slot_affectance[u];
        ++probe.backlogged_slots[uu];
      }
    }
    for (auto u : ok) succeeded[u] = 0;
  });

  probe.mean /= static_cast<double>(window);
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto count = probe.backlogged_slots[static_cast<std::size_t>(u)];
    if (count > 0) probe.mean_when_backlogged[u] /= static_cast<double>(count);
  }
  return probe;
}

}  // namespace sinrsim

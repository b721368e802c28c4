#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sinrsim/sim.hpp"

using namespace sinrsim;

namespace {

Scenario small_scenario(std::size_t n = 30, std::uint64_t seed = 4) {
  TopologyParamsd params;
  params.n = n;
  params.side = 60;
  return Scenario(generate_random_topology(params, seed), PowerKind::uniform, 16, seed);
}

Scenario single_link() {
  Topologyd t({Linkd{0, Point2d(0, 0), Point2d(1, 0)}}, 2.5, 1.0, 0.0);
  return Scenario(t, PowerKind::uniform, 4, 1);
}

RunSpec spec_for(Algorithm a, double rho, std::int64_t slots = 20000, std::int64_t checkpoint = 2000) {
  RunSpec spec;
  spec.algorithm = a;
  spec.rho = rho;
  spec.slots = slots;
  spec.checkpoint = checkpoint;
  return spec;
}

MetricsSeries series(std::initializer_list<std::int64_t> max_queues, std::int64_t step = 10000) {
  MetricsSeries ms;
  std::int64_t slot = 0;
  for (auto q : max_queues) ms.checkpoints.push_back(Checkpoint{slot += step, q, 0.0, 0, q});
  return ms;
}

const Algorithm kAll[] = {Algorithm::reflect, Algorithm::reflect_estimated, Algorithm::reflect_partitioned,
                          Algorithm::lqf};

}  // namespace

TEST_CASE("rho = 0 leaves every queue empty") {
  const auto s = small_scenario();
  for (auto a : kAll) {
    const auto ms = run_simulation(s, spec_for(a, 0.0));
    REQUIRE(ms.checkpoints.size() == 10);
    for (const auto& cp : ms.checkpoints) {
      CHECK(cp.max_queue == 0);
      CHECK(cp.departures == 0);
      CHECK(cp.running_max_queue == 0);
    }
  }
}

TEST_CASE("a lone link under full load stays bounded") {
  const auto s = single_link();
  for (auto a : kAll) {
    const auto ms = run_simulation(s, spec_for(a, 1.0));
    // The link always transmits once backlogged and always succeeds.
    CHECK(ms.final_max_queue() == 0);
    CHECK(ms.checkpoints.back().running_max_queue == 1);
    CHECK(ms.checkpoints.back().departures == 20000);
  }
}

TEST_CASE("checkpoints land on multiples and on the last slot") {
  const auto s = single_link();
  const auto ms = run_simulation(s, spec_for(Algorithm::reflect, 0.5, 2500, 1000));
  REQUIRE(ms.checkpoints.size() == 3);
  CHECK(ms.checkpoints[0].slot == 1000);
  CHECK(ms.checkpoints[2].slot == 2500);
  CHECK_THROWS_AS(run_simulation(s, spec_for(Algorithm::reflect, 0.5, 10, 20)), Error);
}

TEST_CASE("packets are conserved and successes obey the SINR test") {
  const auto s = small_scenario();
  for (auto a : kAll) {
    std::vector<std::int64_t> prev_arrivals(s.topology.size(), 0), prev_departures(s.topology.size(), 0);
    std::int64_t successes_seen = 0;
    const auto ms = run_simulation(s, spec_for(a, 0.4, 5000, 1000),
                                   [&](std::int64_t, const QueueState& q, const std::vector<LinkId>& tx,
                                       const std::vector<LinkId>& ok) {
                                     for (LinkId u = 0; u < q.size(); ++u) {
                                       REQUIRE(q.queue[u] >= 0);
                                       REQUIRE(q.queue[u] == q.arrivals[u] - q.departures[u]);
                                       REQUIRE(q.departures[u] - prev_departures[u] <= 1);
                                       prev_arrivals[u] = q.arrivals[u];
                                       prev_departures[u] = q.departures[u];
                                     }
                                     for (auto u : ok) {
                                       REQUIRE(std::find(tx.begin(), tx.end(), u) != tx.end());
                                       REQUIRE(s.matrix.raw_load(tx, u) <= 1.0 + kAffectanceEps);
                                     }
                                     if (a == Algorithm::lqf) REQUIRE(ok.size() == tx.size());
                                     successes_seen += static_cast<std::int64_t>(ok.size());
                                   });
    CHECK(ms.checkpoints.back().departures == successes_seen);
    const auto left = std::accumulate(ms.final_queues.begin(), ms.final_queues.end(), std::int64_t{0});
    const auto in = std::accumulate(prev_arrivals.begin(), prev_arrivals.end(), std::int64_t{0});
    CHECK(in - successes_seen == left);
  }
}

TEST_CASE("same seeds reproduce a run exactly; other seeds differ") {
  const auto s = small_scenario();
  auto spec = spec_for(Algorithm::reflect_estimated, 0.3);
  const auto a = run_simulation(s, spec);
  CHECK(run_simulation(s, spec) == a);
  spec.run = 1;
  CHECK_FALSE(run_simulation(s, spec) == a);
}

TEST_CASE("reflect-estimated ignores the configured rate mode") {
  RunSpec spec = spec_for(Algorithm::reflect_estimated, 0.2);
  spec.rate_mode = RateMode::known;
  CHECK(spec.effective_rate_mode() == RateMode::estimated);
  spec.algorithm = Algorithm::reflect;
  CHECK(spec.effective_rate_mode() == RateMode::known);
}

TEST_CASE("classify_stability") {
  CHECK(classify_stability(series({0, 0, 0, 0, 0, 0})).stable);
  CHECK(classify_stability(series({5, 6, 5, 7, 6, 5})).stable);

  const auto growing = series({100, 200, 300, 400, 500, 600, 700, 800, 900, 1000});
  const auto v = classify_stability(growing);
  CHECK_FALSE(v.stable);
  CHECK(v.slope == doctest::Approx(0.01));

  // Steep but small: the final-queue guard keeps it stable.
  CHECK(classify_stability(series({0, 0, 10, 20, 30, 40})).stable);
  // Large but flat tail.
  CHECK(classify_stability(series({900, 1000, 1000, 1000, 1000, 1000})).stable);

  // Odd count: tail is the last ceil(n/2) = 3 checkpoints.
  CHECK(classify_stability(series({0, 0, 100, 200, 300})).slope == doctest::Approx(0.01));

  try {
    classify_stability(series({1, 2, 3}));
    FAIL("expected too-few-checkpoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::too_few_checkpoints);
  }
}

TEST_CASE("sweep_rho") {
  const auto s = small_scenario(20, 6);
  const auto tmpl = spec_for(Algorithm::reflect, 0.0, 8000, 1000);
  const std::vector<double> grid{0.0, 0.2, 0.9};

  const auto serial = sweep_rho(s, tmpl, grid, 3, 1);
  const auto parallel = sweep_rho(s, tmpl, grid, 3, 4);
  REQUIRE(serial.points.size() == 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(serial.points[i].runs == parallel.points[i].runs);
    CHECK(serial.points[i].mean_final_max_queue == parallel.points[i].mean_final_max_queue);
  }
  CHECK(serial.threshold == parallel.threshold);

  // Run r sees the same streams as a standalone run with run = r.
  auto standalone = tmpl;
  standalone.rho = 0.2;
  standalone.run = 2;
  CHECK(serial.points[1].runs[2] == run_simulation(s, standalone));

  const std::vector<double> zero{0.0};
  const auto idle = sweep_rho(s, tmpl, zero, 2);
  CHECK_FALSE(idle.threshold.has_value());
  CHECK(idle.points[0].mean_final_max_queue == 0.0);

  const std::vector<double> unsorted{0.2, 0.1};
  CHECK_THROWS_AS(sweep_rho(s, tmpl, unsorted, 1), Error);
  const std::vector<double> outside{1.2};
  CHECK_THROWS_AS(sweep_rho(s, tmpl, outside, 1), Error);
  CHECK_THROWS_AS(sweep_rho(s, tmpl, grid, 0), Error);
}

TEST_CASE("reclassify with looser thresholds never adds instability") {
  const auto s = small_scenario(20, 6);
  const std::vector<double> grid{0.3, 0.6, 0.9};
  auto result = sweep_rho(s, spec_for(Algorithm::reflect, 0.0, 8000, 1000), grid, 2);
  auto loose = result;
  reclassify(loose, StabilityThresholds{2e-3, 100});
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(loose.points[i].unstable_fraction <= result.points[i].unstable_fraction);
}

TEST_CASE("make_grid") {
  const auto g = make_grid(0.01, 0.6, 0.01);
  REQUIRE(g.size() == 60);
  CHECK(g.front() == 0.01);
  CHECK(g[29] == 0.3);
  CHECK(g.back() == 0.6);
  CHECK(make_grid(0.5, 0.5, 0.1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(make_grid(0.5, 0.1, 0.1), Error);
  CHECK_THROWS_AS(make_grid(0.1, 0.5, 0.0), Error);
}

TEST_CASE("mean_affectance_probe") {
  SUBCASE("no traffic, no affectance") {
    const auto s = small_scenario();
    const auto probe = mean_affectance_probe(s, spec_for(Algorithm::reflect, 0.0), 2000);
    CHECK(probe.mean.isZero());
    CHECK(probe.mean_when_backlogged.isZero());
  }

  SUBCASE("a lone link receives none") {
    const auto probe = mean_affectance_probe(single_link(), spec_for(Algorithm::reflect, 1.0), 2000);
    CHECK(probe.mean[0] == 0.0);
    CHECK(probe.backlogged_slots[0] == 2000);
  }

  SUBCASE("equi-length topology at the guaranteed load stays under 5/12") {
    TopologyParamsd params;
    params.n = 60;
    params.lmin = params.lmax = 5;
    const Scenario s(generate_random_topology(params, 2), PowerKind::uniform, 32, 2);
    const double rho = proven_stable_rho(s.topology, s.power);
    const auto probe = mean_affectance_probe(s, spec_for(Algorithm::reflect, rho), 20000);
    CHECK(probe.mean.maxCoeff() <= 5.0 / 12.0);
  }
}

TEST_CASE("SimConfig validation") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.rho = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.rho = 0.2;
  cfg.checkpoint = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.checkpoint = 10;
  cfg.topology.n = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

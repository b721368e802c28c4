#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sinrsim/sinr.hpp"
#include "sinrsim/traffic.hpp"

using namespace sinrsim;

namespace {

struct L {
  double sx, sy, rx, ry;
};

Topologyd make_topology(std::initializer_list<L> ls, double alpha = 2.5, double beta = 1.0, double noise = 0.0) {
  std::vector<Linkd> links;
  for (const auto& l : ls) links.push_back(Linkd{links.size(), Point2d(l.sx, l.sy), Point2d(l.rx, l.ry)});
  return Topologyd(std::move(links), alpha, beta, noise);
}

PowerAssignmentd uniform(const Topologyd& t) { return PowerAssignmentd::make(PowerKind::uniform, t); }

std::vector<LinkId> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<LinkId> order(n);
  std::iota(order.begin(), order.end(), LinkId{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

}  // namespace

TEST_CASE("c_factor") {
  CHECK(c_factor(2.5, 1.0, 0.0, 3.0, 1.0) == 1.0);
  // beta*N*l^a/P = 1/2 exactly: the boundary of the noise assumption.
  CHECK(c_factor(2.0, 1.0, 0.5, 1.0, 1.0) == 2.0);
  CHECK(c_factor(2.0, 2.0, 0.25, 1.0, 1.0) == 4.0);

  try {
    c_factor(2.0, 1.0, 0.6, 1.0, 1.0);
    FAIL("expected assumption-violated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::assumption_violated);
  }
  CHECK_THROWS_AS(c_factor(2.0, 1.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(c_factor(2.0, 1.0, 2.0, 1.0, 1.0), Error);

  const auto t = make_topology({{0, 0, 1, 0}}, 2.0, 1.0, 0.6);
  const auto p = uniform(t);
  CHECK_FALSE(p.satisfies_noise_assumption());
  CHECK_THROWS_AS(c_factor(t, p, 0), Error);
  CHECK_THROWS_AS(AffectanceMatrixd(t, p), Error);
}

TEST_CASE("power assignments") {
  TopologyParamsd params;
  params.n = 60;
  const auto t = generate_random_topology(params, 5);
  for (auto kind : {PowerKind::uniform, PowerKind::linear, PowerKind::mean}) {
    const auto p = PowerAssignmentd::make(kind, t);
    CHECK(p.in_theory_class());
    CHECK(p.powers().minCoeff() > 0);
    CHECK(is_length_monotone(t, p));
    CHECK(is_sublinear(t, p));
    CHECK(p.satisfies_noise_assumption());
  }
  CHECK(PowerAssignmentd::make(PowerKind::linear, t)[3] == doctest::Approx(std::pow(t.length(3), 2.5)));
  CHECK(PowerAssignmentd::make(PowerKind::mean, t)[3] == doctest::Approx(std::pow(t.length(3), 1.25)));

  const auto custom = PowerAssignmentd::custom(t, Eigen::VectorXd::Ones(60));
  CHECK_FALSE(custom.in_theory_class());
  CHECK_THROWS_AS(PowerAssignmentd::custom(t, Eigen::VectorXd::Ones(3)), Error);
  CHECK_THROWS_AS(PowerAssignmentd::custom(t, Eigen::VectorXd::Zero(60)), Error);

  // Decreasing power in length breaks monotonicity.
  Eigen::VectorXd inverse = t.lengths().cwiseInverse();
  CHECK_FALSE(is_length_monotone(t, PowerAssignmentd::custom(t, inverse)));
  CHECK(to_string(PowerKind::mean) == std::string("mean"));
  CHECK(parse_power_kind("linear") == PowerKind::linear);
  CHECK_FALSE(parse_power_kind("quadratic").has_value());
}

TEST_CASE("affectance") {
  // u: length 1; v's sender 2 away from u's receiver.
  const auto t = make_topology({{0, 0, 1, 0}, {1, 2, 1, 5}, {1, 0.5, 4, 0.5}});
  const auto p = uniform(t);
  CHECK(affectance(t, p, 0, 0) == 0.0);
  CHECK(affectance(t, p, 1, 0) == doctest::Approx(0.1767766952966369).epsilon(1e-14));
  // v's sender 0.5 from u's receiver: (1/0.5)^2.5 > 1, capped.
  CHECK(raw_affectance(t, p, 2, 0) > 1.0);
  CHECK(affectance(t, p, 2, 0) == 1.0);

  SUBCASE("cap boundary is exact") {
    // d_vu = l_u * (c_u P_v / P_u)^(1/alpha) = l_u with uniform power, beta = 1.
    const auto b = make_topology({{0, 0, 2, 0}, {2, 2, 2, 9}});
    CHECK(affectance(b, uniform(b), 1, 0) == 1.0);
  }

  SUBCASE("bounded in [0, 1] on random instances") {
    TopologyParamsd params;
    params.n = 80;
    const auto r = generate_random_topology(params, 11);
    for (auto kind : {PowerKind::uniform, PowerKind::linear, PowerKind::mean}) {
      const auto pr = PowerAssignmentd::make(kind, r);
      const AffectanceMatrixd m(r, pr);
      CHECK(m.capped().minCoeff() >= 0.0);
      CHECK(m.capped().maxCoeff() <= 1.0);
      CHECK(m.capped().diagonal().isZero());
      for (LinkId v = 0; v < 80; v += 7)
        for (LinkId u = 0; u < 80; u += 5) CHECK(m.capped(v, u) == affectance(r, pr, v, u));
    }
  }
}

TEST_CASE("total_affectance") {
  const auto t = make_topology({{0, 0, 1, 0}, {1, 2, 1, 5}, {4, 0, 4, 1}, {-3, 0, -3, -1}});
  const auto p = uniform(t);
  CHECK(total_affectance(t, p, LinkSet{}, 0) == 0.0);
  CHECK(total_affectance(t, p, LinkSet{0}, 0) == 0.0);

  // Direct summation of the definition for the three interferers of link 0.
  const double expected = std::pow(1.0 / 2.0, 2.5) + std::pow(1.0 / 3.0, 2.5) + std::pow(1.0 / 4.0, 2.5);
  CHECK(total_affectance(t, p, LinkSet{0, 1, 2, 3}, 0) == doctest::Approx(expected).epsilon(1e-14));

  SUBCASE("monotone under inclusion") {
    TopologyParamsd params;
    params.n = 40;
    const auto r = generate_random_topology(params, 3);
    const auto pr = uniform(r);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
      auto order = shuffled(40, rng);
      LinkSet small(std::vector<LinkId>(order.begin(), order.begin() + 5));
      LinkSet big(std::vector<LinkId>(order.begin(), order.begin() + 12));
      for (LinkId u = 0; u < 40; ++u) {
        REQUIRE(total_affectance(r, pr, small, u) <= total_affectance(r, pr, big, u));
      }
    }
  }
}

TEST_CASE("is_delta_signal") {
  const auto single = make_topology({{0, 0, 1, 0}});
  for (double delta : {1.0, 2.0, 100.0}) CHECK(is_delta_signal(single, uniform(single), LinkSet{0}, delta));
  CHECK_THROWS_AS(is_delta_signal(single, uniform(single), LinkSet{0}, 0.5), Error);

  // Co-located identical links: each pair term is exactly 1.
  const auto two = make_topology({{0, 0, 1, 0}, {0, 0, 1, 0}});
  CHECK(is_feasible(two, uniform(two), LinkSet{0, 1}));
  const auto three = make_topology({{0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}});
  CHECK(total_affectance(three, uniform(three), LinkSet{0, 1, 2}, 0) == 2.0);
  CHECK_FALSE(is_feasible(three, uniform(three), LinkSet{0, 1, 2}));

  SUBCASE("a lone saturated interferer is infeasible") {
    // v's sender sits 0.1 from u's receiver; u barely reaches v's receiver.
    const auto t = make_topology({{0, 0, 1, 0}, {0.9, 0, 0.9, 10}});
    const auto p = uniform(t);
    const LinkSet s{0, 1};
    CHECK(total_affectance(t, p, s, 0) == 1.0);
    CHECK(total_affectance(t, p, s, 1) < 1.0);
    CHECK_FALSE(check_sinr_direct(t, p, s, 0));
    CHECK_FALSE(is_feasible(t, p, s));
    CHECK_FALSE(oracle::feasible(t, p, 0b11));
  }

  SUBCASE("feasible sets need not be 2-signal") {
    TopologyParamsd params;
    params.n = 100;
    const auto t = generate_random_topology(params, 21);
    const auto p = uniform(t);
    const AffectanceMatrixd m(t, p);
    std::mt19937_64 rng(2);
    bool found = false;
    for (int i = 0; i < 50 && !found; ++i) {
      const auto s = greedy_maximal_feasible(m, shuffled(100, rng));
      REQUIRE(is_feasible(t, p, s));
      found = !is_delta_signal(t, p, s, 2.0);
    }
    CHECK(found);
  }
}

TEST_CASE("check_sinr_direct") {
  const auto t = make_topology({{0, 0, 1, 0}, {1, 2, 1, 5}});
  CHECK(check_sinr_direct(t, uniform(t), LinkSet{0}, 0));

  // P/l^a = beta*N exactly: SINR sits on the threshold.
  const auto edge = make_topology({{0, 0, 2, 0}}, 2.0, 1.0, 0.25);
  const auto p = uniform(edge);
  CHECK_FALSE(p.satisfies_noise_assumption());
  CHECK(check_sinr_direct(edge, p, LinkSet{0}, 0));

  // Uncapped affectance of 2^2.5 > 1 from a sender 0.5 away.
  const auto close = make_topology({{0, 0, 1, 0}, {1, 0.5, 9, 9}});
  CHECK(raw_affectance(close, uniform(close), 1, 0) >= 1.0);
  CHECK_FALSE(check_sinr_direct(close, uniform(close), LinkSet{0, 1}, 0));
}

TEST_CASE("sinr-direct and affectance tests agree off the boundary") {
  std::mt19937_64 rng(99);
  std::size_t compared = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    TopologyParamsd params;
    params.n = 50;
    params.noise = seed % 2 ? 0.0 : 1e-5;
    const auto t = generate_random_topology(params, seed);
    for (auto kind : {PowerKind::uniform, PowerKind::linear, PowerKind::mean}) {
      const auto p = PowerAssignmentd::make(kind, t);
      REQUIRE(p.satisfies_noise_assumption());
      for (int i = 0; i < 200; ++i) {
        auto order = shuffled(50, rng);
        const std::size_t k = 1 + rng() % 10;
        const LinkSet s(std::vector<LinkId>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)));
        const LinkId u = s.ids()[rng() % k];
        const double sum = total_affectance(t, p, s, u);
        if (std::abs(sum - 1.0) <= kAffectanceEps) continue;
        ++compared;
        REQUIRE(check_sinr_direct(t, p, s, u) == (sum <= 1.0));
      }
    }
  }
  CHECK(compared > 10000);
}

TEST_CASE("strengthen_decompose") {
  const auto single = make_topology({{0, 0, 1, 0}});
  CHECK(strengthen_decompose(single, uniform(single), LinkSet{0}, 3.0).size() == 1);

  // Far apart: already a 3^alpha-signal set.
  const auto far = make_topology({{0, 0, 1, 0}, {500, 0, 501, 0}, {0, 500, 1, 500}});
  CHECK(strengthen_decompose(far, uniform(far), LinkSet{0, 1, 2}, 3.0).size() == 1);

  const auto three = make_topology({{0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}});
  try {
    strengthen_decompose(three, uniform(three), LinkSet{0, 1, 2}, 3.0);
    FAIL("expected infeasible-input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible_input);
  }

  SUBCASE("random feasible 50-link sets") {
    TopologyParamsd params;
    params.n = 400;
    params.side = 1000;
    params.lmax = 5;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto t = generate_random_topology(params, seed);
      for (auto kind : {PowerKind::uniform, PowerKind::linear, PowerKind::mean}) {
        const auto p = PowerAssignmentd::make(kind, t);
        const AffectanceMatrixd m(t, p);
        std::mt19937_64 rng(seed);
        const auto maximal = greedy_maximal_feasible(m, shuffled(400, rng));
        REQUIRE(maximal.size() >= 50);
        const LinkSet s(std::vector<LinkId>(maximal.begin(), maximal.begin() + 50));
        for (double q : {2.0, 3.0}) {
          const auto parts = strengthen_decompose(t, p, s, q);
          CHECK(parts.size() <= strengthen_part_bound(2.5, 1.0, q));
          std::vector<LinkId> joined;
          for (const auto& part : parts) {
            CHECK(is_delta_signal(t, p, part, std::pow(q, 2.5)));
            joined.insert(joined.end(), part.begin(), part.end());
          }
          std::sort(joined.begin(), joined.end());
          CHECK(joined == s.ids());
        }
      }
    }
  }
}

TEST_CASE("check_separation") {
  const auto same = make_topology({{0, 0, 1, 0}, {0, 0, 1, 0}});
  CHECK(check_separation(same, 0, 1, 1.0));
  CHECK_FALSE(check_separation(same, 0, 1, 2.0));
  const auto far = make_topology({{0, 0, 1, 0}, {100, 0, 101, 0}});
  CHECK(check_separation(far, 0, 1, 3.0));
}

TEST_CASE("separation holds in random q^alpha-signal sets") {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TopologyParamsd params;
    params.n = 120;
    const auto t = generate_random_topology(params, seed);
    for (auto kind : {PowerKind::uniform, PowerKind::linear, PowerKind::mean}) {
      const auto p = PowerAssignmentd::make(kind, t);
      const AffectanceMatrixd m(t, p);
      for (double q : {1.0, 2.0, 3.0}) {
        const auto s = greedy_signal_set(m, shuffled(120, rng), std::pow(q, 2.5));
        REQUIRE(is_delta_signal(t, p, s, std::pow(q, 2.5)));
        CHECK_FALSE(find_separation_violation(t, s, q).has_value());
      }
    }
  }
}

TEST_CASE("max_set_affectance_bound") {
  const auto eq2 = make_topology({{0, 0, 1, 0}, {9, 9, 9, 10}}, 2.0);
  CHECK(max_set_affectance_bound(eq2, uniform(eq2)) == doctest::Approx(27.0).epsilon(1e-14));
  const auto eq = make_topology({{0, 0, 1, 0}, {9, 9, 9, 10}});
  CHECK(max_set_affectance_bound(eq, uniform(eq)) == doctest::Approx(46.76537180435969).epsilon(1e-13));
  const auto wide = make_topology({{0, 0, 1, 0}, {50, 50, 50, 70}});
  CHECK(max_set_affectance_bound(wide, uniform(wide)) == doctest::Approx(83656.4402780802).epsilon(1e-13));
  CHECK(max_set_affectance_bound(wide, PowerAssignmentd::make(PowerKind::linear, wide)) ==
        doctest::Approx(46.76537180435969).epsilon(1e-13));
  CHECK(strengthen_part_bound(2.5, 1.0, 3.0) == 1024);
}

TEST_CASE("signal ratio is bounded by Delta^alpha, and is 1 under linear power") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TopologyParamsd params;
    params.n = 50;
    const auto t = generate_random_topology(params, seed);
    const double ceiling = std::pow(length_diversity(t), 2.5);
    CHECK(max_signal_ratio(t, uniform(t)) <= ceiling * (1 + 1e-12));
    CHECK(max_signal_ratio(t, PowerAssignmentd::make(PowerKind::mean, t)) <= ceiling * (1 + 1e-12));
    CHECK(max_signal_ratio(t, PowerAssignmentd::make(PowerKind::linear, t)) == 1.0);
  }
}

TEST_CASE("set affectance checker") {
  TopologyParamsd params;
  params.n = 60;
  const auto t = generate_random_topology(params, 8);
  const auto p = uniform(t);
  const AffectanceMatrixd m(t, p);
  std::mt19937_64 rng(8);
  const auto s = greedy_maximal_feasible(m, shuffled(60, rng));
  for (LinkId v = 0; v < 60; ++v) {
    const auto sample = check_set_affectance(t, p, s, v);
    CHECK(sample.holds);
    CHECK(sample.total == doctest::Approx(m.capped_load(s, v)));
  }
  CHECK(set_affectance_product_bound(2.5, 1.0, 1.0) == doctest::Approx(1024 * (1 + 2 * std::pow(3.0, 2.5))));

  const auto three = make_topology({{0, 0, 1, 0}, {0, 0, 1, 0}, {0, 0, 1, 0}});
  try {
    check_set_affectance(three, uniform(three), LinkSet{0, 1, 2}, 0);
    FAIL("expected infeasible-input");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible_input);
  }
}

TEST_CASE("matrix feasibility matches the free functions") {
  TopologyParamsd params;
  params.n = 40;
  const auto t = generate_random_topology(params, 12);
  const auto p = PowerAssignmentd::make(PowerKind::mean, t);
  const AffectanceMatrixd m(t, p);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    auto order = shuffled(40, rng);
    const LinkSet s(std::vector<LinkId>(order.begin(), order.begin() + 1 + static_cast<std::ptrdiff_t>(rng() % 8)));
    CHECK(m.is_feasible(s) == is_feasible(t, p, s));
    CHECK(m.is_delta_signal(s, 3.0) == is_delta_signal(t, p, s, 3.0));
  }
}

TEST_CASE("LinkSet") {
  LinkSet s{3, 1, 2};
  CHECK(s.ids() == std::vector<LinkId>{1, 2, 3});
  CHECK(s.contains(2));
  s.insert(0);
  s.insert(2);
  CHECK(s.size() == 4);
  CHECK(s.without(2).ids() == std::vector<LinkId>{0, 1, 3});
  CHECK_THROWS_AS(LinkSet({1, 1}), Error);
}

#include "sinrsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sinrsim/io.hpp"
#include "sinrsim/traffic.hpp"

namespace sinrsim {

namespace fs = std::filesystem;

Scenario load_scenario(const Experiment& e) {
  const SimConfig cfg = e.sim_config(e.algorithms.front());
  Topologyd topology = e.topology_file ? io::topology_from_json(io::read_json_file(*e.topology_file))
                                       : generate_random_topology(cfg.topology, cfg.seeds.topology);
  if (e.pool_file) {
    auto pool = io::pool_from_json(io::read_json_file(*e.pool_file), topology.size());
    auto power = PowerAssignmentd::make(cfg.power, topology);
    return Scenario(std::move(topology), std::move(power), std::move(pool));
  }
  return Scenario(std::move(topology), cfg.power, cfg.pool_size, cfg.seeds.traffic);
}

namespace {

std::string dump(const io::Json& j) { return j.dump(2) + "\n"; }

template <typename Writer, typename Value>
std::string render(Writer writer, const Value& v) {
  std::ostringstream os;
  writer(os, v);
  return os.str();
}

void write_manifest(const Manifest& m) { io::write_text_file(m.output_dir / "manifest.json", dump(manifest_to_json(m))); }

void write_scenario(const Manifest& m, const Scenario& s) {
  io::write_text_file(m.output_dir / "topology.json", dump(io::topology_to_json(s.topology)));
  io::write_text_file(m.output_dir / "pool.json", dump(io::pool_to_json(s.pool)));
}

}  // namespace

void generate_command(const Manifest& m, std::ostream& log) {
  write_manifest(m);
  const Scenario s = load_scenario(m.experiment);
  write_scenario(m, s);
  fmt::print(log, "generated {} links (Delta {:.4g}), pool of {} maximal feasible sets in {}\n", s.topology.size(),
             length_diversity(s.topology), s.pool.sets.size(), m.output_dir.string());
}

std::vector<SweepResult> run_command(const Manifest& m, std::size_t jobs, std::ostream& log) {
  const Experiment& e = m.experiment;
  write_manifest(m);
  const Scenario s = load_scenario(e);
  write_scenario(m, s);

  const std::vector<double> grid = m.command == "run" ? std::vector<double>{e.base.rho} : e.grid;
  std::vector<SweepResult> results;
  for (auto algo : e.algorithms) {
    const RunSpec tmpl = make_run_spec(e.sim_config(algo));
    results.push_back(sweep_rho(s, tmpl, grid, e.runs, jobs, e.thresholds));
    const SweepResult& r = results.back();

    const fs::path dir = m.output_dir / to_string(algo);
    io::write_text_file(dir / "runs.csv", render(io::write_sweep_runs_csv, r));
    io::write_text_file(dir / "summary.csv", render(io::write_sweep_summary_csv, r));
    for (const auto& point : r.points) {
      for (std::size_t run = 0; run < point.runs.size(); ++run) {
        const std::string stem = fmt::format("rho_{}_run_{}", point.rho, run);
        io::write_text_file(dir / "metrics" / (stem + ".csv"), render(io::write_metrics_csv, point.runs[run]));
        io::write_text_file(dir / "metrics" / (stem + "_running_max.csv"),
                            render(io::write_running_max_csv, point.runs[run]));
      }
    }
    if (r.threshold) {
      fmt::print(log, "{}: instability threshold rho* = {}\n", to_string(algo), *r.threshold);
    } else {
      fmt::print(log, "{}: stable at every grid point\n", to_string(algo));
    }
  }
  std::ostringstream svg;
  io::write_sweep_svg(svg, results);
  io::write_text_file(m.output_dir / "plot.svg", svg.str());
  return results;
}

// ---------------------------------------------------------------------------
// Property verification

std::vector<PropertyCheck> verify_properties(const Scenario& s, const VerifyOptions& opt) {
  const auto& t = s.topology;
  const auto& p = s.power;
  const std::size_t n = t.size();
  const double diversity = length_diversity(t);
  Engine rng = derive_stream(opt.seed, {0x7665726966ULL});
  std::vector<LinkId> order(n);
  auto shuffled = [&]() -> const std::vector<LinkId>& {
    std::iota(order.begin(), order.end(), LinkId{0});
    std::shuffle(order.begin(), order.end(), rng);
    return order;
  };

  std::vector<PropertyCheck> checks;

  {
    PropertyCheck c{"power-class (length-monotone, sublinear)", n * n, 0, ""};
    if (!p.in_theory_class()) {
      c.detail = "custom power: class not assumed";
    } else if (!is_length_monotone(t, p) || !is_sublinear(t, p)) {
      c.violations = 1;
    }
    checks.push_back(c);
  }

  {
    const double ratio = max_signal_ratio(t, p);
    const double ceiling = std::pow(diversity, t.alpha());
    PropertyCheck c{"signal ratio <= Delta^alpha", n * n, 0, ""};
    c.violations = ratio <= ceiling * (1 + 1e-9) ? 0 : 1;
    c.detail = fmt::format("max ratio {} vs Delta^alpha {}", ratio, ceiling);
    checks.push_back(c);
  }

  {
    PropertyCheck c{"pairwise separation in q^alpha-signal sets", 0, 0, ""};
    std::size_t pairs = 0;
    for (double q : {1.0, 2.0, 3.0}) {
      const double delta = std::pow(q, t.alpha());
      for (std::size_t i = 0; i < opt.signal_sets_per_q; ++i) {
        const LinkSet set = greedy_signal_set(s.matrix, shuffled(), delta);
        ++c.samples;
        if (!is_delta_signal(t, p, set, delta)) {
          ++c.violations;
          continue;
        }
        pairs += set.size() * (set.size() - 1) / 2;
        if (find_separation_violation(t, set, q)) ++c.violations;
      }
    }
    c.detail = fmt::format("{} pairs checked, q in {{1, 2, 3}}", pairs);
    checks.push_back(c);
  }

  auto set_affectance_check = [&](bool delta_free) {
    PropertyCheck c{delta_free ? "set affectance product bound, Delta-free (linear power)"
                               : "set affectance product bound",
                    0, 0, ""};
    const double stated = max_set_affectance_bound(t, p);
    double worst_total = 0;
    std::uniform_int_distribution<LinkId> pick(0, n - 1);
    for (std::size_t i = 0; i < opt.set_affectance_samples; ++i) {
      const LinkSet set = i < s.pool.sets.size() ? s.pool.sets[i] : greedy_maximal_feasible(s.matrix, shuffled());
      const auto sample = check_set_affectance(t, p, set, pick(rng), delta_free);
      ++c.samples;
      if (!sample.holds) ++c.violations;
      worst_total = std::max(worst_total, sample.total);
    }
    c.detail = fmt::format("max total {} (kappa*Delta^alpha = {})", worst_total, stated);
    checks.push_back(c);
  };
  set_affectance_check(false);
  if (p.kind() == PowerKind::linear) set_affectance_check(true);

  {
    PropertyCheck c{"sinr-direct agrees with affectance test off the boundary", 0, 0, ""};
    std::size_t skipped = 0;
    const std::size_t max_size = std::min<std::size_t>(n, 12);
    std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
    for (std::size_t i = 0; i < opt.equivalence_samples; ++i) {
      const auto& o = shuffled();
      const LinkSet set(std::vector<LinkId>(o.begin(), o.begin() + static_cast<std::ptrdiff_t>(size_dist(rng))));
      const LinkId u = set.ids()[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng)];
      const double sum = total_affectance(t, p, set, u);
      if (std::abs(sum - 1.0) <= kAffectanceEps) {
        ++skipped;
        continue;
      }
      ++c.samples;
      if (check_sinr_direct(t, p, set, u) != (sum <= 1.0)) ++c.violations;
    }
    c.detail = fmt::format("{} boundary instances skipped", skipped);
    checks.push_back(c);
  }

  {
    PropertyCheck c{"signal-strengthening decomposition (q = 3)", 0, 0, ""};
    const double delta = std::pow(3.0, t.alpha());
    const std::size_t bound = strengthen_part_bound(t.alpha(), t.beta(), 3.0);
    std::size_t max_parts = 0;
    for (const auto& set : s.pool.sets) {
      const auto parts = strengthen_decompose(t, p, set, 3.0);
      ++c.samples;
      std::vector<LinkId> joined;
      bool ok = parts.size() <= bound;
      for (const auto& part : parts) {
        ok = ok && is_delta_signal(t, p, part, delta);
        joined.insert(joined.end(), part.begin(), part.end());
      }
      std::sort(joined.begin(), joined.end());
      ok = ok && joined == set.ids();
      if (!ok) ++c.violations;
      max_parts = std::max(max_parts, parts.size());
    }
    c.detail = fmt::format("max parts {} (ceiling {})", max_parts, bound);
    checks.push_back(c);
  }

  {
    PropertyCheck c{"pool sets feasible and maximal", 0, 0, ""};
    for (const auto& set : s.pool.sets) {
      ++c.samples;
      bool ok = is_feasible(t, p, set);
      for (LinkId x = 0; ok && x < n; ++x) {
        if (set.contains(x)) continue;
        LinkSet grown = set;
        grown.insert(x);
        ok = !is_feasible(t, p, grown);
      }
      if (!ok) ++c.violations;
    }
    checks.push_back(c);
  }
  return checks;
}

std::string format_report(const Scenario& s, const std::vector<PropertyCheck>& checks) {
  std::ostringstream os;
  fmt::print(os, "topology: n={} alpha={} beta={} noise={} Delta={:.6g} power={}\n", s.topology.size(),
             s.topology.alpha(), s.topology.beta(), s.topology.noise(), length_diversity(s.topology),
             to_string(s.power.kind()));
  for (const auto& c : checks) {
    fmt::print(os, "[{}] {}: samples={} violations={}{}{}\n", c.passed() ? "PASS" : "FAIL", c.name, c.samples,
               c.violations, c.detail.empty() ? "" : "; ", c.detail);
  }
  return os.str();
}

int verify_command(const Manifest& m, std::ostream& report) {
  const Scenario s = load_scenario(m.experiment);
  VerifyOptions opt;
  opt.seed = m.experiment.master_seed;
  const auto checks = verify_properties(s, opt);
  const std::string text = format_report(s, checks);
  report << text;
  if (!m.output_dir.empty()) io::write_text_file(m.output_dir / "verify_report.txt", text);
  const bool ok = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  return ok ? 0 : 3;
}

}  // namespace sinrsim

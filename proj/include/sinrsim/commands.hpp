#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sinrsim/config.hpp"
#include "sinrsim/sim.hpp"

namespace sinrsim {

/// Topology from file or generator, power from the config, pool from file
/// or freshly built from the traffic seed.
Scenario load_scenario(const Experiment& e);

/// Writes manifest.json, topology.json and pool.json.
void generate_command(const Manifest& m, std::ostream& log);

/// Writes manifest.json first, then topology.json, pool.json and per
/// algorithm <algo>/runs.csv, <algo>/summary.csv and per-run metrics under
/// <algo>/metrics/, and finally plot.svg. A "run" manifest simulates the
/// single point base.rho; "sweep" simulates the whole grid.
std::vector<SweepResult> run_command(const Manifest& m, std::size_t jobs, std::ostream& log);

struct PropertyCheck {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  std::string detail;

  bool passed() const { return violations == 0; }
};

struct VerifyOptions {
  std::size_t signal_sets_per_q = 100;
  std::size_t set_affectance_samples = 1000;
  std::size_t equivalence_samples = 20000;
  std::uint64_t seed = 1;
};

/// Structural property checks over the scenario's topology and power.
std::vector<PropertyCheck> verify_properties(const Scenario& s, const VerifyOptions& opt);

std::string format_report(const Scenario& s, const std::vector<PropertyCheck>& checks);

/// Prints the report; returns 0 when every check passes, 3 otherwise.
int verify_command(const Manifest& m, std::ostream& report);

}  // namespace sinrsim

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sinrsim/io.hpp"
#include "sinrsim/sim.hpp"

namespace sinrsim {

inline constexpr const char* kToolVersion = "1.0.0";

/// A resolved experiment description. `base` carries the single-point
/// settings; sweeps replace base.rho with each grid value.
struct Experiment {
  SimConfig base;
  std::vector<Algorithm> algorithms{Algorithm::reflect_estimated};
  std::optional<std::string> topology_file;
  std::optional<std::string> pool_file;
  std::vector<double> grid = make_grid(0.01, 0.60, 0.01);
  std::size_t runs = 10;
  std::uint64_t master_seed = 1;
  std::optional<SimSeeds> explicit_seeds;
  StabilityThresholds thresholds;

  /// Explicit seeds when given, otherwise seeds derived from master_seed.
  SimSeeds seeds() const;
  /// base with seeds resolved and the given algorithm.
  SimConfig sim_config(Algorithm a) const;
};

/// Validates a config document (or a manifest wrapping one) and fills
/// defaults. Errors carry the offending field path.
Experiment parse_config(const io::Json& doc);
Experiment parse_config(const std::filesystem::path& path);

/// Fully resolved config; parse_config(config_to_json(e)) reproduces e and
/// re-serializes to the same bytes.
io::Json config_to_json(const Experiment& e);

struct Manifest {
  std::string command;
  Experiment experiment;
  std::filesystem::path output_dir;
  std::string created;  // UTC timestamp, informational only
};

io::Json manifest_to_json(const Manifest& m);
std::string utc_timestamp();

}  // namespace sinrsim

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "sinrsim/geometry.hpp"
#include "sinrsim/sim.hpp"
#include "sinrsim/traffic.hpp"

namespace sinrsim::io {

using Json = nlohmann::ordered_json;

/// {alpha, beta, noise, links: [{id, sx, sy, rx, ry}]}, in that field order.
Json topology_to_json(const Topologyd& t);
Topologyd topology_from_json(const Json& j);

/// {sets: [[id, ...], ...], weights: [...]}
Json pool_to_json(const FeasibleSetPool& pool);
FeasibleSetPool pool_from_json(const Json& j, std::size_t n);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

// CSV writers. Numbers use the shortest round-trip representation.
void write_metrics_csv(std::ostream& os, const MetricsSeries& ms);        // slot,max_queue,mean_queue,departures
void write_running_max_csv(std::ostream& os, const MetricsSeries& ms);    // slot,running_max_queue
void write_sweep_runs_csv(std::ostream& os, const SweepResult& r);        // rho,run,final_max_queue,stable,slope
void write_sweep_summary_csv(std::ostream& os, const SweepResult& r);     // rho,mean_final_max_queue,unstable_fraction

/// Mean final max-queue against rho, one polyline per algorithm, on a
/// log10(1 + q) axis.
void write_sweep_svg(std::ostream& os, std::span<const SweepResult> results);

std::string format_number(double v);

}  // namespace sinrsim::io

#include "sinrsim/config.hpp"

#include <chrono>
#include <ctime>
#include <set>
#include <string_view>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace sinrsim {

namespace {

using io::Json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config_invalid, path + ": " + what);
}

double get_number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(key, "expected a number");
  return j.at(key).get<double>();
}

std::int64_t get_integer(const Json& j, const char* key, std::int64_t fallback, std::int64_t min) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) fail(key, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min) fail(key, "must be >= " + std::to_string(min));
  return x;
}

std::uint64_t get_seed(const Json& j, const char* key, const std::string& path, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer seed");
  return v.get<std::uint64_t>();
}

Algorithm get_algorithm(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  const auto name = v.get<std::string>();
  auto a = parse_algorithm(name);
  if (!a) {
    fail(path, "unknown algorithm '" + name + "' (expected one of reflect, reflect-estimated, "
                                             "reflect-partitioned, lqf)");
  }
  return *a;
}

const std::set<std::string_view> kKnownKeys = {
    "n",        "side",      "lmin",          "lmax",       "alpha",      "beta",  "noise",
    "power",    "algorithm", "algorithms",    "rate_mode",  "arrivals", "rho",        "rho_grid",
    "slots",    "checkpoint", "runs",         "pool_size",  "seed",       "seeds",
    "topology_file", "pool_file", "stability"};

}  // namespace

SimSeeds Experiment::seeds() const {
  if (explicit_seeds) return *explicit_seeds;
  SimSeeds s;
  s.topology = derive_seed(master_seed, {static_cast<std::uint64_t>(StreamTag::topology)});
  s.traffic = derive_seed(master_seed, {static_cast<std::uint64_t>(StreamTag::arrivals)});
  s.decisions = derive_seed(master_seed, {static_cast<std::uint64_t>(StreamTag::decisions)});
  return s;
}

SimConfig Experiment::sim_config(Algorithm a) const {
  SimConfig cfg = base;
  cfg.algorithm = a;
  cfg.seeds = seeds();
  return cfg;
}

Experiment parse_config(const Json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  if (doc.contains("config")) {
    if (!doc.at("config").is_object()) fail("config", "expected an object");
    return parse_config(doc.at("config"));
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) fail(key, "unknown field");
  }

  Experiment e;
  auto& b = e.base;
  b.topology.n = static_cast<std::size_t>(get_integer(doc, "n", 200, 1));
  b.topology.side = get_number(doc, "side", 100.0);
  b.topology.lmin = get_number(doc, "lmin", 1.0);
  b.topology.lmax = get_number(doc, "lmax", 20.0);
  b.topology.alpha = get_number(doc, "alpha", 2.5);
  b.topology.beta = get_number(doc, "beta", 1.0);
  b.topology.noise = get_number(doc, "noise", 0.0);

  if (doc.contains("power")) {
    const auto& v = doc.at("power");
    auto kind = v.is_string() ? parse_power_kind(v.get<std::string>()) : std::nullopt;
    if (!kind || *kind == PowerKind::custom) fail("power", "expected one of uniform, linear, mean");
    b.power = *kind;
  }

  if (doc.contains("algorithm") && doc.contains("algorithms")) fail("algorithms", "give algorithm or algorithms, not both");
  if (doc.contains("algorithm")) {
    e.algorithms = {get_algorithm(doc.at("algorithm"), "algorithm")};
  } else if (doc.contains("algorithms")) {
    const auto& arr = doc.at("algorithms");
    if (!arr.is_array() || arr.empty()) fail("algorithms", "expected a non-empty array");
    e.algorithms.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      e.algorithms.push_back(get_algorithm(arr[i], "algorithms[" + std::to_string(i) + "]"));
    }
  }
  b.algorithm = e.algorithms.front();

  if (doc.contains("arrivals")) {
    const auto& v = doc.at("arrivals");
    auto mode = v.is_string() ? parse_arrival_mode(v.get<std::string>()) : std::nullopt;
    if (!mode) fail("arrivals", "expected independent or pooled-set");
    b.arrivals = *mode;
  }
  if (doc.contains("rate_mode")) {
    const auto& v = doc.at("rate_mode");
    auto mode = v.is_string() ? parse_rate_mode(v.get<std::string>()) : std::nullopt;
    if (!mode) fail("rate_mode", "expected known or estimated");
    b.rate_mode = *mode;
  }

  b.rho = get_number(doc, "rho", 0.1);
  if (doc.contains("rho_grid")) {
    const auto& g = doc.at("rho_grid");
    if (g.is_array()) {
      e.grid.clear();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g[i].is_number()) fail("rho_grid[" + std::to_string(i) + "]", "expected a number");
        e.grid.push_back(g[i].get<double>());
      }
    } else if (g.is_object()) {
      for (const auto& [key, value] : g.items()) {
        if (key != "start" && key != "stop" && key != "step") fail("rho_grid." + key, "unknown field");
      }
      try {
        e.grid = make_grid(get_number(g, "start", 0.01), get_number(g, "stop", 0.60), get_number(g, "step", 0.01));
      } catch (const Error& err) {
        fail("rho_grid", err.what());
      }
    } else {
      fail("rho_grid", "expected an array or {start, stop, step}");
    }
    if (e.grid.empty()) fail("rho_grid", "must not be empty");
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
      if (!(e.grid[i] >= 0.0 && e.grid[i] <= 1.0)) fail("rho_grid", "values must lie in [0, 1]");
      if (i > 0 && !(e.grid[i] > e.grid[i - 1])) fail("rho_grid", "values must be strictly increasing");
    }
  }

  b.slots = get_integer(doc, "slots", 100000, 1);
  b.checkpoint = get_integer(doc, "checkpoint", 10000, 1);
  e.runs = static_cast<std::size_t>(get_integer(doc, "runs", 10, 1));
  b.pool_size = static_cast<std::size_t>(get_integer(doc, "pool_size", 64, 1));
  e.master_seed = get_seed(doc, "seed", "seed", 1);

  if (doc.contains("seeds")) {
    const auto& s = doc.at("seeds");
    if (!s.is_object()) fail("seeds", "expected an object");
    for (const auto& [key, value] : s.items()) {
      if (key != "topology" && key != "traffic" && key != "decisions") fail("seeds." + key, "unknown field");
    }
    const SimSeeds derived = e.seeds();
    SimSeeds seeds;
    seeds.topology = get_seed(s, "topology", "seeds.topology", derived.topology);
    seeds.traffic = get_seed(s, "traffic", "seeds.traffic", derived.traffic);
    seeds.decisions = get_seed(s, "decisions", "seeds.decisions", derived.decisions);
    e.explicit_seeds = seeds;
  }

  for (const char* key : {"topology_file", "pool_file"}) {
    if (!doc.contains(key)) continue;
    if (!doc.at(key).is_string()) fail(key, "expected a path string");
    (std::string_view(key) == "topology_file" ? e.topology_file : e.pool_file) = doc.at(key).get<std::string>();
  }

  if (doc.contains("stability")) {
    const auto& s = doc.at("stability");
    if (!s.is_object()) fail("stability", "expected an object");
    for (const auto& [key, value] : s.items()) {
      if (key != "slope" && key != "final_queue") fail("stability." + key, "unknown field");
    }
    e.thresholds.slope = get_number(s, "slope", e.thresholds.slope);
    e.thresholds.final_queue = get_number(s, "final_queue", e.thresholds.final_queue);
  }

  try {
    b.validate();
  } catch (const Error& err) {
    throw Error(ErrorCode::config_invalid, std::string("$: ") + err.what());
  }
  return e;
}

Experiment parse_config(const std::filesystem::path& path) { return parse_config(io::read_json_file(path)); }

io::Json config_to_json(const Experiment& e) {
  const auto& b = e.base;
  Json j;
  j["n"] = b.topology.n;
  j["side"] = b.topology.side;
  j["lmin"] = b.topology.lmin;
  j["lmax"] = b.topology.lmax;
  j["alpha"] = b.topology.alpha;
  j["beta"] = b.topology.beta;
  j["noise"] = b.topology.noise;
  if (e.topology_file) j["topology_file"] = *e.topology_file;
  if (e.pool_file) j["pool_file"] = *e.pool_file;
  j["power"] = to_string(b.power);
  Json algos = Json::array();
  for (auto a : e.algorithms) algos.push_back(to_string(a));
  j["algorithms"] = std::move(algos);
  j["rate_mode"] = to_string(b.rate_mode);
  j["arrivals"] = to_string(b.arrivals);
  j["rho"] = b.rho;
  j["rho_grid"] = e.grid;
  j["slots"] = b.slots;
  j["checkpoint"] = b.checkpoint;
  j["runs"] = e.runs;
  j["pool_size"] = b.pool_size;
  j["seed"] = e.master_seed;
  if (e.explicit_seeds) {
    j["seeds"] = Json{{"topology", e.explicit_seeds->topology},
                      {"traffic", e.explicit_seeds->traffic},
                      {"decisions", e.explicit_seeds->decisions}};
  }
  j["stability"] = Json{{"slope", e.thresholds.slope}, {"final_queue", e.thresholds.final_queue}};
  return j;
}

io::Json manifest_to_json(const Manifest& m) {
  const SimSeeds seeds = m.experiment.seeds();
  Json j;
  j["tool"] = "sinrsim";
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["created"] = m.created;
  j["output_dir"] = m.output_dir.string();
  j["master_seed"] = m.experiment.master_seed;
  j["resolved_seeds"] = Json{{"topology", seeds.topology}, {"traffic", seeds.traffic}, {"decisions", seeds.decisions}};
  j["config"] = config_to_json(m.experiment);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

}  // namespace sinrsim

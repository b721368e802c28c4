// sinrsim: batch front-end for topology generation, simulation runs, rho
// sweeps and structural property verification.
//
// Exit codes: 0 success, 1 config error, 2 simulation error, 3 verification
// failure. SINRSIM_SEED overrides the master seed of the config or manifest;
// --seed overrides both.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sinrsim/commands.hpp"
#include "sinrsim/config.hpp"
#include "sinrsim/io.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> algo;
  std::optional<double> rho;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
};

sinrsim::io::Json load_document(const Options& opt, const std::string& command) {
  using sinrsim::io::Json;
  Json doc = opt.config.empty() ? Json::object() : sinrsim::io::read_json_file(opt.config);
  if (!doc.is_object()) throw sinrsim::Error(sinrsim::ErrorCode::config_invalid, "$: expected a JSON object");
  Json& cfg = doc.contains("config") ? doc["config"] : doc;
  if (!cfg.is_object()) throw sinrsim::Error(sinrsim::ErrorCode::config_invalid, "config: expected an object");

  if (const char* env = std::getenv("SINRSIM_SEED"); env != nullptr && *env != '\0') {
    try {
      cfg["seed"] = std::stoull(env);
    } catch (const std::exception&) {
      throw sinrsim::Error(sinrsim::ErrorCode::config_invalid, "SINRSIM_SEED: expected an unsigned integer");
    }
  }
  if (opt.seed) cfg["seed"] = *opt.seed;
  if (opt.algo) {
    cfg.erase("algorithms");
    cfg["algorithm"] = *opt.algo;
  }
  if (opt.rho) {
    cfg["rho"] = *opt.rho;
    if (command == "sweep") cfg["rho_grid"] = Json::array({*opt.rho});
  }
  return doc;
}

int dispatch(const std::string& command, const Options& opt) {
  sinrsim::Manifest manifest;
  try {
    manifest.command = command;
    manifest.experiment = sinrsim::parse_config(load_document(opt, command));
    manifest.output_dir = opt.out;
    manifest.created = sinrsim::utc_timestamp();
  } catch (const sinrsim::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (command == "generate") {
      sinrsim::generate_command(manifest, std::cout);
    } else if (command == "verify") {
      return sinrsim::verify_command(manifest, std::cout);
    } else {
      sinrsim::run_command(manifest, opt.jobs, std::cout);
    }
  } catch (const sinrsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == sinrsim::ErrorCode::config_invalid ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SINR link-scheduling simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config or manifest");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "master seed");
  };
  auto add_sim = [&opt](CLI::App* sub) {
    sub->add_option("--algo", opt.algo, "reflect | reflect-estimated | reflect-partitioned | lqf");
    sub->add_option("--rho", opt.rho, "load factor")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* generate = app.add_subcommand("generate", "write topology and feasible-set pool");
  auto* run = app.add_subcommand("run", "simulate a single load point");
  auto* sweep = app.add_subcommand("sweep", "simulate every load point of the rho grid");
  auto* verify = app.add_subcommand("verify", "check structural SINR properties on the topology");
  for (auto* sub : {generate, run, sweep, verify}) add_common(sub);
  add_sim(run);
  add_sim(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return dispatch(app.get_subcommands().front()->get_name(), opt);
}

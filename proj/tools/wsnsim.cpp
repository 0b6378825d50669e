#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wsnphm/errors.hpp"
#include "wsnphm/experiment.hpp"

namespace {

using namespace wsnphm;

int simulate_command(const std::string& config_path, std::optional<int> seeds, std::optional<std::string> out_dir,
                     bool quiet) {
  ExperimentConfig config = load_config(config_path);
  if (seeds) {
    config.seeds = *seeds;
  }
  if (out_dir) {
    config.output.directory = *out_dir;
  }
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ProgressFn progress;
  if (!quiet) {
    progress = [](const std::string& line) { fmt::print(stderr, "{}\n", line); };
  }
  const ResultsTable table = run(config, progress);
  const std::vector<CurveSummary> summary = summarize(table);
  const EmittedFiles files = emit(table, summary, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} rows in {:.1f} s\n", table.rows.size(), seconds);
  for (const auto& path : files.paths) {
    fmt::print("wrote {}\n", path.string());
  }
  return 0;
}

std::array<double, 4> parse_targets(const std::string& text) {
  std::array<double, 4> targets{};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    if (count == targets.size()) {
      throw ConfigError(fmt::format("--targets takes 4 values, got more in '{}'", text));
    }
    try {
      std::size_t used = 0;
      targets[count] = std::stod(item, &used);
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("--targets: '{}' is not a number", item));
    }
    ++count;
    pos = comma + 1;
  }
  if (count != targets.size()) {
    throw ConfigError(fmt::format("--targets takes 4 values, got {}", count));
  }
  return targets;
}

int calibrate_command(const std::string& targets_text, const std::optional<std::string>& config_path,
                      std::optional<int> seeds, const std::string& out_path) {
  ExperimentConfig config;
  if (config_path) {
    config = load_config(*config_path);
  } else {
    // Start from the uncalibrated first-order constants.
    config.radio = RadioModel{};
  }
  if (seeds) {
    config.seeds = *seeds;
  }
  config.validate();
  const CalibrationReport report = calibrate(config, parse_targets(targets_text));
  fmt::print("{} (scale {})\n", report.success ? "calibrated" : "calibration failed", report.scale);
  fmt::print("radio e_elec={} e_rx={} e_amp={} e_da={}\n", report.radio.e_elec, report.radio.e_rx,
             report.radio.e_amp, report.radio.e_da);
  for (std::size_t i = 0; i < kCalibrationOrder.size(); ++i) {
    fmt::print("{:<14} target {:>5.1f}  first death {:>6.2f}\n", to_string(kCalibrationOrder[i]),
               report.targets[i], report.achieved[i]);
  }
  fmt::print("{}\n", report.message);
  std::ofstream out(out_path);
  if (!out) {
    throw IoError(fmt::format("cannot write {}", out_path));
  }
  out << calibration_fragment(report).dump(2) << "\n";
  fmt::print("wrote {}\n", out_path);
  return report.success ? 0 : 3;
}

int topology_dump_command(const std::string& kind_name, int seed_index, const std::optional<std::string>& config_path) {
  const auto kind = parse_topology(kind_name);
  if (!kind) {
    throw ConfigError(fmt::format("unknown topology '{}'", kind_name));
  }
  if (seed_index < 0) {
    throw ConfigError(fmt::format("--seed must be >= 0, got {}", seed_index));
  }
  const ExperimentConfig config = config_path ? load_config(*config_path) : ExperimentConfig{};
  const std::uint64_t seed = seed_for(config.master_seed, seed_index);
  Rng deploy_rng(derive_seed(seed, streams::kDeploy));
  const Fleet sensors = deploy(config.region, config.sensors, deploy_rng, config.deploy_options());
  Rng topo_rng(derive_seed(derive_seed(seed, streams::kTopology), static_cast<std::size_t>(*kind)));
  const Deployment net = build(*kind, sensors, config.topology_config(), topo_rng);
  write_topology_csv(net.fleet, net.plan, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless sensor network diagnostics simulator"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run the experiment and write CSV and SVG results");
  std::string config_path;
  std::optional<int> seeds;
  std::optional<std::string> out_dir;
  bool quiet = false;
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_option("--seeds", seeds, "Override the number of seeds");
  sim->add_option("--out", out_dir, "Override the output directory");
  sim->add_flag("--quiet", quiet, "No progress lines");

  auto* cal = app.add_subcommand("calibrate", "Fit the radio scale to first-death targets");
  std::string targets;
  std::optional<std::string> cal_config;
  std::optional<int> cal_seeds;
  std::string fragment = "calibration.json";
  cal->add_option("--targets", targets, "First-death targets: centralized,hierarchical,distributed,decentralized")
      ->required();
  cal->add_option("--config", cal_config, "JSON config file (radio constants are the starting point)");
  cal->add_option("--seeds", cal_seeds, "Override the number of seeds");
  cal->add_option("--out", fragment, "Where to write the config fragment");

  auto* dump = app.add_subcommand("topology-dump", "Print one deployment's routing plan as CSV");
  std::string kind;
  int seed = 0;
  std::optional<std::string> dump_config;
  dump->add_option("--kind", kind, "distributed, hierarchical, centralized or decentralized")->required();
  dump->add_option("--seed", seed, "Seed index")->required();
  dump->add_option("--config", dump_config, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) {
      return simulate_command(config_path, seeds, out_dir, quiet);
    }
    if (*cal) {
      return calibrate_command(targets, cal_config, cal_seeds, fragment);
    }
    return topology_dump_command(kind, seed, dump_config);
  } catch (const std::exception& e) {
    fmt::print(stderr, "wsnsim: error: {}\n", e.what());
    return 1;
  }
}

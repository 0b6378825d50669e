#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsnphm/collection.hpp"
#include "wsnphm/datagen.hpp"
#include "wsnphm/diagnostics.hpp"
#include "wsnphm/energy.hpp"
#include "wsnphm/topology.hpp"
#include "wsnphm/world.hpp"

namespace wsnphm {

// Radio constants produced by `calibrate --targets 10,20,40,60` from the
// first-order defaults (1.0, 0.5, 0.005, 0.2): e_elec and e_amp scaled by
// the factor that puts the Centralized first death at t=10.
RadioModel calibrated_radio() noexcept;

struct OutputConfig {
  std::filesystem::path directory = "results";
  bool charts = true;
};

struct ExperimentConfig {
  Region region;
  KindCounts sensors;
  double leaf_battery = 300.0;
  double cluster_head_battery = 1500.0;
  double distribution_battery = 300.0;
  int cluster_count = 30;
  double min_coverage = 0.90;
  std::vector<TopologyKind> topologies{kTopologyKinds.begin(), kTopologyKinds.end()};
  std::vector<AlgorithmKind> algorithms{kAlgorithmKinds.begin(), kAlgorithmKinds.end()};
  int t_max = 100;
  int seeds = 20;
  std::uint64_t master_seed = 20170301;
  RadioModel radio = calibrated_radio();
  AggregationConfig aggregation;
  DatasetConfig dataset;
  Hyperparameters hyperparameters;
  ImputePolicy impute = ImputePolicy::SentinelZero;
  InstanceMode instance_mode = InstanceMode::PerLocation;
  // Grid used for covered_fraction in the results table.
  int coverage_grid = 100;
  OutputConfig output;

  // Throws ConfigError.
  void validate() const;
  DeployOptions deploy_options() const;
  TopologyConfig topology_config() const;
};

// Strict: unknown keys and wrong types throw ConfigError. Missing keys keep
// their defaults.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

std::string_view to_string(ImputePolicy policy) noexcept;
std::string_view to_string(InstanceMode mode) noexcept;
std::string_view to_string(HazardMode mode) noexcept;

struct ResultRow {
  TopologyKind topology;
  AlgorithmKind algorithm;
  int t;
  int seed;
  double error_rate;
  double covered_fraction;
  int alive_count;
  int delivered_count;
};

// Network lifetime of one (topology, seed). Times are steps; t_max + 1
// means the event did not happen within the run.
struct LifetimeRecord {
  TopologyKind topology;
  int seed;
  // First step at which any node (sensor or infrastructure) dies.
  int first_death;
  // First step at which the sink receives no data at all.
  int whole_network_death;
  // Step at which each sensing node died, by node id.
  std::vector<int> sensor_death;
  // Distance from each sensing node to the sink.
  std::vector<double> sensor_distance;
};

struct ResultsTable {
  // Canonical order: topology, algorithm, t, seed.
  std::vector<ResultRow> rows;
  // Ordered by topology, then seed.
  std::vector<LifetimeRecord> lifetimes;
  int t_max = 0;
};

using ProgressFn = std::function<void(const std::string&)>;

// Sub-seed of seed index `s`: derive_seed(master, s). Within a seed the
// training set, the models, the deployment, the topology build and the
// sensing draws each take their own stream (see `streams`); all topologies
// of one seed share the same deployment and sensing draws.
std::uint64_t seed_for(std::uint64_t master, int seed_index) noexcept;

ResultsTable run(const ExperimentConfig& config, const ProgressFn& progress = {});

// Energy and delivery only, no classifiers. Same seeds and draws as run().
// `stop_after_first_death` ends each run at its first death.
std::vector<LifetimeRecord> simulate_lifetimes(const ExperimentConfig& config, TopologyKind kind,
                                               const RadioModel& radio, bool stop_after_first_death = false);

struct CurvePoint {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct CurveSummary {
  TopologyKind topology;
  AlgorithmKind algorithm;
  std::vector<CurvePoint> error;
  std::vector<double> covered;
  std::vector<double> alive;
  std::vector<double> delivered;
  double first_death = 0.0;
  double whole_network_death = 0.0;
  std::optional<int> knee;
};

struct KneeOptions {
  double jump = 0.10;
  int window = 3;
};

std::vector<CurveSummary> summarize(const ResultsTable& table, const KneeOptions& knee = {});

// Smallest t >= 1 where the mean over [t, t + window) (cut at the curve's
// end) exceeds the mean over [0, t) by at least `jump`.
std::optional<int> knee_time(std::span<const double> curve, double jump, int window);

// Rank correlation with average ranks for ties. Throws EmptyInputError when
// there are fewer than two points or either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

// Calibration targets are first-death steps for Centralized, Hierarchical,
// Distributed and Decentralized, in that order.
struct CalibrationOptions {
  double scale_low = 1e-3;
  double scale_high = 1e3;
  double tolerance = 2.0;
  int max_iterations = 60;
};

struct CalibrationReport {
  bool success = false;
  double scale = 0.0;
  RadioModel radio;
  std::array<double, 4> targets{};
  // Mean first death per topology in target order.
  std::array<double, 4> achieved{};
  std::string message;
};

inline constexpr std::array kCalibrationOrder{TopologyKind::Centralized, TopologyKind::Hierarchical,
                                              TopologyKind::Distributed, TopologyKind::Decentralized};

// Bisects one factor applied to (e_elec, e_amp) of `config.radio` until the
// Centralized mean first death is within tolerance of its target. An
// unreachable target gives success = false, not an exception.
CalibrationReport calibrate(const ExperimentConfig& config, const std::array<double, 4>& targets,
                            const CalibrationOptions& options = {});
nlohmann::json calibration_fragment(const CalibrationReport& report);

void write_raw_csv(const ResultsTable& table, std::ostream& out);
void write_summary_csv(const std::vector<CurveSummary>& summary, std::ostream& out);
void write_lifetimes_csv(const ResultsTable& table, std::ostream& out);
void write_chart_svg(TopologyKind topology, const std::vector<CurveSummary>& summary, std::ostream& out);

struct EmittedFiles {
  std::vector<std::filesystem::path> paths;
};

// raw.csv, summary.csv, lifetimes.csv and chart_<topology>.svg under the
// configured directory. Throws IoError naming the path.
EmittedFiles emit(const ResultsTable& table, const std::vector<CurveSummary>& summary, const ExperimentConfig& config);

}  // namespace wsnphm

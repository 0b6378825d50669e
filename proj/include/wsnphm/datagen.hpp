#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "wsnphm/rng.hpp"
#include "wsnphm/world.hpp"

namespace wsnphm {

// Outcome of one draw of a sensor's failure process.
enum class Condition : std::uint8_t { Normal, AreaFailure, SensorBroken };

// Inverted (default) uses 1 / (200(1 - 0.01t) + 0.01) so the failure rate
// grows with operating age; Literal uses 200(1 - 0.01t) + 0.01 directly.
enum class HazardMode : std::uint8_t { Inverted, Literal };

using Label = std::uint8_t;
inline constexpr Label kLabelNormal = 0;
inline constexpr Label kLabelFailure = 1;

struct GaussianParams {
  double mean = 0.0;
  double stddev = 1.0;
};

// Sensing model. t is the operating age in steps.
double normal_mean(SensorKind kind, double t) noexcept;
double normal_stddev(SensorKind kind) noexcept;
GaussianParams normal_params(SensorKind kind, double t) noexcept;
GaussianParams failure_params(SensorKind kind) noexcept;
double broken_constant(SensorKind kind) noexcept;

template <class Engine>
double draw_reading(SensorKind kind, Condition condition, double t, Engine& engine) {
  switch (condition) {
    case Condition::Normal: {
      const GaussianParams p = normal_params(kind, t);
      return std::normal_distribution<double>(p.mean, p.stddev)(engine);
    }
    case Condition::AreaFailure: {
      const GaussianParams p = failure_params(kind);
      return std::normal_distribution<double>(p.mean, p.stddev)(engine);
    }
    case Condition::SensorBroken:
      break;
  }
  return broken_constant(kind);
}

// Poisson rate of the failure process at age t (denominator clamped at 0.01).
double hazard(double t, HazardMode mode = HazardMode::Inverted) noexcept;

// Branches of the sensor algorithm: Pp < 1, 1 <= Pp < 100, Pp >= 100.
Condition condition_from_count(std::uint64_t pp) noexcept;

struct BranchProbabilities {
  double normal = 0.0;
  double area_failure = 0.0;
  double sensor_broken = 0.0;
};

// Closed-form branch probabilities from the Poisson CDF at `rate`.
BranchProbabilities branch_probabilities(double rate) noexcept;

// P(area failure) once the broken branch is excluded.
double area_failure_probability(double t, HazardMode mode = HazardMode::Inverted) noexcept;

template <class Engine>
Condition draw_condition(double t, Engine& engine, HazardMode mode = HazardMode::Inverted) {
  std::poisson_distribution<std::uint64_t> pp(hazard(t, mode));
  return condition_from_count(pp(engine));
}

// Area state at a location given its drawn condition. A broken sensor says
// nothing about the area, so its label is redrawn from the first two
// branches renormalized at the same age.
template <class Engine>
Label area_ground_truth(Condition condition, double t, Engine& engine, HazardMode mode = HazardMode::Inverted) {
  switch (condition) {
    case Condition::Normal:
      return kLabelNormal;
    case Condition::AreaFailure:
      return kLabelFailure;
    case Condition::SensorBroken:
      break;
  }
  std::bernoulli_distribution failure(area_failure_probability(t, mode));
  return failure(engine) ? kLabelFailure : kLabelNormal;
}

// Alarm thresholds: 26 degrees, 7 bars, 80 percent.
double threshold(SensorKind kind) noexcept;
bool exceeds_threshold(SensorKind kind, double value) noexcept;

// Value written into masked feature slots.
inline constexpr double kMissingSentinel = 0.0;

struct Instance {
  std::vector<double> features;
  Label label = kLabelNormal;
  std::vector<std::uint8_t> missing_mask;

  std::size_t size() const noexcept { return features.size(); }
};

struct DatasetConfig {
  int rows = 4000;
  int temperature = 1;
  int pressure = 1;
  int humidity = 1;
  double t_min = 0.0;
  double t_max = 100.0;
  // Operating ages are whole simulation steps.
  bool integer_ages = true;
  bool include_broken = true;
  HazardMode hazard_mode = HazardMode::Inverted;

  int feature_count() const noexcept { return temperature + pressure + humidity; }
};

struct Dataset {
  std::vector<Instance> instances;
  // Sensor kind feeding each feature slot.
  std::vector<SensorKind> feature_layout;
  DatasetConfig config;

  std::size_t size() const noexcept { return instances.size(); }
  std::size_t feature_count() const noexcept { return feature_layout.size(); }
};

std::vector<SensorKind> feature_layout(const DatasetConfig& config);

// Each row: an age, one condition for the whole row, T+P+H readings, and the
// ground-truth label. Rows never carry missing values.
Dataset generate_training_set(const DatasetConfig& config, Rng& rng);

// CSV with header f0..fk,label; missing cells are empty.
void write_dataset_csv(const Dataset& dataset, std::ostream& out);
Dataset read_dataset_csv(std::istream& in);

}  // namespace wsnphm

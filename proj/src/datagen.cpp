#include "wsnphm/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm {

double normal_mean(SensorKind kind, double t) noexcept {
  switch (kind) {
    case SensorKind::Temperature:
      return 20.0 * (1.0 + 0.005 * t);
    case SensorKind::Pressure:
      return 5.0 * (1.0 + 0.01 * t);
    case SensorKind::Humidity:
      return 52.5 * (1.0 + 0.001 * t);
  }
  return 0.0;
}

double normal_stddev(SensorKind kind) noexcept {
  switch (kind) {
    case SensorKind::Temperature:
      return 1.0;
    case SensorKind::Pressure:
      return 0.3;
    case SensorKind::Humidity:
      return 12.5;
  }
  return 1.0;
}

GaussianParams normal_params(SensorKind kind, double t) noexcept {
  return {normal_mean(kind, t), normal_stddev(kind)};
}

GaussianParams failure_params(SensorKind kind) noexcept {
  switch (kind) {
    case SensorKind::Temperature:
      return {350.0, 20.0};
    case SensorKind::Pressure:
      return {20.0, 2.5};
    case SensorKind::Humidity:
      return {80.0, 10.0};
  }
  return {};
}

double broken_constant(SensorKind kind) noexcept {
  switch (kind) {
    case SensorKind::Temperature:
      return 2.0;
    case SensorKind::Pressure:
      return 1.0;
    case SensorKind::Humidity:
      return 3.0;
  }
  return 0.0;
}

double hazard(double t, HazardMode mode) noexcept {
  const double parameter = std::max(200.0 * (1.0 - 0.01 * t) + 0.01, 0.01);
  return mode == HazardMode::Inverted ? 1.0 / parameter : parameter;
}

Condition condition_from_count(std::uint64_t pp) noexcept {
  if (pp < 1) {
    return Condition::Normal;
  }
  if (pp < 100) {
    return Condition::AreaFailure;
  }
  return Condition::SensorBroken;
}

BranchProbabilities branch_probabilities(double rate) noexcept {
  // P(Pp <= 99) summed in log space; the pmf terms are tiny for large rates.
  const double log_rate = std::log(rate);
  double below_hundred = 0.0;
  for (int k = 0; k < 100; ++k) {
    below_hundred += std::exp(k * log_rate - rate - std::lgamma(k + 1.0));
  }
  below_hundred = std::min(below_hundred, 1.0);
  const double p0 = std::exp(-rate);
  return {p0, std::max(below_hundred - p0, 0.0), std::max(1.0 - below_hundred, 0.0)};
}

double area_failure_probability(double t, HazardMode mode) noexcept {
  const BranchProbabilities p = branch_probabilities(hazard(t, mode));
  const double total = p.normal + p.area_failure;
  return total > 0.0 ? p.area_failure / total : 1.0;
}

double threshold(SensorKind kind) noexcept {
  switch (kind) {
    case SensorKind::Temperature:
      return 26.0;
    case SensorKind::Pressure:
      return 7.0;
    case SensorKind::Humidity:
      return 80.0;
  }
  return 0.0;
}

bool exceeds_threshold(SensorKind kind, double value) noexcept { return value > threshold(kind); }

std::vector<SensorKind> feature_layout(const DatasetConfig& config) {
  std::vector<SensorKind> layout;
  layout.insert(layout.end(), static_cast<std::size_t>(config.temperature), SensorKind::Temperature);
  layout.insert(layout.end(), static_cast<std::size_t>(config.pressure), SensorKind::Pressure);
  layout.insert(layout.end(), static_cast<std::size_t>(config.humidity), SensorKind::Humidity);
  return layout;
}

Dataset generate_training_set(const DatasetConfig& config, Rng& rng) {
  if (config.rows < 1) {
    throw Error(fmt::format("training set needs at least one row, got {}", config.rows));
  }
  if (config.temperature < 1 || config.pressure < 1 || config.humidity < 1) {
    throw Error("training rows need at least one reading of each kind");
  }
  if (!(config.t_max >= config.t_min) || config.t_min < 0.0) {
    throw Error(fmt::format("invalid age range [{}, {}]", config.t_min, config.t_max));
  }

  Dataset dataset;
  dataset.config = config;
  dataset.feature_layout = feature_layout(config);
  dataset.instances.reserve(static_cast<std::size_t>(config.rows));

  std::uniform_real_distribution<double> continuous_age(config.t_min, config.t_max);
  std::uniform_int_distribution<int> integer_age(static_cast<int>(std::ceil(config.t_min)),
                                                 static_cast<int>(std::floor(config.t_max)));
  const std::size_t width = dataset.feature_layout.size();

  while (dataset.instances.size() < static_cast<std::size_t>(config.rows)) {
    const double t = config.integer_ages ? static_cast<double>(integer_age(rng)) : continuous_age(rng);
    const Condition condition = draw_condition(t, rng, config.hazard_mode);
    if (condition == Condition::SensorBroken && !config.include_broken) {
      continue;
    }
    Instance row;
    row.features.reserve(width);
    for (SensorKind kind : dataset.feature_layout) {
      row.features.push_back(draw_reading(kind, condition, t, rng));
    }
    row.missing_mask.assign(width, 0);
    row.label = area_ground_truth(condition, t, rng, config.hazard_mode);
    dataset.instances.push_back(std::move(row));
  }
  return dataset;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
  const std::size_t width = dataset.feature_count();
  for (std::size_t i = 0; i < width; ++i) {
    out << 'f' << i << ',';
  }
  out << "label\n";
  for (const Instance& row : dataset.instances) {
    for (std::size_t i = 0; i < width; ++i) {
      if (!row.missing_mask[i]) {
        out << fmt::format("{}", row.features[i]);
      }
      out << ',';
    }
    out << static_cast<int>(row.label) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("dataset CSV is empty");
  }
  const auto header = split_csv_line(line);
  if (header.empty() || header.back() != "label") {
    throw IoError("dataset CSV header must end with 'label'");
  }
  const std::size_t width = header.size() - 1;
  for (std::size_t i = 0; i < width; ++i) {
    if (header[i] != fmt::format("f{}", i)) {
      throw IoError(fmt::format("unexpected dataset column '{}' at position {}", header[i], i));
    }
  }

  Dataset dataset;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != width + 1) {
      throw IoError(fmt::format("line {}: expected {} cells, got {}", line_number, width + 1, cells.size()));
    }
    Instance row;
    row.features.assign(width, kMissingSentinel);
    row.missing_mask.assign(width, 0);
    for (std::size_t i = 0; i < width; ++i) {
      if (cells[i].empty()) {
        row.missing_mask[i] = 1;
      } else {
        row.features[i] = std::stod(cells[i]);
      }
    }
    const int label = std::stoi(cells.back());
    if (label != 0 && label != 1) {
      throw IoError(fmt::format("line {}: label must be 0 or 1", line_number));
    }
    row.label = static_cast<Label>(label);
    dataset.instances.push_back(std::move(row));
  }
  // Layout is not stored in the CSV; callers that need it attach a config.
  dataset.feature_layout.assign(width, SensorKind::Temperature);
  return dataset;
}

}  // namespace wsnphm

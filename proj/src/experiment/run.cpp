#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"
#include "wsnphm/experiment.hpp"

namespace wsnphm {

RadioModel calibrated_radio() noexcept {
  // Output of `wsnsim calibrate --targets 10,20,40,60` on the default
  // config (scale 1.183701471503441).
  return RadioModel{}.scaled(1.183701471503441);
}

std::uint64_t seed_for(std::uint64_t master, int seed_index) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(seed_index));
}

namespace {

std::size_t topology_index(TopologyKind kind) noexcept { return static_cast<std::size_t>(kind); }

Fleet deploy_for(const ExperimentConfig& config, std::uint64_t seed) {
  Rng rng(derive_seed(seed, streams::kDeploy));
  return deploy(config.region, config.sensors, rng, config.deploy_options());
}

Deployment build_for(const ExperimentConfig& config, TopologyKind kind, const Fleet& sensors, std::uint64_t seed) {
  Rng rng(derive_seed(derive_seed(seed, streams::kTopology), topology_index(kind)));
  return build(kind, sensors, config.topology_config(), rng);
}

struct StepView {
  int t;
  const SinkSnapshot& snapshot;
  // Fleet as it was while sensing, before this step's deaths.
  int alive_count;
  const Fleet& fleet;
};

// One topology under one seed: run_step, apply_step, repair for each t.
// `observe` sees each step after sensing and before energy is charged.
template <typename Observer>
LifetimeRecord simulate(const ExperimentConfig& config, TopologyKind kind, const Fleet& sensors, int seed_index,
                        std::uint64_t seed, const RadioModel& radio, bool stop_after_first_death,
                        Observer&& observe) {
  Deployment net = build_for(config, kind, sensors, seed);
  const SensingContext sensing{derive_seed(seed, streams::kSensing), config.dataset.hazard_mode};
  const int censored = config.t_max + 1;
  const std::size_t sensor_count = sensors.size();

  LifetimeRecord life{kind, seed_index, censored, censored, std::vector<int>(sensor_count, censored), {}};
  life.sensor_distance.reserve(sensor_count);
  for (const Node& node : sensors.nodes()) {
    life.sensor_distance.push_back(distance(node.position, config.region.sink));
  }

  for (int t = 0; t <= config.t_max; ++t) {
    try {
      StepOutput step = run_step(net.fleet, net.plan, t, config.aggregation, sensing);
      if (step.snapshot.delivered.empty() && life.whole_network_death == censored) {
        life.whole_network_death = t;
      }
      observe(StepView{t, step.snapshot, static_cast<int>(net.fleet.alive_count()), net.fleet});
      const std::vector<NodeId> dead = apply_step(net.fleet, step.ledger, radio);
      if (!dead.empty()) {
        life.first_death = std::min(life.first_death, t);
        for (NodeId id : dead) {
          if (static_cast<std::size_t>(id) < sensor_count) {
            life.sensor_death[static_cast<std::size_t>(id)] = t;
          }
        }
        net.plan = repair(net.plan, net.fleet, dead);
        if (stop_after_first_death) {
          break;
        }
      }
    } catch (const std::exception& e) {
      throw Error(fmt::format("{} (topology {}, t {}, seed {})", e.what(), to_string(kind), t, seed_index));
    }
  }
  // A network that has stopped delivering is dead even if no node ran out.
  life.first_death = std::min(life.first_death, life.whole_network_death);
  return life;
}

}  // namespace

std::vector<LifetimeRecord> simulate_lifetimes(const ExperimentConfig& config, TopologyKind kind,
                                               const RadioModel& radio, bool stop_after_first_death) {
  config.validate();
  radio.validate();
  std::vector<LifetimeRecord> out;
  out.reserve(static_cast<std::size_t>(config.seeds));
  for (int s = 0; s < config.seeds; ++s) {
    const std::uint64_t seed = seed_for(config.master_seed, s);
    const Fleet sensors = deploy_for(config, seed);
    out.push_back(simulate(config, kind, sensors, s, seed, radio, stop_after_first_death, [](const StepView&) {}));
  }
  return out;
}

ResultsTable run(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  ResultsTable table;
  table.t_max = config.t_max;
  const std::size_t steps = static_cast<std::size_t>(config.t_max) + 1;
  table.rows.reserve(config.topologies.size() * config.algorithms.size() * steps *
                     static_cast<std::size_t>(config.seeds));

  for (int s = 0; s < config.seeds; ++s) {
    const std::uint64_t seed = seed_for(config.master_seed, s);

    Rng data_rng(derive_seed(seed, streams::kTraining));
    const Dataset training = generate_training_set(config.dataset, data_rng);
    const std::vector<double> means = feature_means(training);
    std::vector<std::unique_ptr<Model>> models;
    for (AlgorithmKind algorithm : config.algorithms) {
      Rng model_rng(derive_seed(derive_seed(seed, streams::kModels), static_cast<std::uint64_t>(algorithm)));
      try {
        models.push_back(train(algorithm, training, config.hyperparameters, model_rng));
      } catch (const std::exception& e) {
        throw Error(fmt::format("{} (training {}, seed {})", e.what(), to_string(algorithm), s));
      }
    }

    const Fleet sensors = deploy_for(config, seed);
    for (TopologyKind kind : config.topologies) {
      if (progress) {
        progress(fmt::format("seed {} topology {}", s, to_string(kind)));
      }
      auto observe = [&](const StepView& view) {
        const std::vector<Instance> instances =
            assemble_instances(view.snapshot, view.fleet, config.instance_mode, config.impute, means);
        const double covered = covered_fraction(view.fleet, config.coverage_grid);
        const auto delivered = static_cast<int>(view.snapshot.delivered_sensor_count());
        for (std::size_t a = 0; a < models.size(); ++a) {
          table.rows.push_back({kind, config.algorithms[a], view.t, s, error_rate(*models[a], instances), covered,
                                view.alive_count, delivered});
        }
      };
      table.lifetimes.push_back(simulate(config, kind, sensors, s, seed, config.radio, false, observe));
    }
  }

  std::ranges::sort(table.rows, [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.topology, a.algorithm, a.t, a.seed) < std::tie(b.topology, b.algorithm, b.t, b.seed);
  });
  std::ranges::sort(table.lifetimes, [](const LifetimeRecord& a, const LifetimeRecord& b) {
    return std::tie(a.topology, a.seed) < std::tie(b.topology, b.seed);
  });
  return table;
}

std::optional<int> knee_time(std::span<const double> curve, double jump, int window) {
  if (window < 1) {
    window = 1;
  }
  double before = 0.0;
  for (std::size_t t = 1; t < curve.size(); ++t) {
    before += curve[t - 1];
    const double prior = before / static_cast<double>(t);
    const std::size_t end = std::min(curve.size(), t + static_cast<std::size_t>(window));
    double ahead = 0.0;
    for (std::size_t u = t; u < end; ++u) {
      ahead += curve[u];
    }
    ahead /= static_cast<double>(end - t);
    if (ahead - prior >= jump) {
      return static_cast<int>(t);
    }
  }
  return std::nullopt;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
      ++j;
    }
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      ranks[order[k]] = rank;
    }
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw EmptyInputError(fmt::format("spearman needs two equal lists of at least 2 points ({} vs {})", x.size(),
                                      y.size()));
  }
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mean = 0.5 * (static_cast<double>(x.size()) + 1.0);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw EmptyInputError("spearman is undefined for a constant list");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<CurveSummary> summarize(const ResultsTable& table, const KneeOptions& knee) {
  std::vector<CurveSummary> out;
  const std::size_t steps = static_cast<std::size_t>(table.t_max) + 1;
  // Rows are sorted, so each (topology, algorithm) is one contiguous block
  // of steps * seeds rows.
  std::size_t i = 0;
  while (i < table.rows.size()) {
    const ResultRow& head = table.rows[i];
    CurveSummary curve{head.topology, head.algorithm, std::vector<CurvePoint>(steps), std::vector<double>(steps),
                       std::vector<double>(steps), std::vector<double>(steps), 0.0, 0.0, std::nullopt};
    std::vector<std::vector<double>> errors(steps);
    for (; i < table.rows.size() && table.rows[i].topology == head.topology &&
           table.rows[i].algorithm == head.algorithm;
         ++i) {
      const ResultRow& row = table.rows[i];
      const auto t = static_cast<std::size_t>(row.t);
      errors[t].push_back(row.error_rate);
      curve.covered[t] += row.covered_fraction;
      curve.alive[t] += row.alive_count;
      curve.delivered[t] += row.delivered_count;
    }
    std::vector<double> means(steps, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
      const auto n = static_cast<double>(errors[t].size());
      if (n == 0) {
        continue;
      }
      const double mean = std::accumulate(errors[t].begin(), errors[t].end(), 0.0) / n;
      double sq = 0.0;
      for (double e : errors[t]) {
        sq += (e - mean) * (e - mean);
      }
      const double sd = n > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
      curve.error[t] = {mean, sd / std::sqrt(n)};
      curve.covered[t] /= n;
      curve.alive[t] /= n;
      curve.delivered[t] /= n;
      means[t] = mean;
    }
    curve.knee = knee_time(means, knee.jump, knee.window);

    double first = 0.0;
    double whole = 0.0;
    double count = 0.0;
    for (const LifetimeRecord& life : table.lifetimes) {
      if (life.topology == head.topology) {
        first += life.first_death;
        whole += life.whole_network_death;
        count += 1.0;
      }
    }
    if (count > 0) {
      curve.first_death = first / count;
      curve.whole_network_death = whole / count;
    }
    out.push_back(std::move(curve));
  }
  return out;
}

}  // namespace wsnphm

// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "wsnphm/errors.hpp"
#include "wsnphm/experiment.hpp"

using namespace wsnphm;

namespace {

// Tolerances.
constexpr int kOracleQueries = 1000;
constexpr double kOracleSeconds = 10.0;
constexpr int kAggregateLists = 10000;
constexpr double kAggregateTol = 1e-12;
constexpr int kMomentDraws = 1000000;
constexpr double kMomentSe = 3.0;
constexpr int kRoutingFleets = 100;
constexpr double kRoutingSeconds = 60.0;
constexpr double kSpearmanMax = -0.95;
constexpr std::array<double, 4> kKneeTargets{10, 20, 40, 60};
constexpr double kKneeTol = 5.0;
constexpr double kWholeDeathTol = 10.0;
constexpr double kTerminalError = 0.80;
constexpr double kRuntimeSeconds = 300.0;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  fmt::print("criterion {:2}: {}  {} ({})\n", id, pass ? "PASS" : "FAIL", what, detail);
  std::fflush(stdout);
  if (!pass) {
    ++failures;
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t topo(TopologyKind k) { return static_cast<std::size_t>(k); }
std::size_t algo(AlgorithmKind a) { return static_cast<std::size_t>(a); }

void oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  DatasetConfig dc;
  dc.rows = 1000;
  Rng train_rng(101), query_rng(202);
  const Dataset train_set = generate_training_set(dc, train_rng);
  dc.rows = kOracleQueries;
  const Dataset queries = generate_training_set(dc, query_rng);
  Hyperparameters hp;
  Rng model_rng(303);
  const auto nb = train(AlgorithmKind::NaiveBayes, train_set, hp, model_rng);
  const auto nn = train(AlgorithmKind::NearestNeighbors, train_set, hp, model_rng);
  int nb_bad = 0, nn_bad = 0;
  for (const Instance& q : queries.instances) {
    nb_bad += nb->predict(q.features) != oracle::naive_bayes(train_set.instances, hp.nb.variance_floor, q.features);
    nn_bad += nn->predict(q.features) != oracle::nearest_neighbors(train_set.instances, hp.knn.k, q.features);
  }
  const double secs = seconds_since(start);
  report(1, nb_bad == 0 && nn_bad == 0 && secs < kOracleSeconds, "NB and NN agree with brute-force oracles",
         fmt::format("{} NB and {} NN disagreements of {} each, {:.2f} s", nb_bad, nn_bad, kOracleQueries, secs));
}

void aggregation_is_mean() {
  Rng rng(7);
  std::uniform_real_distribution<double> value(-400.0, 400.0);
  std::uniform_int_distribution<int> length(1, 50);
  double worst = 0.0;
  for (int i = 0; i < kAggregateLists; ++i) {
    std::vector<double> v(static_cast<std::size_t>(length(rng)));
    long double sum = 0;
    for (double& x : v) {
      x = value(rng);
      sum += x;
    }
    const double expected = static_cast<double>(sum / static_cast<long double>(v.size()));
    worst = std::max(worst, std::abs(aggregate(v) - expected));
  }
  report(2, worst <= kAggregateTol, "aggregate equals the arithmetic mean",
         fmt::format("max deviation {:.3g} over {} lists", worst, kAggregateLists));
}

void generative_moments() {
  bool ok = true;
  std::string worst;
  double worst_z = 0.0;
  const double t = 50.0;
  for (SensorKind kind : kSensorKinds) {
    for (Condition c : {Condition::Normal, Condition::AreaFailure}) {
      const GaussianParams p = c == Condition::Normal ? normal_params(kind, t) : failure_params(kind);
      SplitMix64 g(derive_seed(4242, index_of(kind) * 2 + (c == Condition::Normal ? 0u : 1u)));
      double sum = 0, sq = 0;
      for (int i = 0; i < kMomentDraws; ++i) {
        const double x = draw_reading(kind, c, t, g);
        sum += x;
        sq += x * x;
      }
      const double n = kMomentDraws;
      const double mean = sum / n;
      const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
      const double z_mean = std::abs(mean - p.mean) / (p.stddev / std::sqrt(n));
      const double z_sd = std::abs(sd - p.stddev) / (p.stddev / std::sqrt(2 * n));
      ok = ok && z_mean <= kMomentSe && z_sd <= kMomentSe;
      if (std::max(z_mean, z_sd) > worst_z) {
        worst_z = std::max(z_mean, z_sd);
        worst = fmt::format("{} {}", to_string(kind), c == Condition::Normal ? "normal" : "failure");
      }
    }
  }
  Rng rng(1);
  const bool exact = draw_reading(SensorKind::Temperature, Condition::SensorBroken, 3, rng) == 2.0 &&
                     draw_reading(SensorKind::Pressure, Condition::SensorBroken, 3, rng) == 1.0 &&
                     draw_reading(SensorKind::Humidity, Condition::SensorBroken, 3, rng) == 3.0;
  report(3, ok && exact, "Gaussian branch moments and broken constants",
         fmt::format("largest deviation {:.2f} standard errors ({}), broken constants {}", worst_z, worst,
                     exact ? "exact" : "wrong"));
}

void routing_safety() {
  const auto start = std::chrono::steady_clock::now();
  long cycles = 0, false_connected = 0, regressions = 0, checks = 0;
  auto audit = [&](const Deployment& d) {
    const Point sink = d.fleet.region().sink;
    for (const Node& n : d.fleet.nodes()) {
      ++checks;
      const NextHop hop = d.plan.next_hop[static_cast<std::size_t>(n.id)];
      std::optional<std::vector<NodeId>> path;
      try {
        path = route_to_sink(d.plan, n.id);
      } catch (const InvariantViolation&) {
        ++cycles;
        continue;
      }
      if (!hop.is_disconnected() && (!path || !n.alive())) {
        ++false_connected;
      }
      if (path) {
        for (NodeId relay : *path) {
          false_connected += !d.fleet.node(relay).alive();
        }
      }
      const bool contracted = d.plan.kind == TopologyKind::Distributed ||
                              (d.plan.kind == TopologyKind::Decentralized && n.role == Role::ClusterHead);
      if (contracted && hop.is_node() &&
          !(distance(d.fleet.node(hop.node_id()).position, sink) < distance(n.position, sink))) {
        ++regressions;
      }
    }
  };
  for (int f = 0; f < kRoutingFleets; ++f) {
    Rng rng(derive_seed(555, static_cast<std::uint64_t>(f)));
    DeployOptions options;
    options.require_coverage = false;
    const Fleet sensors = deploy(Region{}, KindCounts{}, rng, options);
    for (TopologyKind kind : kTopologyKinds) {
      Deployment d = build(kind, sensors, TopologyConfig{}, rng);
      audit(d);
      std::vector<NodeId> order(d.fleet.size());
      std::iota(order.begin(), order.end(), 0);
      std::ranges::shuffle(order, rng);
      std::size_t next = 0;
      std::uniform_int_distribution<std::size_t> batch(1, 60);
      while (next < order.size()) {
        const std::size_t end = std::min(order.size(), next + batch(rng));
        std::vector<NodeId> dead(order.begin() + static_cast<long>(next), order.begin() + static_cast<long>(end));
        for (NodeId id : dead) {
          d.fleet.node(id).health = Health::Dead;
          d.fleet.node(id).battery = 0.0;
        }
        d.plan = repair(d.plan, d.fleet, dead);
        audit(d);
        next = end;
      }
    }
  }
  const double secs = seconds_since(start);
  report(4, cycles == 0 && false_connected == 0 && regressions == 0 && secs < kRoutingSeconds,
         "routing stays acyclic, sound and strictly progressing under forced deaths",
         fmt::format("{} node checks: {} cycles, {} falsely connected, {} non-progressing hops, {:.1f} s", checks,
                     cycles, false_connected, regressions, secs));
}

struct FullRun {
  ResultsTable table;
  std::string raw;
  double seconds;
};

FullRun full_run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  FullRun out{run(config), {}, 0.0};
  out.seconds = seconds_since(start);
  std::ostringstream raw;
  write_raw_csv(out.table, raw);
  out.raw = raw.str();
  return out;
}

const LifetimeRecord& life_of(const ResultsTable& table, TopologyKind kind, int seed) {
  for (const LifetimeRecord& life : table.lifetimes) {
    if (life.topology == kind && life.seed == seed) {
      return life;
    }
  }
  throw Error("missing lifetime record");
}

// errors[topology][algorithm][seed][t]
using ErrorCube = std::vector<std::vector<std::vector<std::vector<double>>>>;

ErrorCube error_cube(const ExperimentConfig& config, const ResultsTable& table) {
  ErrorCube cube(4, std::vector<std::vector<std::vector<double>>>(
                        6, std::vector<std::vector<double>>(static_cast<std::size_t>(config.seeds),
                                                            std::vector<double>(table.t_max + 1, 0.0))));
  for (const ResultRow& r : table.rows) {
    cube[topo(r.topology)][algo(r.algorithm)][static_cast<std::size_t>(r.seed)][static_cast<std::size_t>(r.t)] =
        r.error_rate;
  }
  return cube;
}

double window_mean(const std::vector<double>& curve, int last) {
  double s = 0.0;
  for (int t = 0; t <= last; ++t) {
    s += curve[static_cast<std::size_t>(t)];
  }
  return s / (last + 1);
}

void death_order(const ExperimentConfig& config, const ResultsTable& table) {
  std::vector<double> rhos;
  for (int s = 0; s < config.seeds; ++s) {
    const LifetimeRecord& life = life_of(table, TopologyKind::Centralized, s);
    std::vector<double> death(life.sensor_death.begin(), life.sensor_death.end());
    rhos.push_back(spearman(death, life.sensor_distance));
  }
  const double mean = std::accumulate(rhos.begin(), rhos.end(), 0.0) / static_cast<double>(rhos.size());
  report(5, mean <= kSpearmanMax, "Centralized nodes farthest from the sink die first",
         fmt::format("mean Spearman {:.4f} over {} seeds, worst {:.4f}", mean, rhos.size(),
                     *std::ranges::max_element(rhos)));
}

void knee_ordering() {
  ExperimentConfig config;
  config.radio = RadioModel{};
  const CalibrationReport cal = calibrate(config, kKneeTargets);
  bool ok = cal.success;
  for (std::size_t i = 0; i < 4; ++i) {
    ok = ok && std::abs(cal.achieved[i] - kKneeTargets[i]) <= kKneeTol;
    if (i > 0) {
      ok = ok && cal.achieved[i - 1] < cal.achieved[i];
    }
  }
  report(6, ok, "calibrated first deaths ordered Cent < Hier < Dist < Dec, each within 5 of 10/20/40/60",
         fmt::format("scale {:.6f}, first deaths cent {:.2f} hier {:.2f} dist {:.2f} dec {:.2f}", cal.scale,
                     cal.achieved[0], cal.achieved[1], cal.achieved[2], cal.achieved[3]));
}

std::array<double, 4> mean_whole_death(const ExperimentConfig& config, const ResultsTable& table) {
  std::array<double, 4> out{};
  for (const LifetimeRecord& life : table.lifetimes) {
    out[topo(life.topology)] += life.whole_network_death / static_cast<double>(config.seeds);
  }
  return out;
}

void whole_death_ordering(const ExperimentConfig& config, const ResultsTable& table) {
  const auto w = mean_whole_death(config, table);
  const double outlasting = std::min(w[topo(TopologyKind::Decentralized)], w[topo(TopologyKind::Hierarchical)]);
  const double early = std::max(w[topo(TopologyKind::Distributed)], w[topo(TopologyKind::Centralized)]);
  report(7, outlasting + kWholeDeathTol >= early,
         "Decentralized and Hierarchical outlast Distributed and Centralized (10 step slack)",
         fmt::format("mean whole-network death dist {:.2f} hier {:.2f} cent {:.2f} dec {:.2f} (101 = never)",
                     w[0], w[1], w[2], w[3]));
}

void aggregation_penalty(const ExperimentConfig& config, const ResultsTable& table, const ErrorCube& cube) {
  bool ok = true;
  std::string detail;
  for (AlgorithmKind a : kAlgorithmKinds) {
    double dec = 0.0, dist = 0.0;
    for (int s = 0; s < config.seeds; ++s) {
      const int last = std::min({life_of(table, TopologyKind::Decentralized, s).first_death,
                                 life_of(table, TopologyKind::Distributed, s).first_death, table.t_max});
      const auto si = static_cast<std::size_t>(s);
      dec += window_mean(cube[topo(TopologyKind::Decentralized)][algo(a)][si], last) / config.seeds;
      dist += window_mean(cube[topo(TopologyKind::Distributed)][algo(a)][si], last) / config.seeds;
    }
    ok = ok && dec > dist;
    detail += fmt::format("{}{} {:.4f}>{:.4f}", detail.empty() ? "" : ", ", to_string(a), dec, dist);
  }
  report(8, ok, "active-phase error higher under Decentralized than Distributed for every algorithm",
         "dec>dist: " + detail);
}

void terminal_degradation(const ExperimentConfig& config, const ResultsTable& table, const ErrorCube& cube) {
  double lowest = 1.0;
  std::string where;
  int below = 0;
  for (TopologyKind k : kTopologyKinds) {
    for (AlgorithmKind a : kAlgorithmKinds) {
      double mean = 0.0;
      for (int s = 0; s < config.seeds; ++s) {
        const int t = std::min(life_of(table, k, s).whole_network_death, table.t_max);
        mean += cube[topo(k)][algo(a)][static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] / config.seeds;
      }
      below += mean < kTerminalError;
      if (mean < lowest) {
        lowest = mean;
        where = fmt::format("{} {}", to_string(k), to_string(a));
      }
    }
  }
  report(9, below == 0, "mean error at whole-network death at least 0.80 everywhere",
         fmt::format("{} of 24 curves below, lowest {:.4f} ({})", below, lowest, where));
}

void classifier_ranking(const ExperimentConfig& config, const ResultsTable& table, const ErrorCube& cube) {
  std::vector<std::pair<double, AlgorithmKind>> means;
  for (AlgorithmKind a : kAlgorithmKinds) {
    double mean = 0.0;
    for (int s = 0; s < config.seeds; ++s) {
      const int last = std::min(life_of(table, TopologyKind::Distributed, s).first_death, table.t_max);
      mean += window_mean(cube[topo(TopologyKind::Distributed)][algo(a)][static_cast<std::size_t>(s)], last) /
              config.seeds;
    }
    means.emplace_back(mean, a);
  }
  std::ranges::sort(means);
  const bool ok =
      means[0].second == AlgorithmKind::GradientBoosting || means[1].second == AlgorithmKind::GradientBoosting;
  std::string detail;
  for (const auto& [m, a] : means) {
    detail += fmt::format("{}{} {:.4f}", detail.empty() ? "" : ", ", to_string(a), m);
  }
  report(10, ok, "GTB among the two lowest active-phase errors under Distributed", detail);
}

}  // namespace

int main() {
  try {
    oracle_equivalence();
    aggregation_is_mean();
    generative_moments();
    routing_safety();

    const ExperimentConfig config;
    const FullRun first = full_run(config);
    const FullRun second = full_run(config);
    const ErrorCube cube = error_cube(config, first.table);

    death_order(config, first.table);
    knee_ordering();
    whole_death_ordering(config, first.table);
    aggregation_penalty(config, first.table, cube);
    terminal_degradation(config, first.table, cube);
    classifier_ranking(config, first.table, cube);
    report(11, first.raw == second.raw, "two default runs give byte-identical raw CSVs",
           fmt::format("{} bytes, {} rows", first.raw.size(), first.table.rows.size()));
    report(12, first.seconds <= kRuntimeSeconds, "full default experiment within 5 minutes",
           fmt::format("{:.1f} s and {:.1f} s", first.seconds, second.seconds));
  } catch (const std::exception& e) {
    fmt::print("acceptance: error: {}\n", e.what());
    return 2;
  }
  fmt::print("{} of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

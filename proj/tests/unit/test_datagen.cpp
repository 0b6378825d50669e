#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "wsnphm/datagen.hpp"

using namespace wsnphm;

namespace {

// Poisson CDF by the pmf recurrence p(k) = p(k-1) * lambda / k.
double poisson_cdf(double lambda, int k_max) {
  double p = std::exp(-lambda);
  double sum = p;
  for (int k = 1; k <= k_max; ++k) {
    p *= lambda / k;
    sum += p;
  }
  return sum;
}

// Inverse-CDF sampler, independent of the library's.
template <class Engine>
int poisson_inverse(double lambda, Engine& g) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(g);
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  while (u > cdf && k < 10000) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

double three_se(double p, double n) { return 3.0 * std::sqrt(p * (1 - p) / n) + 1e-12; }

}  // namespace

TEST(Sensing, NormalMeans) {
  EXPECT_DOUBLE_EQ(normal_mean(SensorKind::Temperature, 0), 20.0);
  EXPECT_DOUBLE_EQ(normal_mean(SensorKind::Pressure, 100), 10.0);
  EXPECT_DOUBLE_EQ(normal_mean(SensorKind::Humidity, 100), 57.75);
  EXPECT_DOUBLE_EQ(normal_stddev(SensorKind::Temperature), 1.0);
  EXPECT_DOUBLE_EQ(normal_stddev(SensorKind::Pressure), 0.3);
  EXPECT_DOUBLE_EQ(normal_stddev(SensorKind::Humidity), 12.5);
}

TEST(Sensing, FailureParamsAndBrokenConstants) {
  EXPECT_DOUBLE_EQ(failure_params(SensorKind::Temperature).mean, 350);
  EXPECT_DOUBLE_EQ(failure_params(SensorKind::Temperature).stddev, 20);
  EXPECT_DOUBLE_EQ(failure_params(SensorKind::Pressure).mean, 20);
  EXPECT_DOUBLE_EQ(failure_params(SensorKind::Pressure).stddev, 2.5);
  EXPECT_DOUBLE_EQ(failure_params(SensorKind::Humidity).mean, 80);
  EXPECT_DOUBLE_EQ(failure_params(SensorKind::Humidity).stddev, 10);
  Rng rng(1);
  for (double t : {0.0, 37.0, 100.0}) {
    EXPECT_EQ(draw_reading(SensorKind::Temperature, Condition::SensorBroken, t, rng), 2.0);
    EXPECT_EQ(draw_reading(SensorKind::Pressure, Condition::SensorBroken, t, rng), 1.0);
    EXPECT_EQ(draw_reading(SensorKind::Humidity, Condition::SensorBroken, t, rng), 3.0);
  }
}

TEST(Sensing, GaussianMomentsWithinThreeStandardErrors) {
  const int n = 1000000;
  for (SensorKind kind : kSensorKinds) {
    for (Condition c : {Condition::Normal, Condition::AreaFailure}) {
      const double t = 40.0;
      const GaussianParams p = c == Condition::Normal ? normal_params(kind, t) : failure_params(kind);
      SplitMix64 g(derive_seed(7, index_of(kind) * 2 + (c == Condition::Normal ? 0 : 1)));
      double sum = 0, sq = 0;
      for (int i = 0; i < n; ++i) {
        const double x = draw_reading(kind, c, t, g);
        sum += x;
        sq += x * x;
      }
      const double mean = sum / n;
      const double sd = std::sqrt(sq / n - mean * mean);
      EXPECT_NEAR(mean, p.mean, 3 * p.stddev / std::sqrt(n));
      // standard error of the sample std is about sigma / sqrt(2n)
      EXPECT_NEAR(sd, p.stddev, 3 * p.stddev / std::sqrt(2.0 * n));
    }
  }
}

TEST(Hazard, Values) {
  EXPECT_NEAR(hazard(0), 1.0 / 200.01, 1e-15);
  EXPECT_NEAR(hazard(0), 0.0049997, 1e-7);
  EXPECT_NEAR(hazard(100), 100.0, 1e-9);
  EXPECT_LT(hazard(50), hazard(60));
  EXPECT_DOUBLE_EQ(hazard(150), 100.0);
  EXPECT_NEAR(hazard(0, HazardMode::Literal), 200.01, 1e-12);
  for (int t = 0; t < 100; ++t) {
    EXPECT_LT(hazard(t), hazard(t + 1));
    EXPECT_GT(hazard(t), 0.0);
  }
}

TEST(Hazard, ConditionFromCount) {
  EXPECT_EQ(condition_from_count(0), Condition::Normal);
  EXPECT_EQ(condition_from_count(1), Condition::AreaFailure);
  EXPECT_EQ(condition_from_count(50), Condition::AreaFailure);
  EXPECT_EQ(condition_from_count(99), Condition::AreaFailure);
  EXPECT_EQ(condition_from_count(100), Condition::SensorBroken);
  EXPECT_EQ(condition_from_count(150), Condition::SensorBroken);
}

TEST(Hazard, BranchProbabilitiesMatchPoissonCdf) {
  for (double lambda : {0.005, 0.3, 1.0, 20.0, 100.0}) {
    const BranchProbabilities p = branch_probabilities(lambda);
    EXPECT_NEAR(p.normal, poisson_cdf(lambda, 0), 1e-12);
    EXPECT_NEAR(p.area_failure, poisson_cdf(lambda, 99) - poisson_cdf(lambda, 0), 1e-9);
    EXPECT_NEAR(p.sensor_broken, 1 - poisson_cdf(lambda, 99), 1e-9);
    EXPECT_NEAR(p.normal + p.area_failure + p.sensor_broken, 1.0, 1e-12);
  }
}

TEST(Hazard, DrawConditionFrequencies) {
  const int n = 1000000;
  for (double t : {0.0, 90.0, 99.0, 100.0}) {
    const BranchProbabilities p = branch_probabilities(hazard(t));
    SplitMix64 g(derive_seed(21, static_cast<std::uint64_t>(t)));
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
      ++counts[static_cast<int>(draw_condition(t, g))];
    }
    EXPECT_NEAR(counts[0] / double(n), p.normal, three_se(p.normal, n)) << t;
    EXPECT_NEAR(counts[1] / double(n), p.area_failure, three_se(p.area_failure, n)) << t;
    EXPECT_NEAR(counts[2] / double(n), p.sensor_broken, three_se(p.sensor_broken, n)) << t;
  }
}

TEST(Hazard, PoissonSamplerAgreesWithInverseCdf) {
  const int n = 1000000;
  for (double lambda : {0.005, 1.0, 100.0}) {
    std::poisson_distribution<std::uint64_t> pp(lambda);
    Rng a(5), b(6);
    double mean_lib = 0, mean_inv = 0;
    int zero_lib = 0, zero_inv = 0, big_lib = 0, big_inv = 0;
    for (int i = 0; i < n; ++i) {
      const auto x = pp(a);
      const int y = poisson_inverse(lambda, b);
      mean_lib += double(x);
      mean_inv += y;
      zero_lib += x == 0;
      zero_inv += y == 0;
      big_lib += x >= 100;
      big_inv += y >= 100;
    }
    const double se_mean = 3 * std::sqrt(lambda / n);
    EXPECT_NEAR(mean_lib / n, lambda, se_mean);
    EXPECT_NEAR(mean_inv / n, lambda, se_mean);
    const double p0 = poisson_cdf(lambda, 0);
    EXPECT_NEAR(zero_lib / double(n), p0, three_se(p0, n));
    EXPECT_NEAR(zero_inv / double(n), p0, three_se(p0, n));
    const double pb = 1 - poisson_cdf(lambda, 99);
    EXPECT_NEAR(big_lib / double(n), pb, three_se(pb, n) + 1e-4);
    EXPECT_NEAR(big_inv / double(n), pb, three_se(pb, n) + 1e-4);
  }
}

TEST(Thresholds, StrictComparison) {
  EXPECT_TRUE(exceeds_threshold(SensorKind::Temperature, 26.5));
  EXPECT_FALSE(exceeds_threshold(SensorKind::Temperature, 26.0));
  EXPECT_FALSE(exceeds_threshold(SensorKind::Pressure, 7.0));
  EXPECT_TRUE(exceeds_threshold(SensorKind::Humidity, 80.1));
}

TEST(GroundTruth, Labels) {
  Rng rng(1);
  EXPECT_EQ(area_ground_truth(Condition::AreaFailure, 10, rng), kLabelFailure);
  EXPECT_EQ(area_ground_truth(Condition::Normal, 10, rng), kLabelNormal);
}

TEST(GroundTruth, BrokenRedrawIsRenormalized) {
  const int n = 400000;
  for (double t : {50.0, 95.0, 99.0}) {
    const double lambda = hazard(t);
    const double p0 = std::exp(-lambda);
    const double p1 = poisson_cdf(lambda, 99) - p0;
    const double expected = p1 / (p0 + p1);
    EXPECT_NEAR(area_failure_probability(t), expected, 1e-9);
    SplitMix64 g(derive_seed(3, static_cast<std::uint64_t>(t)));
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      ones += area_ground_truth(Condition::SensorBroken, t, g);
    }
    EXPECT_NEAR(ones / double(n), expected, three_se(expected, n));
  }
}

TEST(TrainingSet, DefaultShape) {
  Rng rng(8);
  const Dataset d = generate_training_set(DatasetConfig{}, rng);
  ASSERT_EQ(d.size(), 4000u);
  EXPECT_EQ(d.feature_count(), 3u);
  for (const Instance& row : d.instances) {
    ASSERT_EQ(row.size(), 3u);
    EXPECT_EQ(row.missing_mask, std::vector<std::uint8_t>(3, 0));
    EXPECT_LE(row.label, 1);
  }
}

TEST(TrainingSet, SingleRowAndDeterminism) {
  DatasetConfig config;
  config.rows = 1;
  Rng a(4);
  const Dataset one = generate_training_set(config, a);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.instances[0].missing_mask, std::vector<std::uint8_t>(3, 0));

  Rng b(77), c(77);
  std::ostringstream sb, sc;
  write_dataset_csv(generate_training_set(DatasetConfig{}, b), sb);
  write_dataset_csv(generate_training_set(DatasetConfig{}, c), sc);
  EXPECT_EQ(sb.str(), sc.str());
}

TEST(TrainingSet, PrevalenceAtFixedAge) {
  const double t = 95.0;
  DatasetConfig config;
  config.rows = 200000;
  config.t_min = config.t_max = t;
  Rng rng(12);
  const Dataset d = generate_training_set(config, rng);
  const double lambda = hazard(t);
  const double p0 = std::exp(-lambda);
  const double p1 = poisson_cdf(lambda, 99) - p0;
  const double p2 = 1 - p0 - p1;
  const double expected = p1 + p2 * p1 / (p0 + p1);
  double ones = 0;
  for (const Instance& row : d.instances) {
    ones += row.label;
  }
  EXPECT_NEAR(ones / config.rows, expected, three_se(expected, config.rows));
}

TEST(TrainingSet, CsvRoundTrip) {
  DatasetConfig config;
  config.rows = 50;
  Rng rng(2);
  Dataset d = generate_training_set(config, rng);
  d.instances[3].missing_mask[1] = 1;
  std::stringstream io;
  write_dataset_csv(d, io);
  EXPECT_EQ(io.str().substr(0, 15), "f0,f1,f2,label\n");
  const Dataset back = read_dataset_csv(io);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back.instances[i].label, d.instances[i].label);
    EXPECT_EQ(back.instances[i].missing_mask, d.instances[i].missing_mask);
    for (std::size_t j = 0; j < 3; ++j) {
      if (!d.instances[i].missing_mask[j]) {
        EXPECT_DOUBLE_EQ(back.instances[i].features[j], d.instances[i].features[j]);
      }
    }
  }
}

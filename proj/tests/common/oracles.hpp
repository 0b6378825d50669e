#pragma once

// Brute-force reference classifiers used to check the library's models.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "wsnphm/datagen.hpp"

namespace oracle {

using wsnphm::Instance;
using wsnphm::Label;

// Gaussian naive Bayes evaluated as a plain product of densities.
inline Label naive_bayes(const std::vector<Instance>& train, double variance_floor, const std::vector<double>& x) {
  const std::size_t d = x.size();
  double score[2];
  for (int c = 0; c < 2; ++c) {
    std::vector<const Instance*> rows;
    for (const Instance& r : train) {
      if (r.label == c) {
        rows.push_back(&r);
      }
    }
    const double n = static_cast<double>(rows.size());
    double p = n / static_cast<double>(train.size());
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0;
      for (const Instance* r : rows) {
        mean += r->features[j];
      }
      mean /= n;
      double var = 0;
      for (const Instance* r : rows) {
        var += (r->features[j] - mean) * (r->features[j] - mean);
      }
      var = std::max(var / n, variance_floor);
      p *= std::exp(-(x[j] - mean) * (x[j] - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
    }
    score[c] = p;
  }
  return score[1] > score[0] ? 1 : 0;
}

// Exhaustive k-nearest scan on features standardised with the training
// mean and population standard deviation (1 when a column is constant).
inline Label nearest_neighbors(const std::vector<Instance>& train, int k, const std::vector<double>& x) {
  const std::size_t d = x.size();
  const double n = static_cast<double>(train.size());
  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (const Instance& r : train) {
      mean[j] += r.features[j];
    }
    mean[j] /= n;
    for (const Instance& r : train) {
      scale[j] += (r.features[j] - mean[j]) * (r.features[j] - mean[j]);
    }
    scale[j] = std::sqrt(scale[j] / n);
    if (scale[j] == 0.0) {
      scale[j] = 1.0;
    }
  }
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < train.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = (x[j] - mean[j]) / scale[j] - (train[i].features[j] - mean[j]) / scale[j];
      s += diff * diff;
    }
    dist.emplace_back(s, i);
  }
  std::ranges::sort(dist);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < take; ++i) {
    ones += train[dist[i].second].label;
  }
  return 2 * ones > take ? 1 : 0;
}

}  // namespace oracle

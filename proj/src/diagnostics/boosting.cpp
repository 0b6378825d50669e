#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wsnphm/diagnostics.hpp"
#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

namespace {

double sigmoid(double f) noexcept {
  return f >= 0.0 ? 1.0 / (1.0 + std::exp(-f)) : std::exp(f) / (1.0 + std::exp(f));
}

// log(1 + e^f) - y f, computed without overflow.
double log_loss(double f, double y) noexcept {
  return std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f))) - y * f;
}

double mean_loss(const std::vector<double>& scores, const std::vector<double>& ys) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    total += log_loss(scores[i], ys[i]);
  }
  return total / static_cast<double>(scores.size());
}

}  // namespace

GradientBoosting::GradientBoosting(const FeatureMatrix& data, const BoostingParams& params) : Model(data.cols()) {
  if (params.rounds < 0 || !(params.shrinkage > 0.0) || params.max_depth < 0) {
    throw TrainingError(fmt::format("bad boosting settings: {} rounds, shrinkage {}, depth {}", params.rounds,
                                    params.shrinkage, params.max_depth));
  }
  const std::size_t n = data.rows();
  std::vector<double> ys(n);
  double positives = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ys[i] = static_cast<double>(data.label(i));
    positives += ys[i];
  }
  const double p = std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  base_ = std::log(p / (1.0 - p));

  std::vector<double> scores(n, base_);
  double loss = mean_loss(scores, ys);
  history_.push_back(loss);

  TreeParams tree_params;
  tree_params.max_depth = params.max_depth;
  std::vector<double> residual(n);
  std::vector<double> hessian(n);
  std::vector<double> update(n);
  std::vector<double> trial(n);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = sigmoid(scores[i]);
      residual[i] = ys[i] - prob;
      hessian[i] = prob * (1.0 - prob);
    }
    DecisionTree tree = DecisionTree::fit_regressor(data, residual, hessian, tree_params);
    for (std::size_t i = 0; i < n; ++i) {
      update[i] = tree.value(data.row(i));
    }
    double step = params.shrinkage;
    double trial_loss = loss;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = scores[i] + step * update[i];
      }
      trial_loss = mean_loss(trial, ys);
      if (trial_loss <= loss) {
        break;
      }
      step *= 0.5;
    }
    if (trial_loss > loss) {
      step = 0.0;
      trial_loss = loss;
    } else {
      scores.swap(trial);
    }
    loss = trial_loss;
    history_.push_back(loss);
    trees_.push_back(std::move(tree));
    steps_.push_back(step);
  }
}

double GradientBoosting::score(std::span<const double> x) const {
  double f = base_;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    f += steps_[t] * trees_[t].value(x);
  }
  return f;
}

Label GradientBoosting::do_predict(std::span<const double> x) const {
  return score(x) > 0.0 ? kLabelFailure : kLabelNormal;
}

}  // namespace wsnphm::diag

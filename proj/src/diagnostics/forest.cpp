#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "wsnphm/diagnostics.hpp"
#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

RandomForest::RandomForest(const FeatureMatrix& data, const ForestParams& params, Rng& rng) : Model(data.cols()) {
  if (params.trees < 1 || params.max_depth < 0) {
    throw TrainingError(fmt::format("bad forest settings: {} trees, depth {}", params.trees, params.max_depth));
  }
  TreeParams tree;
  tree.max_depth = params.max_depth;
  tree.max_features = params.max_features != 0
                          ? params.max_features
                          : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                         std::floor(std::sqrt(static_cast<double>(data.cols())))));

  const std::uint64_t seed = rng();
  const std::size_t n = data.rows();
  std::vector<std::size_t> rows(n);
  trees_.reserve(static_cast<std::size_t>(params.trees));
  for (int t = 0; t < params.trees; ++t) {
    Rng tree_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t& r : rows) {
        r = pick(tree_rng);
      }
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees_.push_back(DecisionTree::fit_classifier(data, rows, tree, tree_rng));
  }
}

std::vector<double> RandomForest::importances() const {
  std::vector<double> total(feature_count(), 0.0);
  for (const DecisionTree& tree : trees_) {
    for (std::size_t j = 0; j < total.size(); ++j) {
      total[j] += tree.importances()[j];
    }
  }
  for (double& v : total) {
    v /= static_cast<double>(trees_.size());
  }
  return total;
}

Label RandomForest::do_predict(std::span<const double> x) const {
  std::size_t ones = 0;
  for (const DecisionTree& tree : trees_) {
    ones += tree.predict(x);
  }
  return 2 * ones > trees_.size() ? kLabelFailure : kLabelNormal;
}

TreeSelection::TreeSelection(const FeatureMatrix& data, const ForestParams& forest, const SelectionParams& params,
                             Rng& rng)
    : Model(data.cols()) {
  if (params.keep < 1) {
    throw TrainingError("feature selection must keep at least one feature");
  }
  const RandomForest ranking(data, forest, rng);
  const std::vector<double> importance = ranking.importances();
  std::vector<std::size_t> order(data.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  order.resize(std::min(params.keep, order.size()));
  std::ranges::sort(order);
  selected_ = std::move(order);
  forest_ = std::make_unique<RandomForest>(data.select_columns(selected_), forest, rng);
}

Label TreeSelection::do_predict(std::span<const double> x) const {
  std::vector<double> projected(selected_.size());
  for (std::size_t j = 0; j < selected_.size(); ++j) {
    projected[j] = x[selected_[j]];
  }
  return forest_->predict(projected);
}

}  // namespace wsnphm::diag

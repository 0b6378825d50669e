#include "wsnphm/diagnostics/tree.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double gini(double ones, double n) noexcept {
  if (n <= 0.0) {
    return 0.0;
  }
  const double p = ones / n;
  return 2.0 * p * (1.0 - p);
}

}  // namespace

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& data, const TreeParams& params, bool classify, std::span<const double> targets,
              std::span<const double> weights, Rng* rng)
      : data_(data), params_(params), classify_(classify), targets_(targets), weights_(weights), rng_(rng) {
    tree_.importances_.assign(data.cols(), 0.0);
    features_.resize(data.cols());
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    if (rows.empty()) {
      throw EmptyInputError("cannot fit a tree on zero rows");
    }
    if (params_.max_depth < 0) {
      throw TrainingError(fmt::format("tree depth must be non-negative, got {}", params_.max_depth));
    }
    grow(rows, 0);
    double total = 0.0;
    for (double v : tree_.importances_) {
      total += v;
    }
    if (total > 0.0) {
      for (double& v : tree_.importances_) {
        v /= total;
      }
    }
    return std::move(tree_);
  }

 private:
  // Target of row i: its label for classification, targets_[i] otherwise.
  double target(std::size_t i) const noexcept {
    return classify_ ? static_cast<double>(data_.label(i)) : targets_[i];
  }

  // Impurity times sample count, so children can be compared by summing.
  double weighted_impurity(double n, double sum, double sum_sq) const noexcept {
    if (n <= 0.0) {
      return 0.0;
    }
    if (classify_) {
      return n * gini(sum, n);
    }
    return std::max(sum_sq - sum * sum / n, 0.0);
  }

  double leaf_value(std::span<const std::size_t> rows) const noexcept {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i : rows) {
      num += target(i);
      den += weights_.empty() || classify_ ? 1.0 : weights_[i];
    }
    if (classify_) {
      return num / den;
    }
    return den > 1e-12 ? num / den : 0.0;
  }

  std::vector<std::size_t> candidate_features() {
    if (params_.max_features == 0 || params_.max_features >= features_.size() || rng_ == nullptr) {
      return features_;
    }
    std::vector<std::size_t> pool = features_;
    for (std::size_t i = 0; i < params_.max_features; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(*rng_)]);
    }
    pool.resize(params_.max_features);
    std::ranges::sort(pool);
    return pool;
  }

  Split best_split(std::span<const std::size_t> rows, double parent_impurity) {
    Split best;
    const auto n = static_cast<double>(rows.size());
    std::vector<std::pair<double, double>> column(rows.size());
    for (std::size_t f : candidate_features()) {
      double total = 0.0;
      double total_sq = 0.0;
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const double y = target(rows[k]);
        column[k] = {data_.at(rows[k], f), y};
        total += y;
        total_sq += y * y;
      }
      std::ranges::sort(column, [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_sum = 0.0;
      double left_sq = 0.0;
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        left_sum += column[k].second;
        left_sq += column[k].second * column[k].second;
        if (column[k].first == column[k + 1].first) {
          continue;
        }
        const auto nl = static_cast<double>(k + 1);
        const double children = weighted_impurity(nl, left_sum, left_sq) +
                                weighted_impurity(n - nl, total - left_sum, total_sq - left_sq);
        const double gain = parent_impurity - children;
        if (gain > best.gain + 1e-12) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (column[k].first + column[k + 1].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t>& rows, int depth) {
    const int index = static_cast<int>(tree_.nodes_.size());
    tree_.nodes_.push_back({});
    tree_.nodes_.back().samples = rows.size();
    tree_.nodes_.back().value = leaf_value(rows);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i : rows) {
      const double y = target(i);
      sum += y;
      sum_sq += y * y;
    }
    const double impurity = weighted_impurity(static_cast<double>(rows.size()), sum, sum_sq);
    if (depth >= params_.max_depth || rows.size() < params_.min_samples_split || impurity <= 1e-12) {
      return index;
    }
    const Split split = best_split(rows, impurity);
    if (split.feature < 0) {
      return index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : rows) {
      (data_.at(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    }
    tree_.importances_[static_cast<std::size_t>(split.feature)] += split.gain;
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = tree_.nodes_[static_cast<std::size_t>(index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  const FeatureMatrix& data_;
  TreeParams params_;
  bool classify_;
  std::span<const double> targets_;
  std::span<const double> weights_;
  Rng* rng_;
  std::vector<std::size_t> features_;
  DecisionTree tree_;
};

DecisionTree DecisionTree::fit_classifier(const FeatureMatrix& data, std::span<const std::size_t> rows,
                                          const TreeParams& params, Rng& rng) {
  TreeBuilder builder(data, params, true, {}, {}, &rng);
  return builder.build({rows.begin(), rows.end()});
}

DecisionTree DecisionTree::fit_regressor(const FeatureMatrix& data, std::span<const double> targets,
                                         std::span<const double> weights, const TreeParams& params) {
  if (targets.size() != data.rows() || (!weights.empty() && weights.size() != data.rows())) {
    throw FeatureLengthError(
        fmt::format("{} rows but {} targets and {} weights", data.rows(), targets.size(), weights.size()));
  }
  TreeBuilder builder(data, params, false, targets, weights, nullptr);
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return builder.build(std::move(rows));
}

int DecisionTree::leaf_of(std::span<const double> x) const noexcept {
  int i = 0;
  while (!nodes_[static_cast<std::size_t>(i)].leaf()) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return i;
}

double DecisionTree::value(std::span<const double> x) const noexcept {
  return nodes_[static_cast<std::size_t>(leaf_of(x))].value;
}

int DecisionTree::depth() const noexcept {
  // Nodes are stored in preorder, so a stack of (index, depth) suffices.
  int deepest = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (!node.leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

}  // namespace wsnphm::diag

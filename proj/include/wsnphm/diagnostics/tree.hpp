#pragma once

#include <span>
#include <vector>

#include "wsnphm/diagnostics/matrix.hpp"
#include "wsnphm/rng.hpp"

namespace wsnphm::diag {

struct TreeParams {
  int max_depth = 8;
  // Features tried at each split; 0 means all of them.
  std::size_t max_features = 0;
  std::size_t min_samples_split = 2;
};

struct TreeNode {
  // -1 on leaves.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Fraction of label 1 for classification trees, fitted value for regression.
  double value = 0.0;
  std::size_t samples = 0;

  bool leaf() const noexcept { return feature < 0; }
};

// Binary axis-aligned tree. Rows with x[feature] <= threshold go left.
// Split search is exhaustive over midpoints between consecutive distinct
// values; ties keep the lowest feature index, then the lowest threshold.
class DecisionTree {
 public:
  // Gini splits. `rows` may repeat indices (bootstrap samples count twice).
  static DecisionTree fit_classifier(const FeatureMatrix& data, std::span<const std::size_t> rows,
                                     const TreeParams& params, Rng& rng);

  // Squared-error splits on `targets`. Leaf values are sum(targets) /
  // sum(weights) over the leaf's rows, which gives the plain mean for unit
  // weights and a Newton step when weights are hessians.
  static DecisionTree fit_regressor(const FeatureMatrix& data, std::span<const double> targets,
                                    std::span<const double> weights, const TreeParams& params);

  double value(std::span<const double> x) const noexcept;
  Label predict(std::span<const double> x) const noexcept { return value(x) > 0.5 ? kLabelFailure : kLabelNormal; }

  // Sample-weighted impurity decrease per feature, normalised to sum to 1
  // (all zeros for a single-leaf tree).
  const std::vector<double>& importances() const noexcept { return importances_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  int depth() const noexcept;

  // Leaf index reached by `x`.
  int leaf_of(std::span<const double> x) const noexcept;
  void set_leaf_value(int leaf, double value) { nodes_.at(static_cast<std::size_t>(leaf)).value = value; }

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> importances_;

  friend class TreeBuilder;
};

}  // namespace wsnphm::diag

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wsnphm/datagen.hpp"
#include "wsnphm/diagnostics/matrix.hpp"
#include "wsnphm/diagnostics/tree.hpp"
#include "wsnphm/rng.hpp"

namespace wsnphm {

enum class AlgorithmKind : std::uint8_t { SVM, NaiveBayes, RandomForest, GradientBoosting, TreeSelection, NearestNeighbors };

inline constexpr std::array kAlgorithmKinds{AlgorithmKind::SVM,           AlgorithmKind::NaiveBayes,
                                            AlgorithmKind::RandomForest,  AlgorithmKind::GradientBoosting,
                                            AlgorithmKind::TreeSelection, AlgorithmKind::NearestNeighbors};

// Short names used in CSV output and config files: svm, nb, rf, gtb, tbfs, knn.
std::string_view to_string(AlgorithmKind kind) noexcept;
std::optional<AlgorithmKind> parse_algorithm(std::string_view name) noexcept;

struct SvmParams {
  int epochs = 50;
  double learning_rate = 0.01;
  double lambda = 1e-3;
};

struct NaiveBayesParams {
  double variance_floor = 1e-6;
};

struct ForestParams {
  int trees = 50;
  int max_depth = 8;
  // 0 picks max(1, floor(sqrt(d))).
  std::size_t max_features = 0;
  bool bootstrap = true;
};

struct BoostingParams {
  int rounds = 100;
  double shrinkage = 0.1;
  int max_depth = 3;
};

struct SelectionParams {
  std::size_t keep = 2;
};

struct NeighborsParams {
  int k = 5;
};

struct Hyperparameters {
  SvmParams svm;
  NaiveBayesParams nb;
  ForestParams rf;
  BoostingParams gtb;
  SelectionParams tbfs;
  NeighborsParams knn;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual AlgorithmKind kind() const noexcept = 0;

  std::size_t feature_count() const noexcept { return features_; }
  // Throws FeatureLengthError on a width mismatch.
  Label predict(std::span<const double> x) const;

 protected:
  explicit Model(std::size_t features) : features_(features) {}
  virtual Label do_predict(std::span<const double> x) const = 0;

 private:
  std::size_t features_;
};

namespace diag {

// Linear SVM: hinge loss plus L2 penalty on the weights, plain SGD on
// standardised features with step learning_rate / sqrt(epoch). The iterate
// with the lowest objective seen at an epoch boundary is kept.
class LinearSvm final : public Model {
 public:
  LinearSvm(const FeatureMatrix& data, const SvmParams& params, Rng& rng);
  AlgorithmKind kind() const noexcept override { return AlgorithmKind::SVM; }

  // lambda/2 |w|^2 + mean hinge, on the training rows.
  const std::vector<double>& objective_history() const noexcept { return history_; }
  double decision(std::span<const double> x) const;

 private:
  Label do_predict(std::span<const double> x) const override;
  Standardizer scaler_;
  std::vector<double> w_;
  double b_ = 0.0;
  std::vector<double> history_;
};

// Gaussian naive Bayes with per-class ML variances, scored in log space.
class NaiveBayes final : public Model {
 public:
  NaiveBayes(const FeatureMatrix& data, const NaiveBayesParams& params);
  AlgorithmKind kind() const noexcept override { return AlgorithmKind::NaiveBayes; }

  double log_posterior(std::span<const double> x, Label label) const;
  double prior(Label label) const noexcept { return prior_[label]; }
  const std::vector<double>& mean(Label label) const noexcept { return mean_[label]; }
  const std::vector<double>& variance(Label label) const noexcept { return var_[label]; }

 private:
  Label do_predict(std::span<const double> x) const override;
  std::array<double, 2> prior_{};
  std::array<std::vector<double>, 2> mean_;
  std::array<std::vector<double>, 2> var_;
};

class RandomForest final : public Model {
 public:
  RandomForest(const FeatureMatrix& data, const ForestParams& params, Rng& rng);
  AlgorithmKind kind() const noexcept override { return AlgorithmKind::RandomForest; }

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  // Mean of the per-tree normalised importances.
  std::vector<double> importances() const;

 private:
  Label do_predict(std::span<const double> x) const override;
  std::vector<DecisionTree> trees_;
};

// Logistic loss, depth-limited regression trees with Newton leaf values.
// A round whose step would raise the training loss is retried at half the
// step until it does not.
class GradientBoosting final : public Model {
 public:
  GradientBoosting(const FeatureMatrix& data, const BoostingParams& params);
  AlgorithmKind kind() const noexcept override { return AlgorithmKind::GradientBoosting; }

  double score(std::span<const double> x) const;
  // Mean log loss after the prior and after each round.
  const std::vector<double>& loss_history() const noexcept { return history_; }

 private:
  Label do_predict(std::span<const double> x) const override;
  double base_ = 0.0;
  std::vector<DecisionTree> trees_;
  std::vector<double> steps_;
  std::vector<double> history_;
};

// Ranks features by forest importance, keeps the top `keep` and refits the
// forest on them. Importance ties go to the lower feature index.
class TreeSelection final : public Model {
 public:
  TreeSelection(const FeatureMatrix& data, const ForestParams& forest, const SelectionParams& params, Rng& rng);
  AlgorithmKind kind() const noexcept override { return AlgorithmKind::TreeSelection; }

  const std::vector<std::size_t>& selected() const noexcept { return selected_; }

 private:
  Label do_predict(std::span<const double> x) const override;
  std::vector<std::size_t> selected_;
  std::unique_ptr<RandomForest> forest_;
};

// k nearest neighbours by Euclidean distance on standardised features.
// Distance ties go to the lower training index, vote ties to label 0.
class NearestNeighbors final : public Model {
 public:
  NearestNeighbors(const FeatureMatrix& data, const NeighborsParams& params);
  AlgorithmKind kind() const noexcept override { return AlgorithmKind::NearestNeighbors; }

  const Standardizer& scaler() const noexcept { return scaler_; }

 private:
  struct KdNode {
    std::size_t begin;
    std::size_t end;
    std::size_t axis;
    double split;
    int left;
    int right;
  };

  int build(std::size_t begin, std::size_t end);
  Label do_predict(std::span<const double> x) const override;
  Standardizer scaler_;
  FeatureMatrix exemplars_;
  std::size_t k_;
  // Exemplar ids, permuted so every tree node owns a contiguous range.
  std::vector<std::size_t> order_;
  std::vector<KdNode> nodes_;
};

}  // namespace diag

// Throws EmptyInputError on an empty set and TrainingError when only one
// class is present or a hyperparameter is out of range.
std::unique_ptr<Model> train(AlgorithmKind kind, const Dataset& data, const Hyperparameters& params, Rng& rng);

// Fraction of misclassified instances. Throws EmptyInputError.
double error_rate(const Model& model, std::span<const Instance> instances);

}  // namespace wsnphm

#include <algorithm>

#include <fmt/format.h>

#include "wsnphm/diagnostics.hpp"
#include "wsnphm/errors.hpp"

namespace wsnphm {

std::string_view to_string(AlgorithmKind kind) noexcept {
  switch (kind) {
    case AlgorithmKind::SVM:
      return "svm";
    case AlgorithmKind::NaiveBayes:
      return "nb";
    case AlgorithmKind::RandomForest:
      return "rf";
    case AlgorithmKind::GradientBoosting:
      return "gtb";
    case AlgorithmKind::TreeSelection:
      return "tbfs";
    case AlgorithmKind::NearestNeighbors:
      return "knn";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm(std::string_view name) noexcept {
  for (AlgorithmKind kind : kAlgorithmKinds) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  return std::nullopt;
}

Label Model::predict(std::span<const double> x) const {
  if (x.size() != features_) {
    throw FeatureLengthError(fmt::format("model expects {} features, got {}", features_, x.size()));
  }
  return do_predict(x);
}

std::unique_ptr<Model> train(AlgorithmKind kind, const Dataset& data, const Hyperparameters& params, Rng& rng) {
  if (data.instances.empty()) {
    throw EmptyInputError("training set is empty");
  }
  const diag::FeatureMatrix matrix(data);
  if (matrix.cols() == 0) {
    throw TrainingError("training rows have no features");
  }
  const auto ones = std::ranges::count(matrix.labels(), kLabelFailure);
  if (ones == 0 || static_cast<std::size_t>(ones) == matrix.rows()) {
    throw TrainingError(fmt::format("training set holds a single class ({} of {} rows labelled failure)", ones,
                                    matrix.rows()));
  }
  switch (kind) {
    case AlgorithmKind::SVM:
      return std::make_unique<diag::LinearSvm>(matrix, params.svm, rng);
    case AlgorithmKind::NaiveBayes:
      return std::make_unique<diag::NaiveBayes>(matrix, params.nb);
    case AlgorithmKind::RandomForest:
      return std::make_unique<diag::RandomForest>(matrix, params.rf, rng);
    case AlgorithmKind::GradientBoosting:
      return std::make_unique<diag::GradientBoosting>(matrix, params.gtb);
    case AlgorithmKind::TreeSelection:
      return std::make_unique<diag::TreeSelection>(matrix, params.rf, params.tbfs, rng);
    case AlgorithmKind::NearestNeighbors:
      return std::make_unique<diag::NearestNeighbors>(matrix, params.knn);
  }
  throw TrainingError("unknown algorithm");
}

double error_rate(const Model& model, std::span<const Instance> instances) {
  if (instances.empty()) {
    throw EmptyInputError("cannot score an empty instance set");
  }
  std::size_t wrong = 0;
  for (const Instance& inst : instances) {
    if (model.predict(inst.features) != inst.label) {
      ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(instances.size());
}

}  // namespace wsnphm

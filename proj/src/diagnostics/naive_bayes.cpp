#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wsnphm/diagnostics.hpp"
#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

NaiveBayes::NaiveBayes(const FeatureMatrix& data, const NaiveBayesParams& params) : Model(data.cols()) {
  if (!(params.variance_floor > 0.0)) {
    throw TrainingError(fmt::format("variance floor must be positive, got {}", params.variance_floor));
  }
  std::array<double, 2> counts{};
  for (Label c : {kLabelNormal, kLabelFailure}) {
    mean_[c].assign(data.cols(), 0.0);
    var_[c].assign(data.cols(), 0.0);
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Label c = data.label(i);
    counts[c] += 1.0;
    for (std::size_t j = 0; j < data.cols(); ++j) {
      mean_[c][j] += data.at(i, j);
    }
  }
  for (Label c : {kLabelNormal, kLabelFailure}) {
    for (double& m : mean_[c]) {
      m /= counts[c];
    }
  }
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Label c = data.label(i);
    for (std::size_t j = 0; j < data.cols(); ++j) {
      const double d = data.at(i, j) - mean_[c][j];
      var_[c][j] += d * d;
    }
  }
  for (Label c : {kLabelNormal, kLabelFailure}) {
    for (double& v : var_[c]) {
      v = std::max(v / counts[c], params.variance_floor);
    }
    prior_[c] = counts[c] / static_cast<double>(data.rows());
  }
}

double NaiveBayes::log_posterior(std::span<const double> x, Label label) const {
  double total = std::log(prior_[label]);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = var_[label][j];
    const double d = x[j] - mean_[label][j];
    total += -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
  }
  return total;
}

Label NaiveBayes::do_predict(std::span<const double> x) const {
  return log_posterior(x, kLabelFailure) > log_posterior(x, kLabelNormal) ? kLabelFailure : kLabelNormal;
}

}  // namespace wsnphm::diag

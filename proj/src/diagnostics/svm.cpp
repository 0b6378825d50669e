#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "wsnphm/diagnostics.hpp"
#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

namespace {

double objective(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                 const std::vector<double>& w, double b, double lambda) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double margin = ys[i] * (std::inner_product(w.begin(), w.end(), xs[i].begin(), 0.0) + b);
    hinge += std::max(0.0, 1.0 - margin);
  }
  const double norm = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return 0.5 * lambda * norm + hinge / static_cast<double>(xs.size());
}

}  // namespace

LinearSvm::LinearSvm(const FeatureMatrix& data, const SvmParams& params, Rng& rng)
    : Model(data.cols()), scaler_(data), w_(data.cols(), 0.0) {
  if (params.epochs < 1 || !(params.learning_rate > 0.0) || !(params.lambda >= 0.0)) {
    throw TrainingError(fmt::format("bad svm settings: epochs {}, learning rate {}, lambda {}", params.epochs,
                                    params.learning_rate, params.lambda));
  }
  std::vector<std::vector<double>> xs(data.rows());
  std::vector<double> ys(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    xs[i] = scaler_.apply(data.row(i));
    ys[i] = data.label(i) == kLabelFailure ? 1.0 : -1.0;
  }

  std::vector<double> w(data.cols(), 0.0);
  double b = 0.0;
  double best = objective(xs, ys, w, b, params.lambda);
  history_.push_back(best);

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 1; epoch <= params.epochs; ++epoch) {
    const double eta = params.learning_rate / std::sqrt(static_cast<double>(epoch));
    std::ranges::shuffle(order, rng);
    for (std::size_t i : order) {
      const double margin = ys[i] * (std::inner_product(w.begin(), w.end(), xs[i].begin(), 0.0) + b);
      const double decay = 1.0 - eta * params.lambda;
      for (double& wj : w) {
        wj *= decay;
      }
      if (margin < 1.0) {
        for (std::size_t j = 0; j < w.size(); ++j) {
          w[j] += eta * ys[i] * xs[i][j];
        }
        b += eta * ys[i];
      }
    }
    const double obj = objective(xs, ys, w, b, params.lambda);
    history_.push_back(obj);
    if (obj < best) {
      best = obj;
      w_ = w;
      b_ = b;
    }
  }
}

double LinearSvm::decision(std::span<const double> x) const {
  const std::vector<double> z = scaler_.apply(x);
  return std::inner_product(w_.begin(), w_.end(), z.begin(), 0.0) + b_;
}

Label LinearSvm::do_predict(std::span<const double> x) const {
  return decision(x) > 0.0 ? kLabelFailure : kLabelNormal;
}

}  // namespace wsnphm::diag

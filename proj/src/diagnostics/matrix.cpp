#include "wsnphm/diagnostics/matrix.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

FeatureMatrix::FeatureMatrix(const Dataset& dataset)
    : FeatureMatrix(dataset.size(), dataset.instances.empty() ? 0 : dataset.instances.front().size()) {
  for (std::size_t i = 0; i < rows_; ++i) {
    const Instance& inst = dataset.instances[i];
    if (inst.size() != cols_) {
      throw FeatureLengthError(fmt::format("row {} has {} features, expected {}", i, inst.size(), cols_));
    }
    std::copy(inst.features.begin(), inst.features.end(), row(i).begin());
    labels_[i] = inst.label;
  }
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> columns) const {
  FeatureMatrix out(rows_, columns.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      out.values_[i * columns.size() + j] = at(i, columns[j]);
    }
    out.labels_[i] = labels_[i];
  }
  return out;
}

Standardizer::Standardizer(const FeatureMatrix& data) : mean_(data.cols(), 0.0), scale_(data.cols(), 1.0) {
  const auto n = static_cast<double>(data.rows());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      sum += data.at(i, j);
    }
    mean_[j] = sum / n;
    double sq = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const double d = data.at(i, j) - mean_[j];
      sq += d * d;
    }
    const double sd = std::sqrt(sq / n);
    // Constant columns pass through centred but unscaled.
    scale_[j] = sd > 0.0 ? sd : 1.0;
  }
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const noexcept {
  for (std::size_t j = 0; j < in.size(); ++j) {
    out[j] = (in[j] - mean_[j]) / scale_[j];
  }
}

std::vector<double> Standardizer::apply(std::span<const double> in) const {
  std::vector<double> out(in.size());
  apply(in, out);
  return out;
}

}  // namespace wsnphm::diag

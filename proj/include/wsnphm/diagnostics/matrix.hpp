#pragma once

#include <span>
#include <vector>

#include "wsnphm/datagen.hpp"

namespace wsnphm::diag {

// Row-major copy of a dataset's features and labels.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols), labels_(rows) {}
  explicit FeatureMatrix(const Dataset& dataset);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  Label label(std::size_t i) const noexcept { return labels_[i]; }
  void set_label(std::size_t i, Label label) noexcept { labels_[i] = label; }
  const std::vector<Label>& labels() const noexcept { return labels_; }

  // Keeps only the listed columns, in the given order.
  FeatureMatrix select_columns(std::span<const std::size_t> columns) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<Label> labels_;
};

// Per-feature z-scoring with statistics taken from training data only.
class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const FeatureMatrix& data);

  void apply(std::span<const double> in, std::span<double> out) const noexcept;
  std::vector<double> apply(std::span<const double> in) const;
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& scale() const noexcept { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace wsnphm::diag

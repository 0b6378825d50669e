#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "wsnphm/diagnostics.hpp"
#include "wsnphm/errors.hpp"

namespace wsnphm::diag {

namespace {

constexpr std::size_t kLeafSize = 8;

}  // namespace

NearestNeighbors::NearestNeighbors(const FeatureMatrix& data, const NeighborsParams& params)
    : Model(data.cols()), scaler_(data), exemplars_(data.rows(), data.cols()) {
  if (params.k < 1) {
    throw TrainingError(fmt::format("k must be at least 1, got {}", params.k));
  }
  k_ = std::min(static_cast<std::size_t>(params.k), data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    scaler_.apply(data.row(i), exemplars_.row(i));
    exemplars_.set_label(i, data.label(i));
  }
  order_.resize(data.rows());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  build(0, order_.size());
}

// k-d tree over order_[begin, end): split on the widest coordinate at the
// median. Returns the node index.
int NearestNeighbors::build(std::size_t begin, std::size_t end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, 0, 0.0, -1, -1});
  if (end - begin <= kLeafSize) {
    return index;
  }
  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t j = 0; j < exemplars_.cols(); ++j) {
    double lo = exemplars_.at(order_[begin], j);
    double hi = lo;
    for (std::size_t r = begin; r < end; ++r) {
      lo = std::min(lo, exemplars_.at(order_[r], j));
      hi = std::max(hi, exemplars_.at(order_[r], j));
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = j;
    }
  }
  if (widest <= 0.0) {
    return index;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  const auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
  std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     return std::pair{exemplars_.at(a, axis), a} < std::pair{exemplars_.at(b, axis), b};
                   });
  const double split = exemplars_.at(order_[mid], axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  KdNode& node = nodes_[static_cast<std::size_t>(index)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return index;
}

Label NearestNeighbors::do_predict(std::span<const double> x) const {
  const std::vector<double> z = scaler_.apply(x);
  // Best k as (squared distance, index), kept sorted; the pair order gives
  // the lower index on equal distances whatever order nodes are visited in.
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(k_ + 1);
  auto consider = [&](std::size_t i) {
    const auto row = exemplars_.row(i);
    double d2 = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double d = row[j] - z[j];
      d2 += d * d;
    }
    const std::pair<double, std::size_t> entry{d2, i};
    if (best.size() == k_ && !(entry < best.back())) {
      return;
    }
    best.insert(std::upper_bound(best.begin(), best.end(), entry), entry);
    if (best.size() > k_) {
      best.pop_back();
    }
  };

  std::vector<int> stack{0};
  std::vector<double> bound{0.0};
  while (!stack.empty()) {
    const KdNode& node = nodes_[static_cast<std::size_t>(stack.back())];
    const double floor = bound.back();
    stack.pop_back();
    bound.pop_back();
    // A tie at the bound can still win on index, so only prune when strictly
    // further than the current k-th neighbour.
    if (best.size() == k_ && floor > best.back().first) {
      continue;
    }
    if (node.left < 0) {
      for (std::size_t r = node.begin; r < node.end; ++r) {
        consider(order_[r]);
      }
      continue;
    }
    const double gap = z[node.axis] - node.split;
    const int near_side = gap < 0.0 ? node.left : node.right;
    const int far_side = gap < 0.0 ? node.right : node.left;
    stack.push_back(far_side);
    bound.push_back(std::max(floor, gap * gap));
    stack.push_back(near_side);
    bound.push_back(floor);
  }

  std::size_t ones = 0;
  for (const auto& [d2, i] : best) {
    ones += exemplars_.label(i);
  }
  return 2 * ones > best.size() ? kLabelFailure : kLabelNormal;
}

}  // namespace wsnphm::diag

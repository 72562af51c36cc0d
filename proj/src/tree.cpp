/*
 * Copyright 2026 The copyforge Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "copyforge/models.hpp"

namespace copyforge {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  // Sum over both children of (sum_c n_c^2) / n. Larger is purer.
  double score = -1.0;
};

struct PendingNode {
  int id;
  std::size_t begin;
  std::size_t end;
  int depth;
};

Label Majority(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<Label>(best);
}

class TreeBuilder {
 public:
  TreeBuilder(const PointSet& points, std::span<const Label> labels, int k,
              const TreeOptions& options)
      : points_(points),
        labels_(labels),
        k_(k),
        options_(options),
        rng_(MakeRng(options.seed)),
        order_(labels.size()),
        features_(points.dim()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  std::vector<TreeNode> Build() {
    std::vector<TreeNode> nodes(1);
    std::vector<PendingNode> stack{{0, 0, order_.size(), 0}};
    std::vector<std::size_t> counts(k_);

    while (!stack.empty()) {
      const PendingNode node = stack.back();
      stack.pop_back();

      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = node.begin; i < node.end; ++i) ++counts[labels_[order_[i]]];
      const Label majority = Majority(counts);
      const std::size_t n = node.end - node.begin;
      nodes[node.id].label = majority;

      if (counts[majority] == n) continue;
      if (options_.max_depth && node.depth >= *options_.max_depth) continue;

      const Split split = FindSplit(node.begin, node.end, counts);
      if (split.feature < 0) continue;  // all remaining points identical

      const auto mid_it = std::partition(
          order_.begin() + node.begin, order_.begin() + node.end,
          [&](std::size_t r) {
            return points_.at(r, split.feature) <= split.threshold;
          });
      const std::size_t mid = static_cast<std::size_t>(mid_it - order_.begin());

      const int left = static_cast<int>(nodes.size());
      nodes.emplace_back();
      nodes.emplace_back();
      nodes[node.id].feature = split.feature;
      nodes[node.id].threshold = split.threshold;
      nodes[node.id].left = left;
      nodes[node.id].right = left + 1;

      stack.push_back({left + 1, mid, node.end, node.depth + 1});
      stack.push_back({left, node.begin, mid, node.depth + 1});
    }
    return nodes;
  }

 private:
  Split FindSplit(std::size_t begin, std::size_t end,
                  std::span<const std::size_t> counts) {
    const std::size_t d = points_.dim();
    Split best;
    if (!options_.max_features || *options_.max_features >= d) {
      for (std::size_t f = 0; f < d; ++f) ScanFeature(f, begin, end, counts, best);
      return best;
    }

    // Random subset for this node, scanned in ascending index order so the
    // tie rule still applies. Fall back to the rest when the subset has no
    // usable split.
    const std::size_t m = std::max<std::size_t>(1, *options_.max_features);
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, d - 1);
      std::swap(features_[i], features_[pick(rng_)]);
    }
    std::vector<std::size_t> chosen(features_.begin(), features_.begin() + m);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t f : chosen) ScanFeature(f, begin, end, counts, best);
    if (best.feature >= 0) return best;

    std::vector<std::size_t> rest(features_.begin() + m, features_.end());
    std::sort(rest.begin(), rest.end());
    for (std::size_t f : rest) ScanFeature(f, begin, end, counts, best);
    return best;
  }

  void ScanFeature(std::size_t feature, std::size_t begin, std::size_t end,
                   std::span<const std::size_t> counts, Split& best) {
    const std::size_t n = end - begin;
    column_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = order_[begin + i];
      column_[i] = {points_.at(r, feature), labels_[r]};
    }
    std::sort(column_.begin(), column_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (!(column_.front().first < column_.back().first)) return;

    left_.assign(k_, 0);
    right_.assign(counts.begin(), counts.end());
    double left_sq = 0.0;
    double right_sq = 0.0;
    for (std::size_t c : counts) right_sq += static_cast<double>(c) * c;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Label c = column_[i].second;
      left_sq += 2.0 * left_[c] + 1.0;
      right_sq -= 2.0 * right_[c] - 1.0;
      ++left_[c];
      --right_[c];

      const double a = column_[i].first;
      const double b = column_[i + 1].first;
      if (!(a < b)) continue;

      const double n_left = static_cast<double>(i + 1);
      const double n_right = static_cast<double>(n - i - 1);
      const double score = left_sq / n_left + right_sq / n_right;
      if (best.feature < 0 || score > best.score + 1e-12 * std::abs(best.score)) {
        double threshold = a + (b - a) / 2.0;
        if (!(threshold < b)) threshold = a;
        best = {static_cast<int>(feature), threshold, score};
      }
    }
  }

  const PointSet& points_;
  std::span<const Label> labels_;
  int k_;
  const TreeOptions& options_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, Label>> column_;
  std::vector<std::size_t> left_;
  std::vector<std::size_t> right_;
};

}  // namespace

TreeModel::TreeModel(std::size_t dim, int k, std::optional<int> max_depth,
                     std::vector<TreeNode> nodes)
    : dim_(dim), k_(k), max_depth_(max_depth), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArgument, "tree has no nodes");
  for (const auto& node : nodes_) {
    if (node.is_leaf()) {
      if (node.label < 0 || node.label >= k_) {
        throw Error(ErrorCode::kInvalidArgument, "tree leaf label out of range");
      }
      continue;
    }
    const auto count = static_cast<int>(nodes_.size());
    if (static_cast<std::size_t>(node.feature) >= dim_ || node.left <= 0 ||
        node.right <= 0 || node.left >= count || node.right >= count) {
      throw Error(ErrorCode::kInvalidArgument, "malformed tree node");
    }
  }
}

Label TreeModel::predict_one(std::span<const double> x) const {
  const TreeNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    node = &nodes_[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return node->label;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.is_leaf(); }));
}

int TreeModel::depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  // Children always follow their parent in the node array.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

TreeModel TrainTree(const PointSet& points, std::span<const Label> labels, int k,
                    const TreeOptions& options) {
  if (points.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} points but {} labels", points.size(), labels.size()));
  }
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot train a tree on no data");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "class count must be positive");
  for (Label t : labels) {
    if (t < 0 || t >= k) throw Error(ErrorCode::kInvalidArgument, "label out of range");
  }
  if (options.max_depth && *options.max_depth < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_depth must be non-negative");
  }
  TreeBuilder builder(points, labels, k, options);
  return TreeModel(points.dim(), k, options.max_depth, builder.Build());
}

TreeModel TrainTree(const Dataset& data, std::optional<int> max_depth) {
  TreeOptions options;
  options.max_depth = max_depth;
  return TrainTree(data.points, data.labels, data.k, options);
}

}  // namespace copyforge

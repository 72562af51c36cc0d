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
#include <thread>

#include <fmt/core.h>

#include "copyforge/models.hpp"

namespace copyforge {

ForestModel::ForestModel(std::size_t dim, int k, double feature_fraction,
                         bool bootstrap, std::vector<RngSeed> tree_seeds,
                         std::vector<TreeModel> trees)
    : dim_(dim),
      k_(k),
      feature_fraction_(feature_fraction),
      bootstrap_(bootstrap),
      tree_seeds_(std::move(tree_seeds)),
      trees_(std::move(trees)) {
  if (trees_.empty()) throw Error(ErrorCode::kInvalidArgument, "forest needs at least one tree");
  if (tree_seeds_.size() != trees_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one seed per tree required");
  }
}

Label ForestModel::predict_one(std::span<const double> x) const {
  std::vector<int> votes(k_, 0);
  for (const auto& tree : trees_) ++votes[tree.predict_one(x)];
  return static_cast<Label>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

ForestModel TrainForest(const Dataset& data, const ForestOptions& options,
                        RngSeed seed) {
  if (options.trees < 1) throw Error(ErrorCode::kInvalidArgument, "trees_count must be >= 1");
  if (data.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot train a forest on no data");
  if (data.points.size() != data.labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "points and labels differ in length");
  }
  const std::size_t d = data.dim();
  const double fraction = options.feature_fraction.value_or(
      std::sqrt(static_cast<double>(d)) / static_cast<double>(d));
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("feature_fraction {} outside (0, 1]", fraction));
  }
  const auto max_features = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(d))));

  const auto count = static_cast<std::size_t>(options.trees);
  std::vector<RngSeed> seeds(count);
  for (std::size_t t = 0; t < count; ++t) seeds[t] = DeriveSeed(seed, t);
  std::vector<TreeModel> trees(count);

  auto train_one = [&](std::size_t t) {
    TreeOptions tree_options;
    tree_options.max_depth = options.max_depth;
    tree_options.max_features = max_features;
    tree_options.seed = DeriveSeed(seeds[t], 1);
    if (!options.bootstrap) {
      trees[t] = TrainTree(data.points, data.labels, data.k, tree_options);
      return;
    }
    Rng rng = MakeRng(seeds[t]);
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    std::vector<std::size_t> rows(data.size());
    for (auto& r : rows) r = pick(rng);
    const Dataset sample = data.subset(rows);
    trees[t] = TrainTree(sample.points, sample.labels, data.k, tree_options);
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(count));
  if (threads == 1) {
    for (std::size_t t = 0; t < count; ++t) train_one(t);
  } else {
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < count; t += threads) train_one(t);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  return ForestModel(d, data.k, fraction, options.bootstrap, std::move(seeds),
                     std::move(trees));
}

}  // namespace copyforge

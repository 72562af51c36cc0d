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

#include <fmt/core.h>

#include "copyforge/models.hpp"

namespace copyforge {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t ModelDim(const Hypothesis& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kTree: return "tree";
    case Family::kForest: return "forest";
    case Family::kLogistic: return "logistic";
    case Family::kRbf: return "rbf";
  }
  return "unknown";
}

Family ParseFamily(std::string_view name) {
  if (name == "tree" || name == "decision_tree") return Family::kTree;
  if (name == "forest" || name == "random_forest") return Family::kForest;
  if (name == "logistic" || name == "logistic_regression") return Family::kLogistic;
  if (name == "rbf" || name == "rbf_svm") return Family::kRbf;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown model family '{}'", name));
}

Hypothesis TrainHypothesis(const HypothesisSpec& spec, const Dataset& data,
                           RngSeed seed) {
  switch (spec.family) {
    case Family::kTree: {
      TreeOptions options = spec.tree;
      options.seed = seed;
      return TrainTree(data.points, data.labels, data.k, options);
    }
    case Family::kForest: return TrainForest(data, spec.forest, seed);
    case Family::kLogistic: return TrainLogistic(data, spec.logistic, seed);
    case Family::kRbf: return TrainRbf(data, spec.kernel, seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model family");
}

CopyModel::CopyModel(Hypothesis model, std::size_t input_dim,
                     std::vector<std::size_t> excluded_features)
    : model_(std::move(model)), input_dim_(input_dim), excluded_(std::move(excluded_features)) {
  std::sort(excluded_.begin(), excluded_.end());
  if (std::adjacent_find(excluded_.begin(), excluded_.end()) != excluded_.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate excluded feature");
  }
  for (std::size_t j = 0; j < input_dim_; ++j) {
    if (!std::binary_search(excluded_.begin(), excluded_.end(), j)) kept_.push_back(j);
  }
  if (!excluded_.empty() && excluded_.back() >= input_dim_) {
    throw Error(ErrorCode::kInvalidArgument, "excluded feature out of range");
  }
  if (ModelDim(model_) != kept_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("model expects {} features but {} remain after exclusion",
                            ModelDim(model_), kept_.size()));
  }
}

Label CopyModel::predict_one(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("expected dimension {}, got {}", input_dim_, x.size()));
  }
  if (excluded_.empty()) {
    return std::visit([&](const auto& m) { return m.predict_one(x); }, model_);
  }
  std::vector<double> projected(kept_.size());
  for (std::size_t j = 0; j < kept_.size(); ++j) projected[j] = x[kept_[j]];
  return std::visit([&](const auto& m) { return m.predict_one(projected); }, model_);
}

std::vector<Label> CopyModel::predict(const PointSet& points) const {
  CheckDimension(points, input_dim_, "predict");
  std::vector<Label> out(points.size());
  if (excluded_.empty()) {
    std::visit(
        [&](const auto& m) {
          for (std::size_t i = 0; i < points.size(); ++i) out[i] = m.predict_one(points[i]);
        },
        model_);
    return out;
  }
  const PointSet projected = points.select_columns(kept_);
  std::visit(
      [&](const auto& m) {
        for (std::size_t i = 0; i < projected.size(); ++i) out[i] = m.predict_one(projected[i]);
      },
      model_);
  return out;
}

Family CopyModel::family() const {
  return std::visit(Overloaded{
                        [](const TreeModel&) { return Family::kTree; },
                        [](const ForestModel&) { return Family::kForest; },
                        [](const LogisticModel&) { return Family::kLogistic; },
                        [](const KernelModel&) { return Family::kRbf; },
                    },
                    model_);
}

int CopyModel::num_classes() const {
  return std::visit([](const auto& m) { return m.num_classes(); }, model_);
}

std::vector<Label> Predict(const CopyModel& model, const PointSet& points) {
  return model.predict(points);
}

}  // namespace copyforge

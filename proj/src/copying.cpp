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

#include "copyforge/copying.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace copyforge {

void CapacityConfig::validate() const {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "capacity grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] < grid[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "capacity grid must be strictly decreasing");
    }
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "validation_fraction must lie in (0, 1)");
  }
}

HypothesisSpec WithCapacity(HypothesisSpec spec, double value) {
  switch (spec.family) {
    case Family::kRbf:
      spec.kernel.gamma = value;
      break;
    case Family::kTree:
    case Family::kForest: {
      if (!(value >= 0.0) || value != std::floor(value)) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("tree depth capacity must be a non-negative integer, got {}", value));
      }
      const int depth = static_cast<int>(value);
      spec.tree.max_depth = depth;
      spec.forest.max_depth = depth;
      break;
    }
    case Family::kLogistic:
      throw Error(ErrorCode::kInvalidArgument, "logistic family has no capacity knob");
  }
  return spec;
}

SweepResult CapacitySweep(const SyntheticSet& synthetic, const CapacityConfig& config,
                          const HypothesisSpec& hypothesis, RngSeed seed) {
  config.validate();
  if (synthetic.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "capacity sweep needs at least two synthetic points");
  }

  std::vector<std::size_t> order(synthetic.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = MakeRng(config.validation_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(order.size()))),
      1, order.size() - 1);
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> train_rows(order.begin() + n_val, order.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  const Dataset full = synthetic.as_dataset();
  const Dataset train = full.subset(train_rows);
  const Dataset validation = full.subset(val_rows);

  SweepResult result;
  std::optional<double> reference;
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    CapacityPoint point;
    point.capacity = config.grid[i];
    Hypothesis fitted;
    try {
      fitted = TrainHypothesis(WithCapacity(hypothesis, point.capacity), train, seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDivergence) throw;
      point.failure = e.what();
      result.trace.push_back(point);
      if (i == 0) throw;
      continue;
    }
    CopyModel model(std::move(fitted), synthetic.dim());
    point.training_error = EmpiricalFidelityError(model.predict(train.points), train.labels);
    point.validation_error = EmpiricalFidelityError(model.predict(validation.points), validation.labels);
    if (!reference) reference = point.validation_error;
    point.feasible = std::abs(point.validation_error - *reference) < config.epsilon;
    result.trace.push_back(point);
    if (!point.feasible) break;
    result.selected_capacity = point.capacity;
    result.selected_index = i;
    result.model = std::move(model);
  }
  result.reference_error = *reference;
  result.model.training_error = result.trace[result.selected_index].training_error;
  return result;
}

SyntheticSet MaskFeatures(const SyntheticSet& set, std::span<const std::size_t> excluded) {
  std::vector<std::size_t> sorted(excluded.begin(), excluded.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate excluded feature index");
  }
  if (!sorted.empty() && sorted.back() >= set.dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("excluded feature {} out of range for dimension {}", sorted.back(), set.dim()));
  }
  if (sorted.size() == set.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "excluding every feature leaves an empty feature space");
  }
  if (sorted.empty()) return set;
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < set.dim(); ++j) {
    if (!std::binary_search(sorted.begin(), sorted.end(), j)) kept.push_back(j);
  }
  SyntheticSet out = set;
  out.points = set.points.select_columns(kept);
  return out;
}

FidelityReport EvaluateCopy(const CopyModel& copy, Oracle& oracle, double r_emp_synthetic,
                            const EvaluationData& evaluation) {
  std::optional<double> acc_copy;
  std::optional<double> r_emp_original;
  if (evaluation.test != nullptr) acc_copy = CopyAccuracy(copy, *evaluation.test);
  if (evaluation.reference != nullptr) {
    const auto& points = evaluation.reference->points;
    r_emp_original = EmpiricalFidelityError(copy.predict(points), oracle.query(points));
  }
  return FidelityReport::Make(r_emp_synthetic, evaluation.acc_original, r_emp_original, acc_copy);
}

SyntheticSet DrawSynthetic(Oracle& oracle, const CopyConfig& config) {
  if (config.sampler.dim() != oracle.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("sampler dimension {} does not match oracle dimension {}",
                            config.sampler.dim(), oracle.dim()));
  }
  if (config.n_samples < 1) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  const RngSeed sample_seed = DeriveSeed(config.seed, 0);
  if (!config.balanced) return GenerateRaw(oracle, config.sampler, config.n_samples, sample_seed);
  const auto k = static_cast<std::size_t>(oracle.num_classes());
  const std::size_t per_class = config.per_class.value_or(std::max<std::size_t>(1, config.n_samples / k));
  const std::size_t max_draws = config.max_draws.value_or(std::max(20 * config.n_samples, k * per_class));
  return GenerateBalanced(oracle, config.sampler, per_class, max_draws, sample_seed);
}

CopyResult SinglePassCopy(Oracle& oracle, const CopyConfig& config,
                          const EvaluationData* evaluation) {
  const std::size_t d = oracle.dim();

  CopyResult result;

  // Step 1: synthetic set.
  result.synthetic = DrawSynthetic(oracle, config);
  result.volume = ComputeVolumeReport(result.synthetic);

  // Step 2: fit the copy on the (masked) synthetic set.
  const SyntheticSet train = MaskFeatures(result.synthetic, config.excluded_features);
  const RngSeed fit_seed = DeriveSeed(config.seed, 1);
  Hypothesis fitted;
  if (config.capacity) {
    SweepResult sweep = CapacitySweep(train, *config.capacity, config.hypothesis, fit_seed);
    fitted = std::move(sweep.model.model());
    result.capacity_trace = std::move(sweep.trace);
  } else {
    fitted = TrainHypothesis(config.hypothesis, train.as_dataset(), fit_seed);
  }
  result.model = CopyModel(std::move(fitted), d, config.excluded_features);

  result.r_emp_synthetic =
      EmpiricalFidelityError(result.model.predict(result.synthetic.points), result.synthetic.labels);
  result.model.training_error = result.r_emp_synthetic;
  result.model.provenance = result.synthetic.provenance;

  if (evaluation != nullptr) {
    result.fidelity = EvaluateCopy(result.model, oracle, result.r_emp_synthetic, *evaluation);
  }
  return result;
}

}  // namespace copyforge

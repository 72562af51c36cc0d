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

// Single-pass copying: label a synthetic set through the oracle, then fit
// the copy hypothesis on it without regularization or validation. The
// capacity sweep trades hypothesis capacity against fidelity within a
// tolerance of the unconstrained fit.

#ifndef COPYFORGE_COPYING_HPP_
#define COPYFORGE_COPYING_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "copyforge/core.hpp"
#include "copyforge/metrics.hpp"
#include "copyforge/models.hpp"
#include "copyforge/oracle.hpp"
#include "copyforge/sampling.hpp"

namespace copyforge {

struct CapacityConfig {
  // Strictly decreasing: gamma for rbf, max_depth for tree and forest.
  std::vector<double> grid;
  double epsilon = 1e-4;
  // Share of the synthetic set held out to measure fidelity per grid point.
  double validation_fraction = 0.2;
  RngSeed validation_seed{0x5eed};

  void validate() const;
};

struct CapacityPoint {
  double capacity = 0.0;
  // Fidelity error on the held-out synthetic validation split.
  double validation_error = 0.0;
  double training_error = 0.0;
  bool feasible = false;
  // Set when training failed at this grid point; the point is skipped.
  std::optional<std::string> failure;
};

struct SweepResult {
  double selected_capacity = 0.0;
  std::size_t selected_index = 0;
  // Validation error of the largest-capacity model.
  double reference_error = 0.0;
  CopyModel model;
  std::vector<CapacityPoint> trace;
};

// Walks the grid from the largest capacity down and keeps the last model
// whose validation error stays within epsilon of the grid[0] error,
// stopping at the first grid point that leaves the tolerance.
SweepResult CapacitySweep(const SyntheticSet& synthetic, const CapacityConfig& config,
                          const HypothesisSpec& hypothesis, RngSeed seed);

// Copy of `spec` with its capacity knob set to `value`.
HypothesisSpec WithCapacity(HypothesisSpec spec, double value);

struct CopyConfig {
  HypothesisSpec hypothesis;
  SamplingDistribution sampler = SamplingDistribution::StandardNormal(1);
  std::size_t n_samples = 100000;
  bool balanced = true;
  // Balanced mode: points per class, n_samples / k when unset.
  std::optional<std::size_t> per_class;
  // Balanced mode: raw draw budget, max(20 * n_samples, k * per_class) when
  // unset.
  std::optional<std::size_t> max_draws;
  RngSeed seed;
  std::vector<std::size_t> excluded_features;
  std::optional<CapacityConfig> capacity;
};

// Labelled data available for evaluation, if any.
struct EvaluationData {
  double acc_original = 0.0;
  // True-label data for the copy accuracy.
  const Dataset* test = nullptr;
  // Points on which copy and oracle agreement is measured.
  const Dataset* reference = nullptr;
};

struct CopyResult {
  CopyModel model;
  SyntheticSet synthetic;
  // Disagreement between copy and oracle on the copy's own training points.
  double r_emp_synthetic = 0.0;
  VolumeReport volume;
  std::optional<FidelityReport> fidelity;
  std::vector<CapacityPoint> capacity_trace;
};

// Step 1 alone: the oracle-labelled synthetic set SinglePassCopy trains on.
SyntheticSet DrawSynthetic(Oracle& oracle, const CopyConfig& config);

CopyResult SinglePassCopy(Oracle& oracle, const CopyConfig& config,
                          const EvaluationData* evaluation = nullptr);

FidelityReport EvaluateCopy(const CopyModel& copy, Oracle& oracle, double r_emp_synthetic,
                            const EvaluationData& evaluation);

// Removes the listed feature columns from every point; labels unchanged.
SyntheticSet MaskFeatures(const SyntheticSet& set, std::span<const std::size_t> excluded);

}  // namespace copyforge

#endif  // COPYFORGE_COPYING_HPP_

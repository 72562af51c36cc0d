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

// Experiment runner: train an original on a stratified split, copy it once
// per repetition and copy family, and write per-run and summary reports.

#ifndef COPYFORGE_EXPERIMENT_HPP_
#define COPYFORGE_EXPERIMENT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "copyforge/config.hpp"

namespace copyforge {

struct ExperimentConfig {
  std::string name;
  DatasetSource dataset;
  double test_fraction = 0.2;
  bool standardize = true;
  HypothesisSpec original;
  std::vector<HypothesisSpec> copies;
  SamplerSettings sampler;
  int repetitions = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::vector<std::size_t> excluded_features;
  std::optional<CapacityConfig> capacity;

  void validate() const;
};

// Relative dataset paths resolve against `base`; output_dir stays as given.
ExperimentConfig ParseExperimentConfig(const Json& j, const std::filesystem::path& base = {});
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

struct FamilyResult {
  Family family;
  std::vector<FidelityReport> reports;  // indexed by repetition
  RunSummary summary;
};

struct ExperimentResult {
  std::string name;
  Family original;
  double acc_original = 0.0;
  std::vector<FamilyResult> copies;
};

// Writes into config.output_dir:
//   original.model, copies/<family>.model (repetition 0),
//   runs/run_<r>.json, summary.json, summary.csv, summary.txt.
// On failure writes error.json and a FAILED marker, keeps what was written
// so far and rethrows.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Aligned-text and CSV renderings of the summary table.
std::string SummaryCsv(const ExperimentResult& result);
std::string SummaryText(const ExperimentResult& result);

// {"error": <code name>, "message": ...}; std exceptions map to "internal".
Json ErrorRecord(const std::exception& e);

}  // namespace copyforge

#endif  // COPYFORGE_EXPERIMENT_HPP_

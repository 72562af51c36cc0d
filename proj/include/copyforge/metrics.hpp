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

#ifndef COPYFORGE_METRICS_HPP_
#define COPYFORGE_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "copyforge/core.hpp"
#include "copyforge/models.hpp"

namespace copyforge {

// Fraction of positions where the two label lists differ.
double EmpiricalFidelityError(std::span<const Label> copy_labels,
                              std::span<const Label> oracle_labels);

// Binary labels encoded as -1/+1: 1/2 - (1/2N) sum_j copy_j * oracle_j.
double SignedFidelityForm(std::span<const int> copy_pm, std::span<const int> oracle_pm);

double Accuracy(std::span<const Label> predicted, std::span<const Label> truth);

// Accuracy of the copy against the true labels of `data`.
double CopyAccuracy(const CopyModel& copy, const Dataset& data);

// A_O * (1 - R), the data-free estimate of the copy accuracy.
double EstimatedCopyAccuracy(double acc_original, double r_emp_synthetic);

struct FidelityReport {
  double r_emp_synthetic = 0.0;
  std::optional<double> r_emp_original;
  double acc_original = 0.0;
  std::optional<double> acc_copy;
  double acc_copy_estimated = 0.0;

  // Fills acc_copy_estimated from the other two required fields.
  static FidelityReport Make(double r_emp_synthetic, double acc_original,
                             std::optional<double> r_emp_original = {},
                             std::optional<double> acc_copy = {});
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct RunSummary {
  std::size_t count = 0;
  MetricSummary r_emp_synthetic;
  std::optional<MetricSummary> r_emp_original;
  MetricSummary acc_original;
  std::optional<MetricSummary> acc_copy;
  MetricSummary acc_copy_estimated;
};

MetricSummary Summarize(std::span<const double> values);

// Optional fields are summarized only when every report carries them.
RunSummary SummarizeRuns(std::span<const FidelityReport> reports);

}  // namespace copyforge

#endif  // COPYFORGE_METRICS_HPP_

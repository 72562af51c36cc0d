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

#include "copyforge/metrics.hpp"

#include <cmath>

#include <fmt/core.h>

namespace copyforge {
namespace {

void CheckLengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("label lists differ in length: {} vs {}", a, b));
  }
  if (a == 0) throw Error(ErrorCode::kInvalidArgument, "label lists are empty");
}

void CheckUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} = {} outside [0, 1]", name, v));
  }
}

}  // namespace

double EmpiricalFidelityError(std::span<const Label> copy_labels,
                              std::span<const Label> oracle_labels) {
  CheckLengths(copy_labels.size(), oracle_labels.size());
  std::size_t disagreements = 0;
  for (std::size_t j = 0; j < copy_labels.size(); ++j) {
    if (copy_labels[j] != oracle_labels[j]) ++disagreements;
  }
  return static_cast<double>(disagreements) / static_cast<double>(copy_labels.size());
}

double SignedFidelityForm(std::span<const int> copy_pm, std::span<const int> oracle_pm) {
  CheckLengths(copy_pm.size(), oracle_pm.size());
  long long agreement = 0;
  for (std::size_t j = 0; j < copy_pm.size(); ++j) {
    const int a = copy_pm[j];
    const int b = oracle_pm[j];
    if ((a != 1 && a != -1) || (b != 1 && b != -1)) {
      throw Error(ErrorCode::kInvalidArgument, fmt::format("value at {} is not -1 or +1", j));
    }
    agreement += a * b;
  }
  // 1/2 - S/(2N) written over the common denominator, so the integer
  // numerator N - S is exact before the single rounding division.
  const auto n = static_cast<long long>(copy_pm.size());
  return static_cast<double>(n - agreement) / (2.0 * static_cast<double>(n));
}

double Accuracy(std::span<const Label> predicted, std::span<const Label> truth) {
  CheckLengths(predicted.size(), truth.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double CopyAccuracy(const CopyModel& copy, const Dataset& data) {
  CheckDimension(data.points, copy.input_dim(), "copy_accuracy");
  return Accuracy(copy.predict(data.points), data.labels);
}

double EstimatedCopyAccuracy(double acc_original, double r_emp_synthetic) {
  CheckUnit(acc_original, "acc_original");
  CheckUnit(r_emp_synthetic, "r_emp_synthetic");
  return acc_original * (1.0 - r_emp_synthetic);
}

FidelityReport FidelityReport::Make(double r_emp_synthetic, double acc_original,
                                    std::optional<double> r_emp_original,
                                    std::optional<double> acc_copy) {
  if (r_emp_original) CheckUnit(*r_emp_original, "r_emp_original");
  if (acc_copy) CheckUnit(*acc_copy, "acc_copy");
  FidelityReport report;
  report.r_emp_synthetic = r_emp_synthetic;
  report.acc_original = acc_original;
  report.r_emp_original = r_emp_original;
  report.acc_copy = acc_copy;
  report.acc_copy_estimated = EstimatedCopyAccuracy(acc_original, r_emp_synthetic);
  return report;
}

MetricSummary Summarize(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "nothing to summarize");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / n)};
}

RunSummary SummarizeRuns(std::span<const FidelityReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to summarize");
  auto field = [&](auto getter) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(getter(r));
    return Summarize(v);
  };
  auto optional_field = [&](auto getter) -> std::optional<MetricSummary> {
    std::vector<double> v;
    for (const auto& r : reports) {
      const std::optional<double> x = getter(r);
      if (!x) return std::nullopt;
      v.push_back(*x);
    }
    return Summarize(v);
  };

  RunSummary summary;
  summary.count = reports.size();
  summary.r_emp_synthetic = field([](const auto& r) { return r.r_emp_synthetic; });
  summary.r_emp_original = optional_field([](const auto& r) { return r.r_emp_original; });
  summary.acc_original = field([](const auto& r) { return r.acc_original; });
  summary.acc_copy = optional_field([](const auto& r) { return r.acc_copy; });
  summary.acc_copy_estimated = field([](const auto& r) { return r.acc_copy_estimated; });
  return summary;
}

}  // namespace copyforge

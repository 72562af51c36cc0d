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

// exp(-kCutoff) is below double resolution relative to the O(1) terms.
constexpr double kCutoff = 40.0;

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

double Rbf(double gamma, std::span<const double> a, std::span<const double> b) {
  const double arg = gamma * SquaredDistance(a, b);
  return arg > kCutoff ? 0.0 : std::exp(-arg);
}

}  // namespace

KernelModel::KernelModel(std::size_t dim, int k, double gamma, PointSet support,
                         std::vector<double> coefficients, std::vector<double> bias)
    : dim_(dim),
      k_(k),
      gamma_(gamma),
      support_(std::move(support)),
      coefficients_(std::move(coefficients)),
      bias_(std::move(bias)) {
  if (!(gamma_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  const std::size_t machines = k_ == 2 ? 1 : static_cast<std::size_t>(k_);
  if (k_ < 1 || bias_.size() != machines ||
      coefficients_.size() != machines * support_.size() ||
      (!support_.empty() && support_.dim() != dim_)) {
    throw Error(ErrorCode::kInvalidArgument, "kernel machine parameters have the wrong shape");
  }
}

double KernelModel::kernel(std::span<const double> a, std::span<const double> b) const {
  return std::exp(-gamma_ * SquaredDistance(a, b));
}

std::vector<double> KernelModel::decision(std::span<const double> x) const {
  std::vector<double> f(bias_);
  const std::size_t s_count = support_.size();
  for (std::size_t s = 0; s < s_count; ++s) {
    const double kv = Rbf(gamma_, support_[s], x);
    if (kv == 0.0) continue;
    for (std::size_t m = 0; m < f.size(); ++m) f[m] += coefficients_[m * s_count + s] * kv;
  }
  return f;
}

Label KernelModel::predict_one(std::span<const double> x) const {
  const auto f = decision(x);
  if (k_ == 2) return f[0] > 0.0 ? 1 : 0;
  return static_cast<Label>(std::max_element(f.begin(), f.end()) - f.begin());
}

KernelModel TrainRbf(const Dataset& data, const KernelOptions& options, RngSeed seed) {
  if (!(options.gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  if (!(options.regularization > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "regularization must be positive");
  }
  if (options.epochs < 1) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (data.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot train on no data");
  if (data.points.size() != data.labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "points and labels differ in length");
  }

  const std::size_t n = data.size();
  const int k = std::max(data.k, 1);
  const std::size_t machines = k == 2 ? 1 : static_cast<std::size_t>(k);
  const double offset = options.fit_bias ? 1.0 : 0.0;

  // targets[m * n + i] in {-1, +1}
  std::vector<double> targets(machines * n);
  for (std::size_t m = 0; m < machines; ++m) {
    const Label positive = k == 2 ? 1 : static_cast<Label>(m);
    for (std::size_t i = 0; i < n; ++i) {
      targets[m * n + i] = data.labels[i] == positive ? 1.0 : -1.0;
    }
  }

  // alpha counts subgradient steps per point and machine. expansion holds
  // sum_j alpha_j y_j K(x_j, x_i) for every training point, so the margin
  // check is O(1) and each step costs one kernel row.
  std::vector<double> alpha(machines * n, 0.0);
  std::vector<double> expansion(machines * n, 0.0);
  std::vector<double> offset_sum(machines, 0.0);
  std::vector<double> row(n);

  Rng rng = MakeRng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  const double lambda = options.regularization;
  double t = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      t += 1.0;
      bool row_ready = false;
      for (std::size_t m = 0; m < machines; ++m) {
        const double y = targets[m * n + i];
        const double raw = expansion[m * n + i] + offset * offset_sum[m];
        if (y * raw >= lambda * t) continue;
        if (!row_ready) {
          const auto xi = data.points[i];
          for (std::size_t l = 0; l < n; ++l) row[l] = Rbf(options.gamma, xi, data.points[l]);
          row_ready = true;
        }
        alpha[m * n + i] += 1.0;
        offset_sum[m] += y;
        double* e = expansion.data() + m * n;
        for (std::size_t l = 0; l < n; ++l) e[l] += y * row[l];
      }
    }
  }

  const double scale = 1.0 / (lambda * t);
  for (double v : expansion) {
    if (!std::isfinite(v * scale)) {
      throw Error(ErrorCode::kDivergence,
                  fmt::format("kernel training diverged at epoch {}", options.epochs - 1));
    }
  }

  std::vector<std::size_t> support_rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < machines; ++m) {
      if (alpha[m * n + i] > 0.0) {
        support_rows.push_back(i);
        break;
      }
    }
  }
  const std::size_t s_count = support_rows.size();
  std::vector<double> coefficients(machines * s_count);
  std::vector<double> bias(machines);
  for (std::size_t m = 0; m < machines; ++m) {
    for (std::size_t s = 0; s < s_count; ++s) {
      const std::size_t i = support_rows[s];
      coefficients[m * s_count + s] = alpha[m * n + i] * targets[m * n + i] * scale;
    }
    bias[m] = offset * offset_sum[m] * scale;
  }

  KernelModel model(data.dim(), k, options.gamma, data.points.select(support_rows),
                    std::move(coefficients), std::move(bias));

  // Diagnostics from the maintained expansion; same decision rule as predict.
  std::size_t errors = 0;
  std::size_t low_margin = 0;
  std::vector<double> f(machines);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < machines; ++m) {
      f[m] = (expansion[m * n + i] + offset * offset_sum[m]) * scale;
      if (targets[m * n + i] * f[m] < 1.0) ++low_margin;
    }
    const Label predicted =
        k == 2 ? (f[0] > 0.0 ? 1 : 0)
               : static_cast<Label>(std::max_element(f.begin(), f.end()) - f.begin());
    if (predicted != data.labels[i]) ++errors;
  }
  model.training_error = static_cast<double>(errors) / static_cast<double>(n);
  model.low_margin_count = low_margin;
  return model;
}

}  // namespace copyforge

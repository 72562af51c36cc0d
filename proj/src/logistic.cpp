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
#include <limits>

#include <fmt/core.h>

#include "copyforge/models.hpp"

namespace copyforge {

LogisticModel::LogisticModel(std::size_t dim, int k, std::vector<double> weights,
                             std::vector<double> bias, LogisticOptions options)
    : dim_(dim),
      k_(k),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      options_(options) {
  if (k_ < 1 || weights_.size() != static_cast<std::size_t>(k_) * dim_ ||
      bias_.size() != static_cast<std::size_t>(k_)) {
    throw Error(ErrorCode::kInvalidArgument, "logistic parameters have the wrong shape");
  }
}

std::vector<double> LogisticModel::scores(std::span<const double> x) const {
  std::vector<double> s(bias_);
  for (int c = 0; c < k_; ++c) {
    const double* w = weights_.data() + static_cast<std::size_t>(c) * dim_;
    for (std::size_t j = 0; j < dim_; ++j) s[c] += w[j] * x[j];
  }
  return s;
}

Label LogisticModel::predict_one(std::span<const double> x) const {
  const auto s = scores(x);
  return static_cast<Label>(std::max_element(s.begin(), s.end()) - s.begin());
}

LogisticModel TrainLogistic(const Dataset& data, const LogisticOptions& options,
                            RngSeed seed) {
  if (options.epochs < 1) throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  if (!(options.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  if (data.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot train on no data");
  if (data.points.size() != data.labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "points and labels differ in length");
  }

  const std::size_t d = data.dim();
  const auto k = static_cast<std::size_t>(std::max(data.k, 1));
  const std::size_t n = data.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> w(k * d);
  std::vector<double> b(k, 0.0);
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> init(0.0, 0.01);
  for (auto& v : w) v = init(rng);

  std::vector<double> grad_w(k * d);
  std::vector<double> grad_b(k);
  std::vector<double> p(k);
  std::vector<double> history;
  history.reserve(options.epochs);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = data.points[i];
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double s = b[c];
        const double* wc = w.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) s += wc[j] * x[j];
        p[c] = s;
        top = std::max(top, s);
      }
      const auto t = static_cast<std::size_t>(data.labels[i]);
      const double target_score = p[t] - top;
      double z = 0.0;
      for (auto& v : p) z += (v = std::exp(v - top));
      loss += std::log(z) - target_score;
      for (std::size_t c = 0; c < k; ++c) {
        const double g = p[c] / z - (c == t ? 1.0 : 0.0);
        grad_b[c] += g;
        double* gw = grad_w.data() + c * d;
        for (std::size_t j = 0; j < d; ++j) gw[j] += g * x[j];
      }
    }
    loss *= inv_n;
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kDivergence,
                  fmt::format("logistic training diverged at epoch {}", epoch));
    }
    history.push_back(loss);
    const double step = options.learning_rate * inv_n;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * grad_w[i];
    for (std::size_t c = 0; c < k; ++c) b[c] -= step * grad_b[c];
  }
  for (double v : w) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kDivergence,
                  fmt::format("logistic training diverged at epoch {}", options.epochs));
    }
  }

  LogisticModel model(d, static_cast<int>(k), std::move(w), std::move(b), options);
  model.set_loss_history(std::move(history));
  return model;
}

}  // namespace copyforge

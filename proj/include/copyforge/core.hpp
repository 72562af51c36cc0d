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

#ifndef COPYFORGE_CORE_HPP_
#define COPYFORGE_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace copyforge {

using Label = std::int32_t;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kTransport,
  kRemoteStatus,
  kMalformedResponse,
  kQuotaUnreachable,
  kDivergence,
  kParse,
  kSchema,
  kIo,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

// Sends library log output to stderr at the COPYFORGE_LOG level (default
// warn). Safe to call more than once.
void InitLogging();

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  // Transport failures against a remote oracle may succeed on retry.
  bool retryable() const { return code_ == ErrorCode::kTransport; }

 private:
  ErrorCode code_;
};

// Row-major block of equal-length real vectors. A row is one Point.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t rows, std::size_t dim)
      : dim_(dim), values_(rows * dim, 0.0) {}
  PointSet(std::size_t dim, std::vector<double> values);
  PointSet(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return values_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) {
    return {values_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t j) const {
    return values_[i * dim_ + j];
  }

  void push_back(std::span<const double> point);
  void reserve(std::size_t rows) { values_.reserve(rows * dim_); }

  const std::vector<double>& values() const { return values_; }

  // Rows selected by index, in the given order.
  PointSet select(std::span<const std::size_t> rows) const;
  // Columns kept in ascending order of the given (sorted) indices.
  PointSet select_columns(std::span<const std::size_t> columns) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct Dataset {
  PointSet points;
  std::vector<Label> labels;
  int k = 0;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return points.dim(); }

  Dataset subset(std::span<const std::size_t> rows) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned box the synthetic queries are drawn from.
class Domain {
 public:
  explicit Domain(std::vector<Interval> bounds);

  // [-3.5, 3.5] per standardized feature.
  static Domain Standard(std::size_t dim);

  std::size_t dim() const { return bounds_.size(); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  double volume() const;
  bool contains(std::span<const double> point) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  std::vector<Interval> bounds_;
};

inline constexpr double kStandardHalfWidth = 3.5;

struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

using Rng = std::mt19937_64;

inline Rng MakeRng(RngSeed seed) { return Rng(seed.value); }

// splitmix64 mixing of (seed, stream); independent child seeds for
// per-tree, per-repetition or per-stage generators.
RngSeed DeriveSeed(RngSeed seed, std::uint64_t stream);

std::vector<std::string> ValidateDataset(const Dataset& dataset);

// Throws kDimensionMismatch when `points.dim() != expected`.
void CheckDimension(const PointSet& points, std::size_t expected,
                    std::string_view what);

int CountClasses(std::span<const Label> labels);

}  // namespace copyforge

#endif  // COPYFORGE_CORE_HPP_

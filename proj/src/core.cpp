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

#include "copyforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/core.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace copyforge {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kRemoteStatus: return "remote_status";
    case ErrorCode::kMalformedResponse: return "malformed_response";
    case ErrorCode::kQuotaUnreachable: return "quota_unreachable";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

PointSet::PointSet(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 || values_.size() % dim_ != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} values do not form rows of dimension {}",
                            values_.size(), dim_));
  }
}

PointSet::PointSet(std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& row : rows) {
    if (dim_ == 0) dim_ = row.size();
    if (row.size() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged point list");
    }
    values_.insert(values_.end(), row.begin(), row.end());
  }
}

void PointSet::push_back(std::span<const double> point) {
  if (dim_ == 0) dim_ = point.size();
  if (point.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("point of dimension {} pushed into set of dimension {}",
                            point.size(), dim_));
  }
  values_.insert(values_.end(), point.begin(), point.end());
}

PointSet PointSet::select(std::span<const std::size_t> rows) const {
  PointSet out(dim_);
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back((*this)[r]);
  return out;
}

PointSet PointSet::select_columns(std::span<const std::size_t> columns) const {
  PointSet out(size(), columns.size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto src = (*this)[i];
    auto dst = out[i];
    for (std::size_t j = 0; j < columns.size(); ++j) dst[j] = src[columns[j]];
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.points = points.select(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  out.k = k;
  out.class_names = class_names;
  out.feature_names = feature_names;
  return out;
}

Domain::Domain(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "domain needs at least one dimension");
  }
  for (std::size_t j = 0; j < bounds_.size(); ++j) {
    const auto& b = bounds_[j];
    if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("invalid bounds [{}, {}] for dimension {}", b.lo, b.hi, j));
    }
  }
}

Domain Domain::Standard(std::size_t dim) {
  return Domain(std::vector<Interval>(dim, {-kStandardHalfWidth, kStandardHalfWidth}));
}

double Domain::volume() const {
  double v = 1.0;
  for (const auto& b : bounds_) v *= b.hi - b.lo;
  return v;
}

bool Domain::contains(std::span<const double> point) const {
  if (point.size() != bounds_.size()) return false;
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point[j] < bounds_[j].lo || point[j] > bounds_[j].hi) return false;
  }
  return true;
}

RngSeed DeriveSeed(RngSeed seed, std::uint64_t stream) {
  std::uint64_t z = seed.value + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return {z ^ (z >> 31)};
}

std::vector<std::string> ValidateDataset(const Dataset& dataset) {
  std::vector<std::string> violations;
  const std::size_t m = dataset.points.size();
  if (m == 0 && dataset.labels.empty()) violations.emplace_back("empty dataset");
  if (m != dataset.labels.size()) violations.emplace_back("length mismatch");
  if (dataset.k < 1) violations.emplace_back("class count must be positive");
  for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
    const Label t = dataset.labels[i];
    if (t < 0 || t >= dataset.k) {
      violations.push_back(fmt::format("label out of range at {}", i));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    auto row = dataset.points[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j])) {
        violations.push_back(fmt::format("non-finite coordinate at ({},{})", i, j));
      }
    }
  }
  return violations;
}

void CheckDimension(const PointSet& points, std::size_t expected,
                    std::string_view what) {
  if (points.dim() != expected && !points.empty()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{}: expected dimension {}, got {}", what, expected,
                            points.dim()));
  }
}

int CountClasses(std::span<const Label> labels) {
  Label top = -1;
  for (Label t : labels) top = std::max(top, t);
  return static_cast<int>(top) + 1;
}

void InitLogging() {
  if (spdlog::get("copyforge") == nullptr) spdlog::set_default_logger(spdlog::stderr_color_mt("copyforge"));
  const char* level = std::getenv("COPYFORGE_LOG");
  spdlog::set_level(level != nullptr ? spdlog::level::from_str(level) : spdlog::level::warn);
}

}  // namespace copyforge

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

#include "copyforge/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

#include <fmt/core.h>

#include "copyforge/text.hpp"

namespace copyforge {
namespace {

bool IsMissing(std::string_view field) {
  return field.empty() || field == "?" || field == "NA" || field == "NaN" || field == "nan" ||
         field == "null" || field == "NULL";
}

Dataset Shuffled(Dataset data, Rng& rng) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return data.subset(order);
}

}  // namespace

void ColumnSchema::validate() const {
  const auto targets = std::count_if(columns.begin(), columns.end(),
                                     [](const auto& c) { return c.kind == ColumnKind::kTarget; });
  if (targets != 1) {
    throw Error(ErrorCode::kSchema, fmt::format("schema needs exactly one target column, has {}", targets));
  }
  std::set<std::string> names;
  for (const auto& column : columns) {
    if (!names.insert(column.name).second) {
      throw Error(ErrorCode::kSchema, fmt::format("column '{}' listed twice", column.name));
    }
    if (column.kind == ColumnKind::kNominal && column.categories.empty()) {
      throw Error(ErrorCode::kSchema, fmt::format("nominal column '{}' has no categories", column.name));
    }
    std::set<std::string> seen(column.categories.begin(), column.categories.end());
    if (seen.size() != column.categories.size()) {
      throw Error(ErrorCode::kSchema, fmt::format("column '{}' repeats a category", column.name));
    }
  }
}

LoadedDataset ReadCsv(std::istream& in, const ColumnSchema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "line 1: missing header row");
  const auto header = SplitCsvLine(line);

  // position in the file of each schema column
  std::vector<std::size_t> position(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const auto it = std::find(header.begin(), header.end(), schema.columns[c].name);
    if (it == header.end()) {
      throw Error(ErrorCode::kSchema, fmt::format("column '{}' not in CSV header", schema.columns[c].name));
    }
    position[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::unordered_map<std::string, int>> codes(schema.columns.size());
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    const auto& cats = schema.columns[c].categories;
    for (std::size_t v = 0; v < cats.size(); ++v) codes[c][cats[v]] = static_cast<int>(v);
  }

  LoadedDataset out;
  Dataset& data = out.data;
  std::size_t target_column = 0;
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    if (schema.columns[c].kind == ColumnKind::kTarget) {
      target_column = c;
    } else {
      data.feature_names.push_back(schema.columns[c].name);
    }
  }
  data.class_names = schema.columns[target_column].categories;
  data.points = PointSet(data.feature_names.size());

  std::vector<double> row;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: expected {} fields, found {}", line_no,
                                                 header.size(), fields.size()));
    }
    row.clear();
    std::optional<Label> label;
    bool drop = false;
    for (std::size_t c = 0; c < schema.columns.size() && !drop; ++c) {
      const auto& spec = schema.columns[c];
      const std::string& field = fields[position[c]];
      if (IsMissing(field)) {
        drop = true;
        break;
      }
      if (!spec.categories.empty()) {
        const auto it = codes[c].find(field);
        if (it == codes[c].end()) {
          throw Error(ErrorCode::kParse, fmt::format("line {}: unknown category '{}' in column '{}'",
                                                     line_no, field, spec.name));
        }
        if (spec.kind == ColumnKind::kTarget) {
          label = it->second;
        } else {
          row.push_back(it->second);
        }
        continue;
      }
      if (spec.kind == ColumnKind::kTarget) {
        const auto v = TryParseInteger(field);
        if (!v || *v < 0) {
          drop = true;
        } else {
          label = static_cast<Label>(*v);
        }
        continue;
      }
      const auto v = TryParseDouble(field);
      if (!v || !std::isfinite(*v)) {
        drop = true;
      } else {
        row.push_back(*v);
      }
    }
    if (drop) {
      ++out.dropped_rows;
      continue;
    }
    data.points.push_back(row);
    data.labels.push_back(*label);
  }

  if (data.labels.empty()) {
    throw Error(ErrorCode::kParse,
                fmt::format("no usable rows ({} dropped)", out.dropped_rows));
  }
  data.k = data.class_names.empty() ? CountClasses(data.labels)
                                    : static_cast<int>(data.class_names.size());
  return out;
}

LoadedDataset LoadCsv(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path));
  return ReadCsv(in, schema);
}

Scaler::Scaler(std::size_t input_dim, std::vector<std::size_t> kept, std::vector<double> means,
               std::vector<double> stds)
    : input_dim_(input_dim), kept_(std::move(kept)), means_(std::move(means)), stds_(std::move(stds)) {
  if (kept_.size() != means_.size() || kept_.size() != stds_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scaler parameters have the wrong shape");
  }
}

std::vector<std::size_t> Scaler::dropped() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < input_dim_; ++j) {
    if (!std::binary_search(kept_.begin(), kept_.end(), j)) out.push_back(j);
  }
  return out;
}

PointSet Scaler::transform(const PointSet& points) const {
  CheckDimension(points, input_dim_, "standardize");
  PointSet out(points.size(), kept_.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto src = points[i];
    auto dst = out[i];
    for (std::size_t j = 0; j < kept_.size(); ++j) dst[j] = (src[kept_[j]] - means_[j]) / stds_[j];
  }
  return out;
}

PointSet Scaler::inverse_transform(const PointSet& points) const {
  CheckDimension(points, kept_.size(), "inverse standardize");
  PointSet out(points.size(), kept_.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto src = points[i];
    auto dst = out[i];
    for (std::size_t j = 0; j < kept_.size(); ++j) dst[j] = src[j] * stds_[j] + means_[j];
  }
  return out;
}

std::pair<Scaler, Dataset> FitStandardize(const Dataset& train) {
  if (train.size() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot standardize an empty dataset");
  const std::size_t d = train.dim();
  const double n = static_cast<double>(train.size());
  std::vector<std::size_t> kept;
  std::vector<double> means;
  std::vector<double> stds;
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) sum += train.points.at(i, j);
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double diff = train.points.at(i, j) - mean;
      sq += diff * diff;
    }
    const double sd = std::sqrt(sq / n);
    if (!(sd > 0.0)) continue;
    kept.push_back(j);
    means.push_back(mean);
    stds.push_back(sd);
  }
  if (kept.empty()) throw Error(ErrorCode::kInvalidArgument, "every feature has zero variance");
  Scaler scaler(d, std::move(kept), std::move(means), std::move(stds));
  return {scaler, ApplyStandardize(scaler, train)};
}

Dataset ApplyStandardize(const Scaler& scaler, const Dataset& data) {
  Dataset out;
  out.points = scaler.transform(data.points);
  out.labels = data.labels;
  out.k = data.k;
  out.class_names = data.class_names;
  for (std::size_t j : scaler.kept()) {
    if (j < data.feature_names.size()) out.feature_names.push_back(data.feature_names[j]);
  }
  return out;
}

SplitIndices StratifiedSplitIndices(std::span<const Label> labels, double test_fraction,
                                    RngSeed seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("test_fraction {} outside (0, 1)", test_fraction));
  }
  const int k = CountClasses(labels);
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng = MakeRng(seed);
  SplitIndices split;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("class {} has {} member(s); stratifying needs at least 2", c, rows.size()));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto wanted = static_cast<std::size_t>(std::llround(static_cast<double>(rows.size()) * test_fraction));
    const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, rows.size() - 1);
    split.test.insert(split.test.end(), rows.begin(), rows.begin() + n_test);
    split.train.insert(split.train.end(), rows.begin() + n_test, rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::pair<Dataset, Dataset> StratifiedSplit(const Dataset& data, double test_fraction,
                                            RngSeed seed) {
  const auto split = StratifiedSplitIndices(data.labels, test_fraction, seed);
  return {data.subset(split.train), data.subset(split.test)};
}

Dataset MakeMoons(std::size_t n, double noise_std, RngSeed seed) {
  if (n < 4) throw Error(ErrorCode::kInvalidArgument, "make_moons needs at least 2 points per class");
  if (noise_std < 0.0) throw Error(ErrorCode::kInvalidArgument, "noise_std must be non-negative");
  const std::size_t n_upper = n / 2;
  const std::size_t n_lower = n - n_upper;
  Rng rng = MakeRng(seed);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);

  Dataset data;
  data.k = 2;
  data.points = PointSet(2);
  data.points.reserve(n);
  data.feature_names = {"x0", "x1"};
  auto arc = [&](std::size_t count, Label label) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1);
      double x = label == 0 ? std::cos(t) : 1.0 - std::cos(t);
      double y = label == 0 ? std::sin(t) : 0.5 - std::sin(t);
      if (noise_std > 0.0) {
        x += noise(rng);
        y += noise(rng);
      }
      const double p[2] = {x, y};
      data.points.push_back(p);
      data.labels.push_back(label);
    }
  };
  arc(n_upper, 0);
  arc(n_lower, 1);
  return Shuffled(std::move(data), rng);
}

double VolumeImbalanceRadius() {
  const double area = std::pow(2.0 * kStandardHalfWidth, 2);
  return std::sqrt(kImbalanceVolumeFraction * area / std::numbers::pi);
}

Dataset MakeVolumeImbalance(std::size_t n, RngSeed seed) {
  if (n < 4) throw Error(ErrorCode::kInvalidArgument, "make_volume_imbalance needs at least 2 points per class");
  const double radius = VolumeImbalanceRadius();
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> box(-kStandardHalfWidth, kStandardHalfWidth);

  Dataset data;
  data.k = 2;
  data.points = PointSet(2);
  data.points.reserve(n);
  data.feature_names = {"x0", "x1"};
  const std::size_t n_minor = n / 2;
  for (std::size_t i = 0; i < n_minor; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    const double p[2] = {r * std::cos(a), r * std::sin(a)};
    data.points.push_back(p);
    data.labels.push_back(1);
  }
  for (std::size_t i = n_minor; i < n;) {
    const double p[2] = {box(rng), box(rng)};
    if (p[0] * p[0] + p[1] * p[1] <= radius * radius) continue;
    data.points.push_back(p);
    data.labels.push_back(0);
    ++i;
  }
  return Shuffled(std::move(data), rng);
}

}  // namespace copyforge

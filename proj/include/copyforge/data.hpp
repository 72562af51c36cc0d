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

// Dataset ingestion, standardization, stratified splitting and the toy
// generators used by the experiments.

#ifndef COPYFORGE_DATA_HPP_
#define COPYFORGE_DATA_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "copyforge/core.hpp"

namespace copyforge {

enum class ColumnKind { kNumeric, kNominal, kTarget };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Ordered category names; the code of a category is its position. A
  // target without categories holds integer class indices.
  std::vector<std::string> categories;
};

// Columns are matched to the CSV header by name; file columns absent from
// the schema are ignored. Feature order follows the schema.
struct ColumnSchema {
  std::vector<ColumnSpec> columns;

  // Throws kSchema unless there is exactly one target and every category
  // list is free of duplicates.
  void validate() const;
};

struct LoadedDataset {
  Dataset data;
  std::size_t dropped_rows = 0;
};

// Rows with a missing value ("", "?", "NA", "NaN", "null") or an
// unparseable number are dropped and counted. Wrong field counts and
// unknown categories are errors carrying the line number.
LoadedDataset ReadCsv(std::istream& in, const ColumnSchema& schema);
LoadedDataset LoadCsv(const std::string& path, const ColumnSchema& schema);

class Scaler {
 public:
  Scaler() = default;
  Scaler(std::size_t input_dim, std::vector<std::size_t> kept, std::vector<double> means,
         std::vector<double> stds);

  std::size_t input_dim() const { return input_dim_; }
  // Retained input columns, ascending. Zero-variance columns are dropped.
  const std::vector<std::size_t>& kept() const { return kept_; }
  std::vector<std::size_t> dropped() const;
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& stds() const { return stds_; }

  PointSet transform(const PointSet& points) const;
  // Maps standardized points back to the retained input columns.
  PointSet inverse_transform(const PointSet& points) const;

 private:
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> kept_;
  std::vector<double> means_;
  std::vector<double> stds_;
};

// Population mean and standard deviation per column.
std::pair<Scaler, Dataset> FitStandardize(const Dataset& train);
Dataset ApplyStandardize(const Scaler& scaler, const Dataset& data);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, round(count * test_fraction) rows (clamped to [1, count - 1])
// go to the test side. Both index lists are ascending.
SplitIndices StratifiedSplitIndices(std::span<const Label> labels, double test_fraction,
                                    RngSeed seed);
std::pair<Dataset, Dataset> StratifiedSplit(const Dataset& data, double test_fraction,
                                            RngSeed seed);

// Two interleaved half circles: class 0 on the upper unit arc, class 1 on
// the lower arc shifted by (1, -0.5), plus isotropic Gaussian noise.
Dataset MakeMoons(std::size_t n, double noise_std, RngSeed seed);

// Balanced binary labels with unequal class volumes in the default 2-D
// domain: class 1 fills a centered disc holding 5% of the box area,
// class 0 the rest of the box.
Dataset MakeVolumeImbalance(std::size_t n, RngSeed seed);
inline constexpr double kImbalanceVolumeFraction = 0.05;
double VolumeImbalanceRadius();

}  // namespace copyforge

#endif  // COPYFORGE_DATA_HPP_

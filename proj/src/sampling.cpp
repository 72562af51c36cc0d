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

#include "copyforge/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/core.h>

#include "copyforge/text.hpp"

namespace copyforge {

SamplingDistribution SamplingDistribution::Uniform(Domain domain) {
  const std::size_t dim = domain.dim();
  return SamplingDistribution(Kind::kUniform, dim, std::move(domain));
}

SamplingDistribution SamplingDistribution::StandardNormal(std::size_t dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "normal distribution needs dim >= 1");
  return SamplingDistribution(Kind::kStandardNormal, dim, std::nullopt);
}

std::string SamplingDistribution::describe() const {
  if (kind_ == Kind::kStandardNormal) return fmt::format("standard_normal(d={})", dim_);
  const auto& b = domain_->bounds();
  const bool cube = std::all_of(b.begin(), b.end(), [&](const Interval& i) { return i == b[0]; });
  if (cube) return fmt::format("uniform([{}, {}]^{})", FormatDouble(b[0].lo), FormatDouble(b[0].hi), dim_);
  return fmt::format("uniform(box, d={})", dim_);
}

PointSampler::PointSampler(SamplingDistribution dist, RngSeed seed)
    : dist_(std::move(dist)), rng_(MakeRng(seed)) {}

PointSet PointSampler::next(std::size_t n) {
  const std::size_t d = dist_.dim();
  PointSet out(n, d);
  if (dist_.kind() == SamplingDistribution::Kind::kUniform) {
    const auto& bounds = dist_.domain()->bounds();
    for (std::size_t i = 0; i < n; ++i) {
      auto row = out[i];
      for (std::size_t j = 0; j < d; ++j) {
        // lo + u (hi - lo) can round up to hi; clamp keeps it in the box.
        const double v = bounds[j].lo + unit_(rng_) * (bounds[j].hi - bounds[j].lo);
        row[j] = std::min(v, bounds[j].hi);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = out[i];
      for (std::size_t j = 0; j < d; ++j) row[j] = normal_(rng_);
    }
  }
  return out;
}

PointSet Sample(const SamplingDistribution& dist, std::size_t n, RngSeed seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  PointSampler sampler(dist, seed);
  return sampler.next(n);
}

Dataset SyntheticSet::as_dataset() const {
  Dataset data;
  data.points = points;
  data.labels = labels;
  data.k = k;
  return data;
}

SyntheticSet LabelPoints(Oracle& oracle, PointSet points, std::string provenance) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot label an empty point set");
  CheckDimension(points, oracle.dim(), "label_points");
  SyntheticSet set;
  set.labels.reserve(points.size());
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < points.size(); start += kDrawBatch) {
    const std::size_t stop = std::min(points.size(), start + kDrawBatch);
    rows.resize(stop - start);
    for (std::size_t i = start; i < stop; ++i) rows[i - start] = i;
    const auto labels = oracle.query(points.select(rows));
    set.labels.insert(set.labels.end(), labels.begin(), labels.end());
  }
  set.raw_draws = points.size();
  set.points = std::move(points);
  set.k = oracle.num_classes();
  set.provenance = std::move(provenance);
  return set;
}

SyntheticSet GenerateRaw(Oracle& oracle, const SamplingDistribution& dist, std::size_t n,
                         RngSeed seed) {
  if (dist.dim() != oracle.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("distribution has dimension {}, oracle {}", dist.dim(), oracle.dim()));
  }
  return LabelPoints(oracle, Sample(dist, n, seed),
                     fmt::format("raw {} n={} seed={}", dist.describe(), n, seed.value));
}

SyntheticSet GenerateBalanced(Oracle& oracle, const SamplingDistribution& dist,
                              std::size_t per_class, std::size_t max_draws, RngSeed seed) {
  const auto k = static_cast<std::size_t>(oracle.num_classes());
  if (per_class < 1) throw Error(ErrorCode::kInvalidArgument, "per_class must be >= 1");
  if (max_draws < k * per_class) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("max_draws {} below k * per_class = {}", max_draws, k * per_class));
  }
  if (dist.dim() != oracle.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("distribution has dimension {}, oracle {}", dist.dim(), oracle.dim()));
  }

  SyntheticSet set;
  set.k = static_cast<int>(k);
  set.points = PointSet(dist.dim());
  set.points.reserve(k * per_class);
  set.labels.reserve(k * per_class);
  std::vector<std::size_t> filled(k, 0);
  std::size_t open = k;
  std::size_t drawn = 0;
  PointSampler sampler(dist, seed);

  while (open > 0 && drawn < max_draws) {
    const std::size_t batch_n = std::min(kDrawBatch, max_draws - drawn);
    const PointSet batch = sampler.next(batch_n);
    const auto labels = oracle.query(batch);
    for (std::size_t i = 0; i < batch_n && open > 0; ++i) {
      ++drawn;
      const auto c = static_cast<std::size_t>(labels[i]);
      if (filled[c] == per_class) continue;
      set.points.push_back(batch[i]);
      set.labels.push_back(labels[i]);
      if (++filled[c] == per_class) --open;
    }
  }

  if (open > 0) {
    std::string starving;
    for (std::size_t c = 0; c < k; ++c) {
      if (filled[c] < per_class) {
        starving += fmt::format("{}{} ({}/{})", starving.empty() ? "" : ", ", c, filled[c], per_class);
      }
    }
    throw Error(ErrorCode::kQuotaUnreachable,
                fmt::format("balanced quota unreachable after {} draws; starving classes: {}",
                            drawn, starving));
  }
  set.raw_draws = drawn;
  set.provenance = fmt::format("balanced {} per_class={} seed={}", dist.describe(), per_class,
                               seed.value);
  return set;
}

VolumeReport ComputeVolumeReport(const SyntheticSet& set) {
  VolumeReport report;
  report.total = set.size();
  const int k = std::max(set.k, CountClasses(set.labels));
  report.counts.assign(static_cast<std::size_t>(k), 0);
  for (Label t : set.labels) ++report.counts[static_cast<std::size_t>(t)];
  report.fractions.resize(report.counts.size());
  for (std::size_t c = 0; c < report.counts.size(); ++c) {
    report.fractions[c] = report.total == 0
                              ? 0.0
                              : static_cast<double>(report.counts[c]) / static_cast<double>(report.total);
    if (report.counts[c] == 0) report.empty_classes.push_back(static_cast<Label>(c));
  }
  if (k == 2 && report.empty_classes.empty()) {
    const double n = static_cast<double>(report.total);
    report.stderr_bound = 1.0 / std::sqrt(n * report.fractions[1]) +
                          1.0 / std::sqrt(n * report.fractions[0]);
  }
  return report;
}

void WriteSyntheticCsv(std::ostream& out, const SyntheticSet& set) {
  for (std::size_t j = 0; j < set.dim(); ++j) out << 'f' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << JoinReals(set.points[i]) << ',' << set.labels[i] << '\n';
  }
}

SyntheticSet ReadSyntheticCsv(std::istream& in, std::optional<int> k) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "synthetic CSV is empty");
  const auto header = SplitCsvLine(line);
  if (header.size() < 2 || header.back() != "label") {
    throw Error(ErrorCode::kParse, "synthetic CSV header must end with 'label'");
  }
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (header[j] != fmt::format("f{}", j)) {
      throw Error(ErrorCode::kParse, fmt::format("unexpected header column '{}'", header[j]));
    }
  }
  SyntheticSet set;
  set.points = PointSet(d);
  std::vector<double> row(d);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != d + 1) {
      throw Error(ErrorCode::kParse, fmt::format("line {}: expected {} fields", line_no, d + 1));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const auto v = TryParseDouble(fields[j]);
      if (!v) throw Error(ErrorCode::kParse, fmt::format("line {}: bad number", line_no));
      row[j] = *v;
    }
    const auto t = TryParseInteger(fields[d]);
    if (!t || *t < 0) throw Error(ErrorCode::kParse, fmt::format("line {}: bad label", line_no));
    set.points.push_back(row);
    set.labels.push_back(static_cast<Label>(*t));
  }
  set.k = std::max(k.value_or(0), CountClasses(set.labels));
  set.raw_draws = set.size();
  return set;
}

void SaveSyntheticCsv(const SyntheticSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path));
  WriteSyntheticCsv(out, set);
}

SyntheticSet LoadSyntheticCsv(const std::string& path, std::optional<int> k) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path));
  return ReadSyntheticCsv(in, k);
}

}  // namespace copyforge

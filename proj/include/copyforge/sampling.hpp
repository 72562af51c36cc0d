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

// Synthetic query generation: draw points from a generating distribution,
// label them through the oracle, optionally balance the result per class.

#ifndef COPYFORGE_SAMPLING_HPP_
#define COPYFORGE_SAMPLING_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "copyforge/core.hpp"
#include "copyforge/oracle.hpp"

namespace copyforge {

class SamplingDistribution {
 public:
  enum class Kind { kUniform, kStandardNormal };

  static SamplingDistribution Uniform(Domain domain);
  static SamplingDistribution StandardNormal(std::size_t dim);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  // Present for kUniform only.
  const std::optional<Domain>& domain() const { return domain_; }
  std::string describe() const;

 private:
  SamplingDistribution(Kind kind, std::size_t dim, std::optional<Domain> domain)
      : kind_(kind), dim_(dim), domain_(std::move(domain)) {}

  Kind kind_;
  std::size_t dim_;
  std::optional<Domain> domain_;
};

// Sequential draw stream. Batch sizes do not affect the values produced:
// next(a) followed by next(b) equals next(a + b).
class PointSampler {
 public:
  PointSampler(SamplingDistribution dist, RngSeed seed);
  PointSet next(std::size_t n);

 private:
  SamplingDistribution dist_;
  Rng rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

PointSet Sample(const SamplingDistribution& dist, std::size_t n, RngSeed seed);

struct SyntheticSet {
  PointSet points;
  std::vector<Label> labels;
  int k = 0;
  std::string provenance;
  // Raw draws consumed to build the set (equals size() unless balanced).
  std::size_t raw_draws = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return points.dim(); }
  Dataset as_dataset() const;
};

SyntheticSet LabelPoints(Oracle& oracle, PointSet points, std::string provenance = {});

// Raw sampling: n draws from dist, labelled in batches.
SyntheticSet GenerateRaw(Oracle& oracle, const SamplingDistribution& dist, std::size_t n,
                         RngSeed seed);

// Rejection balancing: keeps a drawn point only while its class quota is
// open, until every class holds per_class points. Throws kQuotaUnreachable
// naming the starving classes once max_draws raw draws are spent.
SyntheticSet GenerateBalanced(Oracle& oracle, const SamplingDistribution& dist,
                              std::size_t per_class, std::size_t max_draws, RngSeed seed);

inline constexpr std::size_t kDrawBatch = 1024;

struct VolumeReport {
  std::size_t total = 0;
  std::vector<std::size_t> counts;
  std::vector<double> fractions;
  // 1/sqrt(N p+) + 1/sqrt(N p-); binary sets with both classes present only.
  std::optional<double> stderr_bound;
  std::vector<Label> empty_classes;
};

VolumeReport ComputeVolumeReport(const SyntheticSet& set);

// CSV with header f0,...,f{d-1},label.
void WriteSyntheticCsv(std::ostream& out, const SyntheticSet& set);
SyntheticSet ReadSyntheticCsv(std::istream& in, std::optional<int> k = {});
void SaveSyntheticCsv(const SyntheticSet& set, const std::string& path);
SyntheticSet LoadSyntheticCsv(const std::string& path, std::optional<int> k = {});

}  // namespace copyforge

#endif  // COPYFORGE_SAMPLING_HPP_

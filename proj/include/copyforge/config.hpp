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

// JSON configuration blocks shared by the experiment runner and the CLI
// subcommands. The schema is described in README.md.

#ifndef COPYFORGE_CONFIG_HPP_
#define COPYFORGE_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "copyforge/copying.hpp"
#include "copyforge/data.hpp"
#include "copyforge/metrics.hpp"
#include "copyforge/models.hpp"
#include "copyforge/oracle.hpp"
#include "copyforge/sampling.hpp"

namespace copyforge {

using Json = nlohmann::json;

Json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const Json& value);

HypothesisSpec ParseHypothesis(const Json& j);
Json HypothesisToJson(const HypothesisSpec& spec);

ColumnSchema ParseSchema(const Json& j);

struct DatasetSource {
  std::optional<std::filesystem::path> path;
  std::optional<ColumnSchema> schema;
  // "moons" or "volume_imbalance".
  std::optional<std::string> generator;
  std::size_t n = 2000;
  double noise = 0.1;
  std::optional<std::uint64_t> seed;
};

// `base` resolves relative file paths.
DatasetSource ParseDatasetSource(const Json& j, const std::filesystem::path& base);
Dataset LoadDatasetSource(const DatasetSource& source, RngSeed fallback_seed);

struct SamplerSettings {
  std::string distribution = "uniform";
  // Per-dimension bounds; [-half_width, half_width] when absent.
  std::optional<std::vector<Interval>> bounds;
  double half_width = kStandardHalfWidth;
  std::size_t n_samples = 100000;
  bool balanced = true;
  std::optional<std::size_t> per_class;
  std::optional<std::size_t> max_draws;

  SamplingDistribution distribution_for(std::size_t dim) const;
};

SamplerSettings ParseSampler(const Json& j);

// "grid": [...] or "grid": {"from": a, "to": b, "points": n} (log spaced).
CapacityConfig ParseCapacity(const Json& j);
std::vector<double> LogSpacedGrid(double from, double to, std::size_t points);

struct OracleSettings {
  std::optional<RemoteEndpoint> remote;
  std::optional<std::filesystem::path> model_path;
  std::size_t dim = 0;  // required for remote oracles
  int classes = 0;      // required for remote oracles
  bool cache = false;
};

OracleSettings ParseOracle(const Json& j, const std::filesystem::path& base);
Oracle MakeOracle(const OracleSettings& settings);

Json FidelityToJson(const FidelityReport& report);
Json SummaryToJson(const RunSummary& summary);

}  // namespace copyforge

#endif  // COPYFORGE_CONFIG_HPP_

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

#include "copyforge/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/core.h>

namespace copyforge {
namespace {

void RejectUnknownKeys(const Json& j, const std::set<std::string>& allowed, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorCode::kSchema, fmt::format("{} must be a JSON object", where));
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::kSchema, fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <class T>
T Get(const Json& j, const char* key, std::string_view where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

template <class T>
std::optional<T> GetOptional(const Json& j, const char* key, std::string_view where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return Get<T>(j, key, where);
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, fmt::format("{}: {}", path.string(), e.what()));
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << value.dump(2) << '\n';
}

HypothesisSpec ParseHypothesis(const Json& j) {
  constexpr std::string_view where = "hypothesis";
  RejectUnknownKeys(j,
                    {"family", "max_depth", "trees", "feature_fraction", "bootstrap", "threads",
                     "learning_rate", "epochs", "gamma", "regularization", "fit_bias"},
                    where);
  HypothesisSpec spec;
  spec.family = ParseFamily(Get<std::string>(j, "family", where));
  if (auto v = GetOptional<int>(j, "max_depth", where)) {
    spec.tree.max_depth = *v;
    spec.forest.max_depth = *v;
  }
  if (auto v = GetOptional<int>(j, "trees", where)) spec.forest.trees = *v;
  if (auto v = GetOptional<double>(j, "feature_fraction", where)) spec.forest.feature_fraction = *v;
  if (auto v = GetOptional<bool>(j, "bootstrap", where)) spec.forest.bootstrap = *v;
  if (auto v = GetOptional<unsigned>(j, "threads", where)) spec.forest.threads = *v;
  if (auto v = GetOptional<double>(j, "learning_rate", where)) spec.logistic.learning_rate = *v;
  if (auto v = GetOptional<int>(j, "epochs", where)) {
    spec.logistic.epochs = *v;
    spec.kernel.epochs = *v;
  }
  if (auto v = GetOptional<double>(j, "gamma", where)) spec.kernel.gamma = *v;
  if (auto v = GetOptional<double>(j, "regularization", where)) spec.kernel.regularization = *v;
  if (auto v = GetOptional<bool>(j, "fit_bias", where)) spec.kernel.fit_bias = *v;

  if (spec.forest.trees < 1) throw Error(ErrorCode::kSchema, "hypothesis.trees must be >= 1");
  if (spec.tree.max_depth && *spec.tree.max_depth < 0) {
    throw Error(ErrorCode::kSchema, "hypothesis.max_depth must be >= 0");
  }
  if (spec.family == Family::kLogistic &&
      (spec.logistic.epochs < 1 || !(spec.logistic.learning_rate > 0.0))) {
    throw Error(ErrorCode::kSchema, "logistic hypothesis needs epochs >= 1 and learning_rate > 0");
  }
  if (spec.family == Family::kRbf &&
      (spec.kernel.epochs < 1 || !(spec.kernel.gamma > 0.0) || !(spec.kernel.regularization > 0.0))) {
    throw Error(ErrorCode::kSchema, "rbf hypothesis needs epochs >= 1, gamma > 0, regularization > 0");
  }
  return spec;
}

Json HypothesisToJson(const HypothesisSpec& spec) {
  Json j;
  j["family"] = std::string(FamilyName(spec.family));
  switch (spec.family) {
    case Family::kTree:
      if (spec.tree.max_depth) j["max_depth"] = *spec.tree.max_depth;
      break;
    case Family::kForest:
      j["trees"] = spec.forest.trees;
      if (spec.forest.feature_fraction) j["feature_fraction"] = *spec.forest.feature_fraction;
      j["bootstrap"] = spec.forest.bootstrap;
      if (spec.forest.max_depth) j["max_depth"] = *spec.forest.max_depth;
      break;
    case Family::kLogistic:
      j["learning_rate"] = spec.logistic.learning_rate;
      j["epochs"] = spec.logistic.epochs;
      break;
    case Family::kRbf:
      j["gamma"] = spec.kernel.gamma;
      j["regularization"] = spec.kernel.regularization;
      j["epochs"] = spec.kernel.epochs;
      j["fit_bias"] = spec.kernel.fit_bias;
      break;
  }
  return j;
}

ColumnSchema ParseSchema(const Json& j) {
  constexpr std::string_view where = "schema";
  RejectUnknownKeys(j, {"columns"}, where);
  ColumnSchema schema;
  for (const auto& c : Get<Json>(j, "columns", where)) {
    RejectUnknownKeys(c, {"name", "kind", "categories"}, "schema column");
    ColumnSpec spec;
    spec.name = Get<std::string>(c, "name", "schema column");
    const auto kind = Get<std::string>(c, "kind", "schema column");
    if (kind == "numeric") {
      spec.kind = ColumnKind::kNumeric;
    } else if (kind == "nominal") {
      spec.kind = ColumnKind::kNominal;
    } else if (kind == "target") {
      spec.kind = ColumnKind::kTarget;
    } else {
      throw Error(ErrorCode::kSchema, fmt::format("column '{}': unknown kind '{}'", spec.name, kind));
    }
    if (auto cats = GetOptional<std::vector<std::string>>(c, "categories", "schema column")) {
      spec.categories = *cats;
    }
    schema.columns.push_back(std::move(spec));
  }
  schema.validate();
  return schema;
}

DatasetSource ParseDatasetSource(const Json& j, const std::filesystem::path& base) {
  constexpr std::string_view where = "dataset";
  RejectUnknownKeys(j, {"path", "schema", "generator", "n", "noise", "seed"}, where);
  DatasetSource source;
  if (auto p = GetOptional<std::string>(j, "path", where)) source.path = Resolve(base, *p);
  if (j.contains("schema")) source.schema = ParseSchema(j.at("schema"));
  source.generator = GetOptional<std::string>(j, "generator", where);
  if (auto v = GetOptional<std::size_t>(j, "n", where)) source.n = *v;
  if (auto v = GetOptional<double>(j, "noise", where)) source.noise = *v;
  source.seed = GetOptional<std::uint64_t>(j, "seed", where);

  if (source.path.has_value() == source.generator.has_value()) {
    throw Error(ErrorCode::kSchema, "dataset needs exactly one of 'path' or 'generator'");
  }
  if (source.path && !source.schema) throw Error(ErrorCode::kSchema, "dataset 'path' requires a 'schema'");
  if (source.generator && *source.generator != "moons" && *source.generator != "volume_imbalance") {
    throw Error(ErrorCode::kSchema, fmt::format("unknown generator '{}'", *source.generator));
  }
  return source;
}

Dataset LoadDatasetSource(const DatasetSource& source, RngSeed fallback_seed) {
  if (source.path) return LoadCsv(source.path->string(), *source.schema).data;
  const RngSeed seed = source.seed ? RngSeed{*source.seed} : fallback_seed;
  if (*source.generator == "moons") return MakeMoons(source.n, source.noise, seed);
  return MakeVolumeImbalance(source.n, seed);
}

SamplingDistribution SamplerSettings::distribution_for(std::size_t dim) const {
  if (distribution == "normal" || distribution == "standard_normal") {
    return SamplingDistribution::StandardNormal(dim);
  }
  if (bounds) {
    if (bounds->size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("sampler has {} bounds for dimension {}", bounds->size(), dim));
    }
    return SamplingDistribution::Uniform(Domain(*bounds));
  }
  return SamplingDistribution::Uniform(Domain(std::vector<Interval>(dim, {-half_width, half_width})));
}

SamplerSettings ParseSampler(const Json& j) {
  constexpr std::string_view where = "sampler";
  RejectUnknownKeys(j,
                    {"distribution", "bounds", "half_width", "n_samples", "balanced", "per_class",
                     "max_draws"},
                    where);
  SamplerSettings s;
  if (auto v = GetOptional<std::string>(j, "distribution", where)) s.distribution = *v;
  if (s.distribution != "uniform" && s.distribution != "normal" && s.distribution != "standard_normal") {
    throw Error(ErrorCode::kSchema, fmt::format("unknown distribution '{}'", s.distribution));
  }
  if (auto b = GetOptional<std::vector<std::vector<double>>>(j, "bounds", where)) {
    std::vector<Interval> bounds;
    for (const auto& pair : *b) {
      if (pair.size() != 2) throw Error(ErrorCode::kSchema, "sampler.bounds entries must be [lo, hi]");
      bounds.push_back({pair[0], pair[1]});
    }
    s.bounds = std::move(bounds);
  }
  if (auto v = GetOptional<double>(j, "half_width", where)) s.half_width = *v;
  if (auto v = GetOptional<std::size_t>(j, "n_samples", where)) s.n_samples = *v;
  if (auto v = GetOptional<bool>(j, "balanced", where)) s.balanced = *v;
  s.per_class = GetOptional<std::size_t>(j, "per_class", where);
  s.max_draws = GetOptional<std::size_t>(j, "max_draws", where);
  if (s.n_samples < 1) throw Error(ErrorCode::kSchema, "sampler.n_samples must be >= 1");
  if (s.per_class && *s.per_class < 1) throw Error(ErrorCode::kSchema, "sampler.per_class must be >= 1");
  return s;
}

std::vector<double> LogSpacedGrid(double from, double to, std::size_t points) {
  if (points < 1 || !(from > 0.0) || !(to > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "log grid needs positive bounds and at least one point");
  }
  if (points == 1) return {from};
  std::vector<double> grid(points);
  const double a = std::log10(from);
  const double b = std::log10(to);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return grid;
}

CapacityConfig ParseCapacity(const Json& j) {
  constexpr std::string_view where = "capacity";
  RejectUnknownKeys(j, {"grid", "epsilon", "validation_fraction", "validation_seed"}, where);
  CapacityConfig config;
  const Json& grid = j.at("grid");
  if (grid.is_array()) {
    config.grid = grid.get<std::vector<double>>();
  } else {
    RejectUnknownKeys(grid, {"from", "to", "points"}, "capacity.grid");
    config.grid = LogSpacedGrid(Get<double>(grid, "from", "capacity.grid"),
                                Get<double>(grid, "to", "capacity.grid"),
                                Get<std::size_t>(grid, "points", "capacity.grid"));
  }
  if (auto v = GetOptional<double>(j, "epsilon", where)) config.epsilon = *v;
  if (auto v = GetOptional<double>(j, "validation_fraction", where)) config.validation_fraction = *v;
  if (auto v = GetOptional<std::uint64_t>(j, "validation_seed", where)) config.validation_seed = {*v};
  try {
    config.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
  return config;
}

OracleSettings ParseOracle(const Json& j, const std::filesystem::path& base) {
  constexpr std::string_view where = "oracle";
  RejectUnknownKeys(j, {"url", "timeout_ms", "batch_size", "dim", "classes", "model", "cache"}, where);
  OracleSettings s;
  s.cache = GetOptional<bool>(j, "cache", where).value_or(false);
  if (auto model = GetOptional<std::string>(j, "model", where)) s.model_path = Resolve(base, *model);
  if (auto url = GetOptional<std::string>(j, "url", where)) {
    RemoteEndpoint endpoint;
    endpoint.url = *url;
    if (auto v = GetOptional<int>(j, "timeout_ms", where)) endpoint.timeout_ms = *v;
    if (auto v = GetOptional<std::size_t>(j, "batch_size", where)) endpoint.batch_size = *v;
    if (endpoint.timeout_ms < 1 || endpoint.batch_size < 1) {
      throw Error(ErrorCode::kSchema, "oracle timeout_ms and batch_size must be positive");
    }
    s.remote = endpoint;
    s.dim = Get<std::size_t>(j, "dim", where);
    s.classes = Get<int>(j, "classes", where);
    if (s.dim < 1 || s.classes < 1) throw Error(ErrorCode::kSchema, "oracle dim and classes must be positive");
  }
  if (s.remote.has_value() == s.model_path.has_value()) {
    throw Error(ErrorCode::kSchema, "oracle needs exactly one of 'url' or 'model'");
  }
  return s;
}

Oracle MakeOracle(const OracleSettings& settings) {
  if (settings.remote) {
    return Oracle::FromRemote(*settings.remote, settings.dim, settings.classes, settings.cache);
  }
  return Oracle::FromModel(std::make_shared<const CopyModel>(LoadModel(settings.model_path->string())),
                           settings.cache);
}

Json FidelityToJson(const FidelityReport& report) {
  Json j;
  j["r_emp_synthetic"] = report.r_emp_synthetic;
  j["r_emp_original"] = report.r_emp_original ? Json(*report.r_emp_original) : Json(nullptr);
  j["acc_original"] = report.acc_original;
  j["acc_copy"] = report.acc_copy ? Json(*report.acc_copy) : Json(nullptr);
  j["acc_copy_estimated"] = report.acc_copy_estimated;
  return j;
}

Json SummaryToJson(const RunSummary& summary) {
  auto metric = [](const MetricSummary& m) { return Json{{"mean", m.mean}, {"std", m.std}}; };
  auto optional_metric = [&](const std::optional<MetricSummary>& m) {
    return m ? metric(*m) : Json(nullptr);
  };
  Json j;
  j["count"] = summary.count;
  j["r_emp_synthetic"] = metric(summary.r_emp_synthetic);
  j["r_emp_original"] = optional_metric(summary.r_emp_original);
  j["acc_original"] = metric(summary.acc_original);
  j["acc_copy"] = optional_metric(summary.acc_copy);
  j["acc_copy_estimated"] = metric(summary.acc_copy_estimated);
  return j;
}

}  // namespace copyforge

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

#include "copyforge/commands.hpp"

#include <fstream>
#include <set>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "copyforge/experiment.hpp"
#include "copyforge/text.hpp"

namespace copyforge {
namespace {

// A loaded command config plus the resolved seed and output directory.
struct Loaded {
  Json json;
  std::filesystem::path base;
  RngSeed seed;
  std::filesystem::path out;
};

Loaded Load(const CommandOptions& options, const std::set<std::string>& keys) {
  Loaded l;
  l.json = ReadJsonFile(options.config);
  l.base = options.config.parent_path();
  if (!l.json.is_object()) throw Error(ErrorCode::kSchema, "config must be a JSON object");
  for (const auto& [key, value] : l.json.items()) {
    if (key != "seed" && key != "output_dir" && !keys.contains(key)) {
      throw Error(ErrorCode::kSchema, fmt::format("unknown key '{}' in config", key));
    }
  }
  try {
    l.seed = RngSeed{options.seed.value_or(l.json.value("seed", std::uint64_t{0}))};
    l.out = options.out.value_or(std::filesystem::path(l.json.value("output_dir", std::string("out"))));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
  std::filesystem::create_directories(l.out);
  return l;
}

const Json& Require(const Loaded& l, const char* key) {
  if (!l.json.contains(key)) throw Error(ErrorCode::kSchema, fmt::format("config is missing '{}'", key));
  return l.json.at(key);
}

std::vector<std::size_t> Excluded(const Loaded& l) {
  try {
    return l.json.value("excluded_features", std::vector<std::size_t>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
}

CopyConfig MakeCopyConfig(const Loaded& l, const Oracle& oracle, const SamplerSettings& sampler) {
  CopyConfig cc;
  if (l.json.contains("hypothesis")) cc.hypothesis = ParseHypothesis(l.json.at("hypothesis"));
  cc.sampler = sampler.distribution_for(oracle.dim());
  cc.n_samples = sampler.n_samples;
  cc.balanced = sampler.balanced;
  cc.per_class = sampler.per_class;
  cc.max_draws = sampler.max_draws;
  cc.seed = l.seed;
  cc.excluded_features = Excluded(l);
  return cc;
}

void WriteTraceCsv(const std::filesystem::path& path, const std::vector<CapacityPoint>& trace) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << "capacity,validation_error,training_error,feasible,failure\n";
  for (const auto& p : trace) {
    out << FormatDouble(p.capacity) << ',' << FormatDouble(p.validation_error) << ','
        << FormatDouble(p.training_error) << ',' << (p.feasible ? 1 : 0) << ','
        << (p.failure ? "\"" + *p.failure + "\"" : "") << '\n';
  }
}

Json VolumeJson(const VolumeReport& v) {
  Json j;
  j["total"] = v.total;
  j["counts"] = v.counts;
  j["fractions"] = v.fractions;
  j["stderr_bound"] = v.stderr_bound ? Json(*v.stderr_bound) : Json(nullptr);
  return j;
}

}  // namespace

Json CommandRun(const CommandOptions& options) {
  ExperimentConfig config = LoadExperimentConfig(options.config);
  if (options.seed) config.seed = *options.seed;
  if (options.out) config.output_dir = *options.out;
  const ExperimentResult result = RunExperiment(config);
  return ReadJsonFile(config.output_dir / "summary.json");
}

Json CommandCopy(const CommandOptions& options) {
  const Loaded l = Load(options, {"oracle", "hypothesis", "sampler", "excluded_features", "capacity",
                                  "acc_original"});
  Oracle oracle = MakeOracle(ParseOracle(Require(l, "oracle"), l.base));
  const SamplerSettings sampler = l.json.contains("sampler") ? ParseSampler(l.json.at("sampler")) : SamplerSettings{};
  CopyConfig cc = MakeCopyConfig(l, oracle, sampler);
  if (l.json.contains("capacity")) cc.capacity = ParseCapacity(l.json.at("capacity"));

  const CopyResult result = SinglePassCopy(oracle, cc);
  SaveModel(result.model, (l.out / "copy.model").string());
  SaveSyntheticCsv(result.synthetic, (l.out / "synthetic.csv").string());
  if (!result.capacity_trace.empty()) WriteTraceCsv(l.out / "capacity_trace.csv", result.capacity_trace);

  Json metrics;
  metrics["r_emp_synthetic"] = result.r_emp_synthetic;
  metrics["r_emp_original"] = nullptr;
  metrics["acc_copy"] = nullptr;
  if (l.json.contains("acc_original")) {
    const double a = l.json.at("acc_original").get<double>();
    metrics["acc_original"] = a;
    metrics["acc_copy_estimated"] = EstimatedCopyAccuracy(a, result.r_emp_synthetic);
  } else {
    metrics["acc_original"] = nullptr;
    metrics["acc_copy_estimated"] = nullptr;
  }
  metrics["n_samples"] = result.synthetic.size();
  metrics["seed"] = l.seed.value;
  metrics["family"] = std::string(FamilyName(cc.hypothesis.family));
  metrics["oracle_queries"] = oracle.query_count();
  metrics["volume"] = VolumeJson(result.volume);
  WriteJsonFile(l.out / "metrics.json", metrics);
  return metrics;
}

Json CommandSample(const CommandOptions& options) {
  const Loaded l = Load(options, {"oracle", "sampler"});
  Oracle oracle = MakeOracle(ParseOracle(Require(l, "oracle"), l.base));
  const SamplerSettings sampler = l.json.contains("sampler") ? ParseSampler(l.json.at("sampler")) : SamplerSettings{};
  const SyntheticSet set = DrawSynthetic(oracle, MakeCopyConfig(l, oracle, sampler));
  SaveSyntheticCsv(set, (l.out / "synthetic.csv").string());
  Json report;
  report["n_samples"] = set.size();
  report["raw_draws"] = set.raw_draws;
  report["seed"] = l.seed.value;
  report["provenance"] = set.provenance;
  report["volume"] = VolumeJson(ComputeVolumeReport(set));
  WriteJsonFile(l.out / "sample.json", report);
  return report;
}

Json CommandEvaluate(const CommandOptions& options) {
  const Loaded l = Load(options, {"model", "dataset", "oracle", "sampler", "acc_original"});
  const bool has_dataset = l.json.contains("dataset");
  const bool has_oracle = l.json.contains("oracle");
  if (!has_dataset && !has_oracle) {
    throw Error(ErrorCode::kUsage, "evaluate needs a 'dataset', an 'oracle', or both");
  }
  const auto model_path = l.json.value("model", std::string());
  if (model_path.empty()) throw Error(ErrorCode::kSchema, "config is missing 'model'");
  const std::filesystem::path p(model_path);
  const CopyModel copy = LoadModel((p.is_absolute() ? p : l.base / p).string());

  Json report;
  report["seed"] = l.seed.value;
  report["acc_copy"] = nullptr;
  report["r_emp_original"] = nullptr;
  report["r_emp_sampled"] = nullptr;
  std::optional<Dataset> data;
  if (has_dataset) {
    data = LoadDatasetSource(ParseDatasetSource(l.json.at("dataset"), l.base), l.seed);
    report["acc_copy"] = CopyAccuracy(copy, *data);
    report["n_dataset"] = data->size();
  }
  if (has_oracle) {
    Oracle oracle = MakeOracle(ParseOracle(l.json.at("oracle"), l.base));
    if (data) {
      report["r_emp_original"] = EmpiricalFidelityError(copy.predict(data->points), oracle.query(data->points));
    }
    if (!data || l.json.contains("sampler")) {
      SamplerSettings sampler = l.json.contains("sampler") ? ParseSampler(l.json.at("sampler")) : SamplerSettings{};
      const PointSet points = Sample(sampler.distribution_for(oracle.dim()), sampler.n_samples, l.seed);
      report["r_emp_sampled"] = EmpiricalFidelityError(copy.predict(points), oracle.query(points));
      report["n_samples"] = points.size();
    }
  }
  if (l.json.contains("acc_original") && copy.training_error) {
    const double a = l.json.at("acc_original").get<double>();
    report["acc_original"] = a;
    report["acc_copy_estimated"] = EstimatedCopyAccuracy(a, *copy.training_error);
  }
  WriteJsonFile(l.out / "evaluation.json", report);
  return report;
}

Json CommandSweep(const CommandOptions& options) {
  const Loaded l = Load(options, {"oracle", "hypothesis", "sampler", "capacity", "excluded_features"});
  Oracle oracle = MakeOracle(ParseOracle(Require(l, "oracle"), l.base));
  const SamplerSettings sampler = l.json.contains("sampler") ? ParseSampler(l.json.at("sampler")) : SamplerSettings{};
  const CopyConfig cc = MakeCopyConfig(l, oracle, sampler);
  const CapacityConfig capacity = ParseCapacity(Require(l, "capacity"));
  WithCapacity(cc.hypothesis, capacity.grid.front());  // rejects families without a knob

  const SyntheticSet synthetic = DrawSynthetic(oracle, cc);
  const SyntheticSet train = MaskFeatures(synthetic, cc.excluded_features);
  const SweepResult sweep = CapacitySweep(train, capacity, cc.hypothesis, DeriveSeed(l.seed, 1));
  CopyModel selected(sweep.model.model(), oracle.dim(), cc.excluded_features);
  selected.training_error = sweep.model.training_error;
  selected.provenance = synthetic.provenance;

  WriteTraceCsv(l.out / "sweep.csv", sweep.trace);
  SaveModel(selected, (l.out / "selected.model").string());
  Json report;
  report["selected_capacity"] = sweep.selected_capacity;
  report["selected_index"] = sweep.selected_index;
  report["reference_error"] = sweep.reference_error;
  report["epsilon"] = capacity.epsilon;
  report["n_samples"] = synthetic.size();
  report["seed"] = l.seed.value;
  WriteJsonFile(l.out / "sweep.json", report);
  return report;
}

}  // namespace copyforge

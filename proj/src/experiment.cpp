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

#include "copyforge/experiment.hpp"

#include <fstream>
#include <memory>
#include <set>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "copyforge/text.hpp"

namespace copyforge {
namespace {

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << text;
}

Json VolumeToJson(const VolumeReport& v) {
  Json j;
  j["total"] = v.total;
  j["counts"] = v.counts;
  j["fractions"] = v.fractions;
  j["stderr_bound"] = v.stderr_bound ? Json(*v.stderr_bound) : Json(nullptr);
  return j;
}

Json TraceToJson(const std::vector<CapacityPoint>& trace) {
  Json out = Json::array();
  for (const auto& p : trace) {
    Json j;
    j["capacity"] = p.capacity;
    j["validation_error"] = p.validation_error;
    j["training_error"] = p.training_error;
    j["feasible"] = p.feasible;
    j["failure"] = p.failure ? Json(*p.failure) : Json(nullptr);
    out.push_back(std::move(j));
  }
  return out;
}

std::string DefaultName(const DatasetSource& source) {
  if (source.generator) return *source.generator;
  return source.path->stem().string();
}

std::string PlusMinus(const MetricSummary& m) { return fmt::format("{:.4f} ± {:.4f}", m.mean, m.std); }

std::string PlusMinus(const std::optional<MetricSummary>& m) { return m ? PlusMinus(*m) : "n/a"; }

}  // namespace

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw Error(ErrorCode::kSchema, "repetitions must be >= 1");
  if (sampler.n_samples < 1) throw Error(ErrorCode::kSchema, "sampler.n_samples must be >= 1");
  if (copies.empty()) throw Error(ErrorCode::kSchema, "at least one copy family is required");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kSchema, "test_fraction must lie in (0, 1)");
  }
  if (capacity) {
    for (const auto& c : copies) {
      try {
        for (double value : capacity->grid) WithCapacity(c, value);
      } catch (const Error& e) {
        throw Error(ErrorCode::kSchema, fmt::format("capacity grid: {}", e.what()));
      }
    }
  }
}

ExperimentConfig ParseExperimentConfig(const Json& j, const std::filesystem::path& base) {
  static const std::set<std::string> kKeys = {
      "name",    "dataset",     "test_fraction", "standardize", "original",          "copies",
      "sampler", "repetitions", "seed",          "output_dir",  "excluded_features", "capacity"};
  if (!j.is_object()) throw Error(ErrorCode::kSchema, "experiment config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) throw Error(ErrorCode::kSchema, fmt::format("unknown key '{}' in config", key));
  }
  try {
    ExperimentConfig c;
    c.dataset = ParseDatasetSource(j.at("dataset"), base);
    c.name = j.value("name", DefaultName(c.dataset));
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.standardize = j.value("standardize", c.standardize);
    c.original = ParseHypothesis(j.at("original"));
    const Json& copies = j.at("copies");
    if (!copies.is_array()) throw Error(ErrorCode::kSchema, "'copies' must be an array");
    for (const auto& h : copies) c.copies.push_back(ParseHypothesis(h));
    if (j.contains("sampler")) c.sampler = ParseSampler(j.at("sampler"));
    c.repetitions = j.value("repetitions", c.repetitions);
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.excluded_features = j.value("excluded_features", c.excluded_features);
    if (j.contains("capacity") && !j.at("capacity").is_null()) c.capacity = ParseCapacity(j.at("capacity"));
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kSchema, e.what());
    throw;
  }
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  return ParseExperimentConfig(ReadJsonFile(path), path.parent_path());
}

Json ErrorRecord(const std::exception& e) {
  Json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = std::string(ErrorCodeName(err->code()));
    j["retryable"] = err->retryable();
  } else {
    j["error"] = "internal";
    j["retryable"] = false;
  }
  j["message"] = e.what();
  return j;
}

std::string SummaryCsv(const ExperimentResult& result) {
  std::string out =
      "dataset,original,copy,repetitions,acc_original,acc_copy_mean,acc_copy_std,"
      "acc_copy_estimated_mean,acc_copy_estimated_std,r_emp_original_mean,r_emp_original_std,"
      "r_emp_synthetic_mean,r_emp_synthetic_std\n";
  auto opt = [](const std::optional<MetricSummary>& m, bool mean) {
    return m ? FormatDouble(mean ? m->mean : m->std) : std::string();
  };
  for (const auto& f : result.copies) {
    const RunSummary& s = f.summary;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", result.name, FamilyName(result.original),
                       FamilyName(f.family), s.count, FormatDouble(result.acc_original),
                       opt(s.acc_copy, true), opt(s.acc_copy, false), FormatDouble(s.acc_copy_estimated.mean),
                       FormatDouble(s.acc_copy_estimated.std), opt(s.r_emp_original, true),
                       opt(s.r_emp_original, false), FormatDouble(s.r_emp_synthetic.mean),
                       FormatDouble(s.r_emp_synthetic.std));
  }
  return out;
}

std::string SummaryText(const ExperimentResult& result) {
  std::string out = fmt::format("{:<20} {:<10} {:<10} {:>6}  {:<17} {:<17} {:<17}\n", "dataset", "original",
                                "copy", "A_O", "A_C", "est. A_C", "R_emp(D)");
  for (const auto& f : result.copies) {
    out += fmt::format("{:<20} {:<10} {:<10} {:>6.4f}  {:<17} {:<17} {:<17}\n", result.name,
                       FamilyName(result.original), FamilyName(f.family), result.acc_original,
                       PlusMinus(f.summary.acc_copy), PlusMinus(f.summary.acc_copy_estimated),
                       PlusMinus(f.summary.r_emp_original));
  }
  return out;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  config.validate();
  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir / "runs");
  std::filesystem::create_directories(dir / "copies");
  std::filesystem::remove(dir / "FAILED");
  std::filesystem::remove(dir / "error.json");

  std::string stage = "load";
  try {
    const RngSeed base{config.seed};
    const Dataset data = LoadDatasetSource(config.dataset, base);
    for (const auto& v : ValidateDataset(data)) throw Error(ErrorCode::kSchema, v);

    stage = "split";
    auto [train, test] = StratifiedSplit(data, config.test_fraction, DeriveSeed(base, 100));
    if (config.standardize) {
      auto [scaler, scaled_train] = FitStandardize(train);
      train = std::move(scaled_train);
      test = ApplyStandardize(scaler, test);
    }

    stage = "original";
    auto original = std::make_shared<CopyModel>(
        TrainHypothesis(config.original, train, DeriveSeed(base, 101)), train.dim());
    ExperimentResult result;
    result.name = config.name;
    result.original = config.original.family;
    result.acc_original = CopyAccuracy(*original, test);
    SaveModel(*original, (dir / "original.model").string());
    spdlog::info("{}: original {} A_O={:.4f} on {} test points", config.name, FamilyName(result.original),
                 result.acc_original, test.size());

    Oracle oracle = Oracle::FromModel(original);
    const SamplingDistribution dist = config.sampler.distribution_for(train.dim());
    EvaluationData evaluation{result.acc_original, &test, &train};
    for (const auto& spec : config.copies) result.copies.push_back({spec.family, {}, {}});

    for (int r = 0; r < config.repetitions; ++r) {
      stage = fmt::format("repetition {}", r);
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
      Json run;
      run["repetition"] = r;
      run["seed"] = seed;
      run["dataset"] = config.name;
      run["copies"] = Json::array();
      for (std::size_t c = 0; c < config.copies.size(); ++c) {
        CopyConfig cc;
        cc.hypothesis = config.copies[c];
        cc.sampler = dist;
        cc.n_samples = config.sampler.n_samples;
        cc.balanced = config.sampler.balanced;
        cc.per_class = config.sampler.per_class;
        cc.max_draws = config.sampler.max_draws;
        // Distinct sample streams per family within a repetition.
        cc.seed = DeriveSeed({seed}, c);
        cc.excluded_features = config.excluded_features;
        cc.capacity = config.capacity;

        const std::uint64_t before = oracle.query_count();
        CopyResult copy = SinglePassCopy(oracle, cc, &evaluation);
        const FidelityReport& report = *copy.fidelity;
        result.copies[c].reports.push_back(report);

        Json j = FidelityToJson(report);
        j["family"] = std::string(FamilyName(cc.hypothesis.family));
        j["hypothesis"] = HypothesisToJson(cc.hypothesis);
        j["n_samples"] = copy.synthetic.size();
        j["seed"] = seed;
        j["oracle_queries"] = oracle.query_count() - before;
        j["volume"] = VolumeToJson(copy.volume);
        if (!copy.capacity_trace.empty()) j["capacity_trace"] = TraceToJson(copy.capacity_trace);
        run["copies"].push_back(std::move(j));
        if (r == 0) {
          SaveModel(copy.model, (dir / "copies" / fmt::format("{}.model", FamilyName(cc.hypothesis.family))).string());
        }
        spdlog::info("{} rep {} {}: R_emp(Z)={:.5f} A_C={:.4f}", config.name, r,
                     FamilyName(cc.hypothesis.family), report.r_emp_synthetic, report.acc_copy.value_or(0.0));
      }
      WriteJsonFile(dir / "runs" / fmt::format("run_{}.json", r), run);
    }

    stage = "summary";
    Json summary;
    summary["dataset"] = config.name;
    summary["original"] = HypothesisToJson(config.original);
    summary["acc_original"] = result.acc_original;
    summary["repetitions"] = config.repetitions;
    summary["base_seed"] = config.seed;
    summary["copies"] = Json::array();
    for (auto& f : result.copies) {
      f.summary = SummarizeRuns(f.reports);
      Json s = SummaryToJson(f.summary);
      s["family"] = std::string(FamilyName(f.family));
      summary["copies"].push_back(std::move(s));
    }
    WriteJsonFile(dir / "summary.json", summary);
    WriteText(dir / "summary.csv", SummaryCsv(result));
    WriteText(dir / "summary.txt", SummaryText(result));
    return result;
  } catch (const std::exception& e) {
    Json record = ErrorRecord(e);
    record["stage"] = stage;
    try {
      WriteJsonFile(dir / "error.json", record);
      WriteText(dir / "FAILED", stage + "\n");
    } catch (...) {
      // The original error is more useful than a failure to report it.
    }
    throw;
  }
}

}  // namespace copyforge

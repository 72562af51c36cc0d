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

// copyforge <run|copy|sample|evaluate|sweep> --config <path> [--seed N] [--out DIR]
//
// Exit status: 0 on success, 2 on usage errors, 1 otherwise. Failures print
// a one-line JSON error record on stderr.

#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "copyforge/commands.hpp"
#include "copyforge/experiment.hpp"

namespace {

int Fail(const copyforge::Json& record, int status) {
  std::cerr << record.dump() << std::endl;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  copyforge::InitLogging();
  CLI::App app{"Copy black-box classifiers through hard-label queries."};
  app.require_subcommand(1);

  using Handler = std::function<copyforge::Json(const copyforge::CommandOptions&)>;
  const std::map<std::string, std::pair<std::string, Handler>> commands = {
      {"run", {"Run a full experiment and write summary tables.", copyforge::CommandRun}},
      {"copy", {"Copy an oracle into a model file.", copyforge::CommandCopy}},
      {"sample", {"Write an oracle-labelled synthetic CSV.", copyforge::CommandSample}},
      {"evaluate", {"Score a copy against a dataset and/or an oracle.", copyforge::CommandEvaluate}},
      {"sweep", {"Run a capacity sweep and write its trace.", copyforge::CommandSweep}},
  };

  copyforge::CommandOptions options;
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out, "Override the output directory");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail({{"error", "usage"}, {"retryable", false}, {"message", e.what()}}, 2);
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    options.config = config;
    if (sub->count("--seed") > 0) options.seed = seed;
    if (sub->count("--out") > 0) options.out = out;
    try {
      const copyforge::Json report = commands.at(name).second(options);
      std::cout << report.dump(2) << std::endl;
      return 0;
    } catch (const copyforge::Error& e) {
      return Fail(copyforge::ErrorRecord(e), e.code() == copyforge::ErrorCode::kUsage ? 2 : 1);
    } catch (const std::exception& e) {
      return Fail(copyforge::ErrorRecord(e), 1);
    }
  }
  return 2;
}

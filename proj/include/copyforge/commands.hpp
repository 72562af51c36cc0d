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

// The copyforge subcommands. Each reads one JSON config and writes its
// outputs into a directory; see README.md.

#ifndef COPYFORGE_COMMANDS_HPP_
#define COPYFORGE_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "copyforge/config.hpp"

namespace copyforge {

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

// Each returns the JSON document it also writes as the command's report.
Json CommandRun(const CommandOptions& options);
Json CommandCopy(const CommandOptions& options);
Json CommandSample(const CommandOptions& options);
Json CommandEvaluate(const CommandOptions& options);
Json CommandSweep(const CommandOptions& options);

}  // namespace copyforge

#endif  // COPYFORGE_COMMANDS_HPP_

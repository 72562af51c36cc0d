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

#ifndef COPYFORGE_TEXT_HPP_
#define COPYFORGE_TEXT_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copyforge/core.hpp"

namespace copyforge {

// Shortest decimal text that parses back to the identical double.
std::string FormatDouble(double value);

// Strict: the whole token must be a number. Throws kParse otherwise.
double ParseDouble(std::string_view token);
std::optional<double> TryParseDouble(std::string_view token);
std::optional<long long> TryParseInteger(std::string_view token);

std::string_view Trim(std::string_view text);

// Splits one CSV record on commas, trimming whitespace and one level of
// surrounding double quotes per field.
std::vector<std::string> SplitCsvLine(std::string_view line);

// Comma-joined row of FormatDouble values.
std::string JoinReals(std::span<const double> values);

}  // namespace copyforge

#endif  // COPYFORGE_TEXT_HPP_

// Copyright 2026 The provrepro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pure semantics of the built-in job kinds. All functions are deterministic.

#ifndef PROVREPRO_JOBS_HPP
#define PROVREPRO_JOBS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace provrepro {

/// Memory reserved on every node on top of a job's own requirement.
inline constexpr std::int64_t kOverheadMb = 32;

/// OOM law: a job runs iff required + kOverheadMb <= node RAM.
constexpr bool fits_in_memory(std::int64_t required_mb, std::int64_t node_ram_mb) noexcept {
    return required_mb + kOverheadMb <= node_ram_mb;
}

/// Maximal runs of non-whitespace (ASCII space, \t, \n, \v, \f, \r).
std::vector<std::string_view> tokenize(std::string_view text);

/// Splits text at the word boundary that best balances the two halves'
/// lengths once whitespace is normalized to single spaces; the earliest
/// boundary wins ties. No word is divided.
std::pair<std::string, std::string> split_text(std::string_view text);

/// Decimal token count followed by a newline.
std::string word_count(std::string_view text);

/// Sum of two decimal counts followed by a newline. Throws
/// Error(MalformedInput) when either side is not a decimal count.
std::string merge_counts(std::string_view first, std::string_view second);

}  // namespace provrepro

#endif  // PROVREPRO_JOBS_HPP

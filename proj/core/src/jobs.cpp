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

#include "provrepro/jobs.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "provrepro/error.hpp"

namespace provrepro {
namespace {

constexpr bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

std::string join(const std::vector<std::string_view>& tokens, std::size_t begin,
                 std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) {
            out.push_back(' ');
        }
        out.append(tokens[i]);
    }
    return out;
}

std::uint64_t parse_count(std::string_view text, std::string_view which) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) {
        ++b;
    }
    while (e > b && is_space(text[e - 1])) {
        --e;
    }
    const auto digits = text.substr(b, e - b);
    std::uint64_t value = 0;
    const auto* first = digits.data();
    const auto* last = digits.data() + digits.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (digits.empty() || ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::MalformedInput,
                    fmt::format("{} input is not a decimal count", which));
    }
    return value;
}

}  // namespace

std::vector<std::string_view> tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) {
            ++i;
        }
        const auto start = i;
        while (i < text.size() && !is_space(text[i])) {
            ++i;
        }
        if (i > start) {
            tokens.push_back(text.substr(start, i - start));
        }
    }
    return tokens;
}

std::pair<std::string, std::string> split_text(std::string_view text) {
    const auto tokens = tokenize(text);
    const auto n = tokens.size();
    std::int64_t total = 0;
    for (const auto t : tokens) {
        total += static_cast<std::int64_t>(t.size());
    }
    // Cut c puts tokens[0, c) left; each side is its tokens plus separators.
    std::size_t best_cut = 0;
    auto best_gap = std::numeric_limits<std::int64_t>::max();
    std::int64_t left_chars = 0;
    for (std::size_t cut = 0; cut <= n; ++cut) {
        if (cut > 0) {
            left_chars += static_cast<std::int64_t>(tokens[cut - 1].size());
        }
        const auto left = left_chars + static_cast<std::int64_t>(cut > 0 ? cut - 1 : 0);
        const auto right =
            (total - left_chars) + static_cast<std::int64_t>(n - cut > 0 ? n - cut - 1 : 0);
        const auto gap = std::abs(left - right);
        if (gap < best_gap) {
            best_gap = gap;
            best_cut = cut;
        }
    }
    return {join(tokens, 0, best_cut), join(tokens, best_cut, n)};
}

std::string word_count(std::string_view text) {
    return fmt::format("{}\n", tokenize(text).size());
}

std::string merge_counts(std::string_view first, std::string_view second) {
    const auto a = parse_count(first, "first");
    const auto b = parse_count(second, "second");
    if (a > std::numeric_limits<std::uint64_t>::max() - b) {
        throw Error(ErrorCode::MalformedInput, "count sum overflows");
    }
    return fmt::format("{}\n", a + b);
}

}  // namespace provrepro

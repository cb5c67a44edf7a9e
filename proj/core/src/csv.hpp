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

#ifndef PROVREPRO_SRC_CSV_HPP
#define PROVREPRO_SRC_CSV_HPP

#include <initializer_list>
#include <string>
#include <string_view>

namespace provrepro {

// RFC 4180 quoting, only when needed.
inline std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(value);
    }
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string csv_row(std::initializer_list<std::string_view> fields) {
    std::string line;
    bool first = true;
    for (const auto field : fields) {
        if (!first) {
            line.push_back(',');
        }
        first = false;
        line += csv_field(field);
    }
    line.push_back('\n');
    return line;
}

}  // namespace provrepro

#endif  // PROVREPRO_SRC_CSV_HPP

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

#ifndef PROVREPRO_MD5_HPP
#define PROVREPRO_MD5_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace provrepro {

/// Incremental MD5 (RFC 1321).
class Md5 {
  public:
    using Digest = std::array<std::uint8_t, 16>;

    Md5() noexcept;

    void update(std::string_view data) noexcept;
    /// Finishes the computation. The hasher must not be updated afterwards.
    [[nodiscard]] Digest finish() noexcept;

  private:
    void transform(const std::uint8_t* block) noexcept;

    std::array<std::uint32_t, 4> state_;
    std::uint64_t length_ = 0;
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
};

std::string to_hex(const Md5::Digest& digest);

/// Lowercase hex digest of data.
std::string md5_hex(std::string_view data);

}  // namespace provrepro

#endif  // PROVREPRO_MD5_HPP

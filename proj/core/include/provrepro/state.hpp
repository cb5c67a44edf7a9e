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

// State directory helpers shared by the persistent stores.

#ifndef PROVREPRO_STATE_HPP
#define PROVREPRO_STATE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace provrepro {

inline constexpr std::string_view kHomeEnv = "PROVREPRO_HOME";
inline constexpr std::string_view kDefaultHome = "./.provrepro";

/// $PROVREPRO_HOME, or ./.provrepro when unset or empty.
std::filesystem::path resolve_home();

/// Exclusive advisory lock (flock) held for the object's lifetime.
/// Serializes writers across threads and processes; the lock file is
/// created on demand.
class FileLock {
  public:
    explicit FileLock(const std::filesystem::path& lock_file);
    ~FileLock();

    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

  private:
    int fd_ = -1;
};

std::optional<std::string> read_file(const std::filesystem::path& path);

/// Replaces path via write-to-temp + rename so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

void append_line(const std::filesystem::path& path, std::string_view line);

}  // namespace provrepro

#endif  // PROVREPRO_STATE_HPP

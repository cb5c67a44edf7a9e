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

#ifndef PROVREPRO_TOOLS_CLI_HPP
#define PROVREPRO_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

#include "provrepro/error.hpp"

namespace provrepro::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;    // bad input, unknown or uncaptured wf id
inline constexpr int kExitProvisioning = 2;  // flavors, images, IP space, VM lifecycle
inline constexpr int kExitExecution = 3;     // staging, missing inputs, failed jobs
inline constexpr int kExitCapture = 4;       // unmapped jobs, duplicate capture
inline constexpr int kExitDiffer = 5;        // compare/report verdict false
inline constexpr int kExitState = 6;         // unreadable or corrupt state directory
inline constexpr int kExitUsage = 64;        // command-line syntax

int exit_code_for(ErrorCode code) noexcept;

/// Runs one CLI invocation. args excludes the program name. State lives
/// under $PROVREPRO_HOME (default ./.provrepro).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace provrepro::cli

#endif  // PROVREPRO_TOOLS_CLI_HPP
